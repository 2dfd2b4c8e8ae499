//! Numerical toolkit for Sklyanin-Whittaker integrals.

pub mod dpp;
pub mod error;
pub mod linalg;
pub mod mb;
pub mod oracles;
pub mod poly;
pub mod qsw;
pub mod report;
pub mod roots;
pub mod special;
pub mod suite;
pub mod sw;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/roots.md")]
    mod roots {}
    #[doc = include_str!("../../../book/src/sw-integrals.md")]
    mod sw_integrals {}
    #[doc = include_str!("../../../book/src/point-process.md")]
    mod point_process {}
    #[doc = include_str!("../../../book/src/q-deformation.md")]
    mod q_deformation {}
    #[doc = include_str!("../../../book/src/mellin-barnes.md")]
    mod mellin_barnes {}
    #[doc = include_str!("../../../book/src/reports.md")]
    mod reports {}
}
