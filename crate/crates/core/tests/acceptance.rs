//! Acceptance matrix: one PASS/FAIL line per criterion, then the failing reports.
//! Tolerances live with each criterion in `sklyanin::suite`. Runs without the
//! libtest harness so that the lines are not captured.

use std::process::ExitCode;

use sklyanin::suite::{run_suite, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let config = SuiteConfig { quick: true, seed: 7 };
    let outcomes = run_suite(&config);
    for o in &outcomes {
        println!(
            "criterion {:>2} {:<45} {} ({} checks, {:.1} s)",
            o.number,
            o.title,
            if o.pass() { "PASS" } else { "FAIL" },
            o.reports.len(),
            o.runtime_ms / 1e3
        );
    }
    let mut failed = 0;
    for o in &outcomes {
        for r in o.failures() {
            failed += 1;
            println!("  FAIL {} rel {:.3e} tol {:.0e} {}", r.id, r.rel_error, r.tolerance, r.note);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass()).count();
    println!("acceptance: {passed}/{} criteria passed", CRITERIA.len());
    if outcomes.len() == CRITERIA.len() && failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
