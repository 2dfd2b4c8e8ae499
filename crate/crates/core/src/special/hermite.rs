use crate::poly::Polynomial;

/// Monic Hermite polynomial of degree `k` for the weight `e^{-x^2/2}/sqrt(2 pi)`,
/// from `H_{k+1} = x H_k - k H_{k-1}`.
pub fn hermite_monic(k: usize) -> Polynomial {
    let mut prev = vec![1.0];
    if k == 0 {
        return Polynomial(prev);
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..k {
        let mut next = vec![0.0; j + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    Polynomial(cur)
}

/// Monic Hermite basis `H_0, ..., H_{n-1}`.
pub fn hermite_basis(n: usize) -> Vec<Polynomial> {
    (0..n).map(hermite_monic).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_monic(0).0, vec![1.0]);
        assert_eq!(hermite_monic(1).0, vec![0.0, 1.0]);
        assert_eq!(hermite_monic(2).0, vec![-1.0, 0.0, 1.0]);
        assert_eq!(hermite_monic(3).0, vec![0.0, -3.0, 0.0, 1.0]);
    }

    #[test]
    fn parity() {
        for k in 0..12 {
            let h = hermite_monic(k);
            assert!(h.is_monic_of_degree(k));
            for (i, c) in h.0.iter().enumerate() {
                if (i + k) % 2 == 1 {
                    assert_eq!(*c, 0.0);
                }
            }
        }
    }
}
