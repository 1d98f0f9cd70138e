//! Model parameters: spatial dimension, internal components, and the
//! propagator exponent that tunes the scaling dimension of the field.

use crate::error::RgError;

/// Parameters of the model: dimension `d`, number of internal components
/// `n_comp` (even, not 8), and the propagator exponent `eps`.
///
/// The scaling dimension of the field is `[psi] = d/4 - eps/2`; the model
/// range `0 <= eps < d/6` keeps the quartic coupling the only marginal or
/// relevant non-quadratic invariant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d: usize,
    n_comp: usize,
    eps: f64,
}

impl ModelParams {
    pub fn new(d: usize, n_comp: usize, eps: f64) -> Result<Self, RgError> {
        if !(1..=3).contains(&d) {
            return Err(RgError::Domain(format!("dimension d = {d} outside 1..=3")));
        }
        if n_comp == 0 || n_comp % 2 != 0 {
            return Err(RgError::Domain(format!(
                "internal components N = {n_comp} must be a positive even integer"
            )));
        }
        if n_comp == 8 {
            return Err(RgError::Domain(
                "N = 8 is excluded (the quartic beta coefficient vanishes)".into(),
            ));
        }
        if !eps.is_finite() || eps < 0.0 || eps >= d as f64 / 6.0 {
            return Err(RgError::Domain(format!(
                "eps = {eps} outside the model range [0, d/6) = [0, {})",
                d as f64 / 6.0
            )));
        }
        Ok(Self { d, n_comp, eps })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Scaling dimension `[psi] = d/4 - eps/2`.
    pub fn psi_dim(&self) -> f64 {
        self.d as f64 / 4.0 - self.eps / 2.0
    }

    /// Dilation eigenvalue of the local quadratic invariant, `d - 2[psi]`.
    pub fn quadratic_eigenvalue(&self) -> f64 {
        self.d as f64 - 2.0 * self.psi_dim()
    }

    /// Dilation eigenvalue of the local quartic invariant, `d - 4[psi] = 2 eps`.
    pub fn quartic_eigenvalue(&self) -> f64 {
        2.0 * self.eps
    }
}

/// Entry of the antisymmetric block-diagonal pairing matrix: `omega(2k, 2k+1) = 1`,
/// `omega(2k+1, 2k) = -1` (0-based indices), zero elsewhere.
pub fn omega(a: usize, b: usize) -> f64 {
    if a / 2 == b / 2 {
        if a + 1 == b && a % 2 == 0 {
            1.0
        } else if b + 1 == a && b % 2 == 0 {
            -1.0
        } else {
            0.0
        }
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(3, 2, 0.0).is_ok());
        assert!(ModelParams::new(3, 2, 0.49).is_ok());
        assert!(ModelParams::new(3, 2, 0.5).is_err()); // d/6 = 0.5
        assert!(ModelParams::new(3, 8, 0.01).is_err());
        assert!(ModelParams::new(3, 3, 0.01).is_err());
        assert!(ModelParams::new(4, 2, 0.01).is_err());
        assert!(ModelParams::new(1, 2, -0.1).is_err());
    }

    #[test]
    fn psi_dim_positive_on_range() {
        for d in 1..=3 {
            for k in 0..10 {
                let eps = (d as f64 / 6.0) * k as f64 / 10.0;
                let p = ModelParams::new(d, 4, eps).unwrap();
                assert!(p.psi_dim() > 0.0);
                assert!((p.quartic_eigenvalue() - 2.0 * eps).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn omega_antisymmetric() {
        for n in [2usize, 4, 6, 10] {
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(omega(a, b), -omega(b, a));
                }
            }
            // omega squares to -identity
            for a in 0..n {
                for c in 0..n {
                    let s: f64 = (0..n).map(|b| omega(a, b) * omega(b, c)).sum();
                    let expect = if a == c { -1.0 } else { 0.0 };
                    assert_eq!(s, expect);
                }
            }
        }
    }
}
