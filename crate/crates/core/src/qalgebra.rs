//! Scalar q-deformation primitives.
//!
//! A deformation parameter is stored through its logarithm `gamma = ln q`,
//! so values with `|gamma|` in the hundreds stay representable; `q` itself is
//! only formed on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParam {
    gamma: f64,
}

impl QParam {
    pub const ONE: QParam = QParam { gamma: 0.0 };

    pub fn from_gamma(gamma: f64) -> Self {
        QParam { gamma }
    }

    /// Panics if `q` is not a positive finite number.
    pub fn from_q(q: f64) -> Self {
        assert!(q > 0.0 && q.is_finite(), "q must be positive and finite, got {q}");
        QParam { gamma: q.ln() }
    }

    pub fn gamma(self) -> f64 {
        self.gamma
    }

    pub fn q(self) -> f64 {
        self.gamma.exp()
    }

    /// `q -> 1/q`.
    pub fn inverse(self) -> Self {
        QParam { gamma: -self.gamma }
    }

    /// `[2]_q = q + 1/q = 2 cosh(gamma)`.
    pub fn two(self) -> f64 {
        2.0 * self.gamma.cosh()
    }

    /// `q - 1/q = 2 sinh(gamma)`.
    pub fn q_minus_inv(self) -> f64 {
        2.0 * self.gamma.sinh()
    }
}

/// The quantum dimension `[x]_q = (q^x - q^-x) / (q - q^-1)`, equal to
/// `sinh(x gamma) / sinh(gamma)`, with the value `x` at `q = 1`.
pub fn quantum_dimension(x: f64, q: QParam) -> f64 {
    let g = q.gamma;
    if g == 0.0 {
        return x;
    }
    (x * g).sinh() / g.sinh()
}

/// Deformation parameter with `sinh(gamma) = ratio`, where `ratio` is `h/J`
/// (or its renormalized counterpart).
pub fn q_from_ratio(ratio: f64) -> Result<QParam> {
    if !ratio.is_finite() {
        return Err(Error::invalid(format!("ratio must be finite, got {ratio}")));
    }
    Ok(QParam { gamma: ratio.asinh() })
}

/// Amplitudes `(a_updown, a_downup)` of the q-singlet
/// `(q^{-1/2} |↑↓> - q^{1/2} |↓↑>) / sqrt([2]_q)`.
pub fn singlet_amplitudes(q: QParam) -> (f64, f64) {
    // q^{-1/2}/sqrt(q + 1/q) = 1/sqrt(1 + q^2), likewise for the other leg.
    let g2 = 2.0 * q.gamma;
    let up_down = 1.0 / (1.0 + g2.exp()).sqrt();
    let down_up = -1.0 / (1.0 + (-g2).exp()).sqrt();
    (up_down, down_up)
}

/// Reduced-density-matrix weights `(1/(1+q^2), q^2/(1+q^2))` of one pair,
/// i.e. the probabilities of the left spin pointing up and down.
pub fn pair_probabilities(q: QParam) -> (f64, f64) {
    let (a, b) = singlet_amplitudes(q);
    (a * a, b * b)
}

/// Von Neumann entropy `ln(1+q^2) - q^2 ln(q^2) / (1+q^2)` of one pair,
/// evaluated without forming `q^2`.
pub fn pair_entropy(q: QParam) -> f64 {
    let t = 2.0 * q.gamma.abs();
    // small probability p = 1/(1+e^t); -ln p = t + ln(1+e^-t); -ln(1-p) = ln(1+e^-t)
    let e = (-t).exp();
    let l = e.ln_1p();
    let p = e / (1.0 + e);
    p * (t + l) + (1.0 - p) * l
}

/// Renyi entropy of order `alpha` of one pair,
/// `ln[(1 + q^{2 alpha}) / (1 + q^2)^alpha] / (1 - alpha)`.
pub fn pair_renyi(q: QParam, alpha: f64) -> f64 {
    let (p, r) = pair_probabilities(q);
    (p.powf(alpha) + r.powf(alpha)).ln() / (1.0 - alpha)
}

/// Smallest `|gamma|` whose pair entropy equals `s`, by bisection. The pair
/// entropy decreases monotonically in `|gamma|` from `ln 2` to `0`.
pub fn gamma_for_pair_entropy(s: f64) -> Result<f64> {
    let ln2 = std::f64::consts::LN_2;
    if !(s > 0.0 && s <= ln2 + 1e-15) {
        return Err(Error::invalid(format!("pair entropy must lie in (0, ln 2], got {s}")));
    }
    if s >= ln2 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while pair_entropy(QParam::from_gamma(hi)) > s {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::NumericRange {
                pair: 0,
                detail: format!("entropy target {s} requires |gamma| > 1e3"),
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pair_entropy(QParam::from_gamma(mid)) > s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn quantum_dimension_examples() {
        assert_eq!(quantum_dimension(2.0, QParam::ONE), 2.0);
        assert_abs_diff_eq!(quantum_dimension(2.0, QParam::from_q(2.0)), 2.5, epsilon = 1e-14);
        let q = 1.0 + SQRT2;
        // [2]_q = q + 1/q by direct expansion of the definition
        let direct = (q * q - 1.0 / (q * q)) / (q - 1.0 / q);
        assert_abs_diff_eq!(quantum_dimension(2.0, QParam::from_q(q)), direct, epsilon = 1e-13);
        assert_abs_diff_eq!(quantum_dimension(2.0, QParam::from_q(q)), 2.0 * SQRT2, epsilon = 1e-13);
    }

    #[test]
    fn quantum_dimension_continuous_at_one() {
        for x in [0.5, 2.0, 3.0, 7.5] {
            let v = quantum_dimension(x, QParam::from_q(1.0 + 1e-8));
            assert!((v - x).abs() < 1e-6, "x={x}: {v}");
        }
    }

    #[test]
    fn q_from_ratio_examples() {
        assert_eq!(q_from_ratio(0.0).unwrap().q(), 1.0);
        assert_abs_diff_eq!(q_from_ratio(1.0).unwrap().q(), 1.0 + SQRT2, epsilon = 1e-14);
        assert_abs_diff_eq!(q_from_ratio(-1.0).unwrap().q(), SQRT2 - 1.0, epsilon = 1e-14);
        assert!(q_from_ratio(f64::NAN).is_err());
        assert!(q_from_ratio(f64::INFINITY).is_err());
    }

    #[test]
    fn q_from_ratio_large_negative() {
        // ln(r + sqrt(r^2+1)) would cancel catastrophically here
        let g = q_from_ratio(-1e8).unwrap().gamma();
        assert_abs_diff_eq!(g, -(2e8_f64).ln(), epsilon = 1e-12);
        assert_eq!(q_from_ratio(-3.0).unwrap().gamma(), -q_from_ratio(3.0).unwrap().gamma());
    }

    #[test]
    fn singlet_amplitude_examples() {
        let (a, b) = singlet_amplitudes(QParam::ONE);
        assert_abs_diff_eq!(a, 1.0 / SQRT2, epsilon = 1e-15);
        assert_abs_diff_eq!(b, -1.0 / SQRT2, epsilon = 1e-15);

        let (a, b) = singlet_amplitudes(QParam::from_gamma(1e3));
        assert_eq!(a, 0.0);
        assert_eq!(b, -1.0);

        let q = 1.0 + SQRT2;
        let norm = (q.powf(-1.0) + q).sqrt();
        let (a, b) = singlet_amplitudes(QParam::from_q(q));
        assert_abs_diff_eq!(a, q.powf(-0.5) / norm, epsilon = 1e-14);
        assert_abs_diff_eq!(b, -q.sqrt() / norm, epsilon = 1e-14);
        assert!((a - 0.383).abs() < 1e-3 && (b + 0.924).abs() < 1e-3);
    }

    #[test]
    fn pair_entropy_closed_form() {
        let q: f64 = 1.0 + SQRT2;
        let q2 = q * q;
        let expect = (1.0 + q2).ln() - q2 * q2.ln() / (1.0 + q2);
        assert_abs_diff_eq!(pair_entropy(QParam::from_q(q)), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(pair_entropy(QParam::ONE), std::f64::consts::LN_2, epsilon = 1e-15);
        assert!((expect - 0.4165).abs() < 1e-4);
    }

    #[test]
    fn pair_renyi_closed_form() {
        let q: f64 = 1.7;
        for alpha in [0.5, 2.0, 3.0] {
            let expect = ((1.0 + q.powf(2.0 * alpha)) / (1.0 + q * q).powf(alpha)).ln() / (1.0 - alpha);
            assert_abs_diff_eq!(pair_renyi(QParam::from_q(q), alpha), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn entropy_inversion() {
        assert_eq!(gamma_for_pair_entropy(std::f64::consts::LN_2).unwrap(), 0.0);
        assert!(gamma_for_pair_entropy(0.0).is_err());
        assert!(gamma_for_pair_entropy(0.7).is_err());
        for s in [1e-6, 0.1, 0.2, 0.5, 0.6, 0.69] {
            let g = gamma_for_pair_entropy(s).unwrap();
            assert_abs_diff_eq!(pair_entropy(QParam::from_gamma(g)), s, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn amplitudes_normalized(lq in -6.0f64..6.0) {
            let q = QParam::from_q(10f64.powf(lq));
            let (a, b) = singlet_amplitudes(q);
            prop_assert!((a * a + b * b - 1.0).abs() < 1e-12);
        }

        #[test]
        fn amplitudes_dual_under_inversion(g in -20.0f64..20.0) {
            let (a, b) = singlet_amplitudes(QParam::from_gamma(g));
            let (c, d) = singlet_amplitudes(QParam::from_gamma(g).inverse());
            prop_assert!((a.abs() - d.abs()).abs() < 1e-14);
            prop_assert!((b.abs() - c.abs()).abs() < 1e-14);
        }

        #[test]
        fn q_is_exp_gamma(r in -1e3f64..1e3) {
            let q = q_from_ratio(r).unwrap();
            prop_assert!(q.q() > 0.0);
            prop_assert_eq!(q.q(), q.gamma().exp());
            prop_assert_eq!(q_from_ratio(-r).unwrap().gamma(), -q.gamma());
        }
    }
}
