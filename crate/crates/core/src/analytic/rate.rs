//! Gamma moment matching and the ergodic rate of a Gamma-distributed SNR.

use serde::{Deserialize, Serialize};

use super::moments::SnrMoments;
use super::quadrature::{integrate_half_line, Tolerance};
use crate::error::{domain, Error, Result};

/// `Γ(k, p)` with shape `k` and scale `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaApprox {
    pub shape: f64,
    pub scale: f64,
}

impl GammaApprox {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(domain(format!(
                "gamma parameters must be positive and finite, got k = {shape}, p = {scale}"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn second_moment(&self) -> f64 {
        self.shape * (self.shape + 1.0) * self.scale * self.scale
    }
}

/// Matches a Gamma law to `E[X]` and `E[X²]`.
///
/// Fails with a domain error when `E[X²] ≤ E[X]²` (no spread).
pub fn gamma_match(m: &SnrMoments) -> Result<GammaApprox> {
    let var = m.second - m.mean * m.mean;
    if !(m.mean > 0.0) || !(var > 0.0) || !var.is_finite() {
        return Err(domain(format!(
            "moments E = {}, E2 = {} admit no gamma fit (variance {var})",
            m.mean, m.second
        )));
    }
    GammaApprox::new(m.mean * m.mean / var, var / m.mean)
}

/// `E[log₂(1 + X)]` for `X ~ Γ(k, p)`.
///
/// Uses `E ln(1+X) = ∫₀^∞ e^{-s} (1 − (1 + p s)^{-k}) / s ds`, which
/// has a smooth bounded integrand for every `k, p > 0`.
pub fn ergodic_rate_gamma(g: &GammaApprox) -> Result<f64> {
    let (k, p) = (g.shape, g.scale);
    let integrand = |s: f64| {
        if s == 0.0 {
            return k * p;
        }
        let one_minus = -(-k * (p * s).ln_1p()).exp_m1();
        (-s).exp() * one_minus / s
    };
    let r = integrate_half_line(integrand, Tolerance::default())?;
    let v = r.value / std::f64::consts::LN_2;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Numeric {
            context: "ergodic_rate_gamma",
            detail: format!("rate {v} for k = {k}, p = {p}"),
        });
    }
    Ok(v)
}

/// Moment match followed by [`ergodic_rate_gamma`].
pub fn ergodic_rate_from_moments(m: &SnrMoments) -> Result<f64> {
    ergodic_rate_gamma(&gamma_match(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_parameters() {
        let g = gamma_match(&SnrMoments {
            mean: 2.0,
            second: 6.0,
        })
        .unwrap();
        assert!((g.shape - 2.0).abs() < 1e-14);
        assert!((g.scale - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fit_rejects_degenerate() {
        for (m, s) in [(2.0, 4.0), (2.0, 3.0), (0.0, 1.0)] {
            let r = gamma_match(&SnrMoments { mean: m, second: s });
            assert!(matches!(r, Err(Error::Domain(_))));
        }
    }

    #[test]
    fn exponential_case_matches_closed_form() {
        // k = 1: E ln(1+X) = e^{1/p} E₁(1/p); at p = 1 this is 0.596347362323194
        let r = ergodic_rate_gamma(&GammaApprox::new(1.0, 1.0).unwrap()).unwrap();
        assert!((r * std::f64::consts::LN_2 - 0.596_347_362_323_194_1).abs() < 1e-10);
    }

    #[test]
    fn tiny_scale_is_linear() {
        let g = GammaApprox::new(3.0, 1e-6).unwrap();
        let r = ergodic_rate_gamma(&g).unwrap();
        let approx = (g.mean() - 0.5 * g.second_moment()) / std::f64::consts::LN_2;
        assert!((r - approx).abs() / approx < 1e-6);
    }

    #[test]
    fn below_jensen_bound() {
        for &(k, p) in &[(0.3, 20.0), (5.0, 0.1), (100.0, 3.0), (2.0, 1e6)] {
            let g = GammaApprox::new(k, p).unwrap();
            let r = ergodic_rate_gamma(&g).unwrap();
            assert!(r < (1.0 + g.mean()).log2());
            assert!(r > 0.0);
        }
    }
}
