//! Mean-SNR comparison between RDARS, RIS and DAS, and the Jensen bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::moments::{snr_moments_siso, SisoMomentInputs};
use crate::error::{domain, Result};

/// `log₂(1 + E[γ_s])`, an upper bound on the single-antenna ergodic rate.
pub fn rate_upper_bound_siso(inputs: &SisoMomentInputs) -> Result<f64> {
    Ok(snr_moments_siso(inputs)?.mean.log2_1p())
}

/// The bound as typeset, with `a²` where the mean has `a` and
/// `a² + a − 1` where the mean has `a(a + 1)`. At `a = 1` its SNR argument
/// falls short by only `γ̄ π²α²β²/16`; for larger `a` the gap grows with `N`.
pub fn rate_upper_bound_siso_as_printed(inputs: &SisoMomentInputs) -> Result<f64> {
    inputs.validate()?;
    let n = inputs.n_total as f64;
    let a = inputs.a as f64;
    let (al, be, ga) = (inputs.alpha, inputs.beta, inputs.gamma);
    let pi2 = PI * PI;
    let ab2 = al * al * be * be;
    let inner = n * n * pi2 / 16.0 * ab2
        + ab2 * (n * (1.0 - pi2 / 8.0 * a * a - pi2 / 16.0) + pi2 / 16.0 * (a * a + a - 1.0) - a)
        + al * be * ga * (PI / 4.0 * PI.sqrt() * (n - a))
        + a * al * al
        + ga * ga;
    Ok((inputs.transmit_snr * inner).log2_1p())
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

/// Mean received SNR of each architecture under identical channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSnrs {
    pub rdars: f64,
    pub ris: f64,
    pub das: f64,
    pub direct_only: f64,
}

/// RIS keeps all `N` elements reflecting; DAS keeps only the `a` remote
/// antennas; `direct_only` has no surface at all.
pub fn mean_snrs(inputs: &SisoMomentInputs) -> Result<MeanSnrs> {
    inputs.validate()?;
    let SisoMomentInputs {
        n_total,
        a,
        alpha,
        beta,
        gamma,
        transmit_snr: t,
    } = *inputs;
    let reflect = |m: f64| {
        m * PI / 4.0 * PI.sqrt() * gamma * alpha * beta
            + m * (1.0 + PI * PI / 16.0 * (m - 1.0)) * alpha * alpha * beta * beta
    };
    let g2 = gamma * gamma;
    let af = a as f64;
    Ok(MeanSnrs {
        rdars: t * (g2 + reflect((n_total - a) as f64) + af * alpha * alpha),
        ris: t * (g2 + reflect(n_total as f64)),
        das: t * (g2 + af * alpha * alpha),
        direct_only: t * g2,
    })
}

/// The `N` beyond which a plain RIS overtakes an RDARS with `a` connected
/// elements in mean SNR. May be negative, meaning RIS is ahead for all `N`.
pub fn ris_crossover_n(a: usize, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    if a == 0 {
        return Err(domain("crossover needs at least one connected element"));
    }
    let af = a as f64;
    Ok(
        8.0 / (PI * PI) * (1.0 / (beta * beta) - 1.0) + (af + 1.0) / 2.0
            - 2.0 * PI.sqrt() / PI * gamma / (alpha * beta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_equals_log_of_mean() {
        let i = SisoMomentInputs::new(64, 3, 0.1, 0.2, 0.05, 1e3).unwrap();
        let m = snr_moments_siso(&i).unwrap().mean;
        assert!((rate_upper_bound_siso(&i).unwrap() - (1.0 + m).log2()).abs() < 1e-12);
    }

    #[test]
    fn printed_bound_offset() {
        let (al, be, ga, t) = (0.1, 0.2, 0.05, 1e3);
        let i = SisoMomentInputs::new(64, 1, al, be, ga, t).unwrap();
        let x = rate_upper_bound_siso(&i).unwrap().exp2() - 1.0;
        let y = rate_upper_bound_siso_as_printed(&i).unwrap().exp2() - 1.0;
        // a = 1: only the constant π²/16 (a² + a − 1 vs a(a + 1)) differs
        let want = t * PI * PI / 16.0 * al * al * be * be;
        assert!(((x - y) - want).abs() < 1e-9 * x);

        let i = SisoMomentInputs::new(64, 3, al, be, ga, t).unwrap();
        let x = rate_upper_bound_siso(&i).unwrap();
        let y = rate_upper_bound_siso_as_printed(&i).unwrap();
        assert!((x - y).abs() > 1e-3);
    }

    #[test]
    fn rdars_mean_is_moment_mean() {
        let i = SisoMomentInputs::new(100, 4, 0.1, 0.2, 0.05, 1e3).unwrap();
        let m = snr_moments_siso(&i).unwrap().mean;
        let s = mean_snrs(&i).unwrap();
        assert!((s.rdars - m).abs() < 1e-12 * m);
        assert!(s.das < s.rdars);
        assert!(s.direct_only < s.das);
    }

    #[test]
    fn crossover_has_equal_means() {
        let (a, al, be, ga) = (2usize, 0.01, 0.3, 0.002);
        let n = ris_crossover_n(a, al, be, ga).unwrap();
        assert!(n > 0.0);
        // the difference is affine in N, so evaluate it at two integers
        let diff = |nn: usize| {
            let s = mean_snrs(&SisoMomentInputs::new(nn, a, al, be, ga, 1.0).unwrap()).unwrap();
            s.rdars - s.ris
        };
        let (n0, n1) = (100usize, 200usize);
        let (d0, d1) = (diff(n0), diff(n1));
        let root = n0 as f64 - d0 * (n1 - n0) as f64 / (d1 - d0);
        assert!((root - n).abs() < 1e-6 * n, "{root} vs {n}");
    }

    #[test]
    fn crossover_rejects_bad_inputs() {
        assert!(ris_crossover_n(0, 0.1, 0.1, 0.1).is_err());
        assert!(ris_crossover_n(1, 0.0, 0.1, 0.1).is_err());
    }
}
