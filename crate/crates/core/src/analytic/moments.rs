//! Moments of the single-antenna received SNR under Rayleigh fading.
//!
//! The SNR with instantaneous-optimal phases is `γ̄((γ₁ + γ₂)² + γ₃)` with
//! `γ₁ = |h_UB|`, `γ₂ = Σ_{reflecting} |h_RB,i||h_UR,i|` and
//! `γ₃ = ‖A h_UR‖²`. Parameters here are *amplitudes*: the link gains are
//! `α²`, `β²`, `γ²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SisoMomentInputs {
    pub n_total: usize,
    pub a: usize,
    /// UE–RDARS amplitude.
    pub alpha: f64,
    /// RDARS–BS amplitude.
    pub beta: f64,
    /// UE–BS amplitude.
    pub gamma: f64,
    /// `P/σ²`, linear.
    pub transmit_snr: f64,
}

impl SisoMomentInputs {
    pub fn new(
        n_total: usize,
        a: usize,
        alpha: f64,
        beta: f64,
        gamma: f64,
        transmit_snr: f64,
    ) -> Result<Self> {
        let s = Self {
            n_total,
            a,
            alpha,
            beta,
            gamma,
            transmit_snr,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds the inputs from linear power gains.
    pub fn from_gains(
        n_total: usize,
        a: usize,
        alpha_gain: f64,
        beta_gain: f64,
        gamma_gain: f64,
        transmit_snr: f64,
    ) -> Result<Self> {
        Self::new(
            n_total,
            a,
            alpha_gain.sqrt(),
            beta_gain.sqrt(),
            gamma_gain.sqrt(),
            transmit_snr,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.a > self.n_total {
            return Err(domain(format!(
                "a = {} exceeds N = {}",
                self.a, self.n_total
            )));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("transmit_snr", self.transmit_snr),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Number of reflecting elements.
    pub fn reflecting(&self) -> usize {
        self.n_total - self.a
    }
}

/// First and second raw moments of the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrMoments {
    pub mean: f64,
    pub second: f64,
}

impl SnrMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// `E|z|^k / σ^k` for `z ~ CN(0, σ²)`, i.e. `Γ(1 + k/2)`.
pub fn rayleigh_abs_moment(k: u32) -> f64 {
    // Γ(1 + k/2) by the half-integer recurrence
    let mut v = if k.is_multiple_of(2) {
        1.0
    } else {
        PI.sqrt() / 2.0
    };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 1.5 };
    let target = 1.0 + k as f64 / 2.0;
    while x < target - 0.25 {
        v *= x;
        x += 1.0;
    }
    v
}

/// Moments 1–4 of `|h_UB|` for `h_UB ~ CN(0, γ²)`.
pub fn gamma1_moments(gamma: f64) -> [f64; 4] {
    let sp = PI.sqrt();
    [
        0.5 * sp * gamma,
        gamma.powi(2),
        0.75 * sp * gamma.powi(3),
        2.0 * gamma.powi(4),
    ]
}

/// Third-moment constant of a sum of `m` i.i.d. unit-amplitude
/// double-Rayleigh products.
pub fn c3(m: usize) -> f64 {
    let m = m as f64;
    m * 9.0 / 16.0 * PI
        + 3.0 * m * (m - 1.0) * PI / 4.0
        + m * (m - 1.0) * (m - 2.0) * PI.powi(3) / 64.0
}

/// Fourth-moment constant, the companion of [`c3`].
pub fn c4(m: usize) -> f64 {
    let m = m as f64;
    4.0 * m
        + 9.0 / 16.0 * m * (m - 1.0) * PI * PI
        + 3.0 * m * (m - 1.0)
        + 6.0 * m * (m - 1.0) * (m - 2.0) * PI * PI / 16.0
        + m * (m - 1.0) * (m - 2.0) * (m - 3.0) * PI.powi(4) / 256.0
}

/// `E[(Σ_{i<m} x_i)^k]` for i.i.d. `x_i` with raw moments `mu[j-1] = E[x^j]`,
/// summed explicitly over the integer partitions of `k`.
pub fn power_sum_moment(m: usize, k: usize, mu: &[f64]) -> f64 {
    fn partitions(k: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=k.min(max)).rev() {
            prefix.push(part);
            partitions(k - part, part, prefix, out);
            prefix.pop();
        }
    }
    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    let mut parts = Vec::new();
    partitions(k, k, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .filter(|p| p.len() <= m)
        .map(|p| {
            // ordered index tuples realising this block pattern
            let falling: f64 = (0..p.len()).map(|j| (m - j) as f64).product();
            let mut multiplicity = 1.0;
            let mut run = 1;
            for w in p.windows(2) {
                if w[0] == w[1] {
                    run += 1;
                } else {
                    multiplicity *= factorial(run);
                    run = 1;
                }
            }
            multiplicity *= factorial(run);
            let arrangements =
                factorial(k) / p.iter().map(|&x| factorial(x)).product::<f64>() / multiplicity;
            let moments: f64 = p.iter().map(|&x| mu[x - 1]).product();
            falling * arrangements * moments
        })
        .sum()
}

/// [`c3`] from the partition sum.
pub fn c3_combinatorial(m: usize) -> f64 {
    power_sum_moment(m, 3, &double_rayleigh_moments())
}

/// [`c4`] from the partition sum.
pub fn c4_combinatorial(m: usize) -> f64 {
    power_sum_moment(m, 4, &double_rayleigh_moments())
}

/// Raw moments 1–4 of `|u||v|` with `u, v ~ CN(0, 1)` independent.
fn double_rayleigh_moments() -> [f64; 4] {
    [1, 2, 3, 4].map(|k| rayleigh_abs_moment(k).powi(2))
}

/// Moments 1–4 of the coherent reflection sum.
pub fn gamma2_moments(n: usize, a: usize, alpha: f64, beta: f64) -> Result<[f64; 4]> {
    if a > n {
        return Err(domain(format!("a = {a} exceeds N = {n}")));
    }
    let m = n - a;
    let mf = m as f64;
    let ab = alpha * beta;
    Ok([
        mf * PI / 4.0 * ab,
        mf * (1.0 + PI * PI / 16.0 * (mf - 1.0)) * ab * ab,
        c3(m) * ab.powi(3),
        c4(m) * ab.powi(4),
    ])
}

/// Moments 1–2 of the distribution gain, a `Γ(a, α²)` variable.
pub fn gamma3_moments(a: usize, alpha: f64) -> [f64; 2] {
    let af = a as f64;
    let g = alpha * alpha;
    [af * g, af * (af + 1.0) * g * g]
}

/// Mean and second moment in expanded polynomial form.
///
/// The mean is the printed expansion in `N` and `a`. The second moment is
/// the printed expansion with its `C₃` term read as `2√π C₃ γ α³β³`, the
/// only reading consistent with the building-block moments.
pub fn snr_moments_siso(inputs: &SisoMomentInputs) -> Result<SnrMoments> {
    inputs.validate()?;
    let SisoMomentInputs {
        n_total,
        a,
        alpha,
        beta,
        gamma,
        transmit_snr: t,
    } = *inputs;
    let n = n_total as f64;
    let af = a as f64;
    let m = n - af;
    let sp = PI.sqrt();
    let pi2 = PI * PI;
    let ab2 = alpha * alpha * beta * beta;

    let mean = t
        * (n * n * pi2 / 16.0 * ab2
            + ab2 * (n * (1.0 - pi2 / 8.0 * af - pi2 / 16.0) + pi2 / 16.0 * af * (af + 1.0) - af)
            + alpha * beta * gamma * (PI / 4.0 * sp * m)
            + af * alpha * alpha
            + gamma * gamma);

    let g2 = m * (1.0 + pi2 / 16.0 * (m - 1.0));
    let second = t
        * t
        * (2.0 * gamma.powi(4)
            + 6.0 * g2 * gamma * gamma * ab2
            + 0.75 * PI * sp * m * gamma.powi(3) * alpha * beta
            + c4(n_total - a) * ab2 * ab2
            + 2.0 * sp * c3(n_total - a) * gamma * (alpha * beta).powi(3)
            + 2.0 * af * gamma * gamma * alpha * alpha
            + 2.0 * g2 * af * alpha.powi(4) * beta * beta
            + 0.5 * PI * sp * m * af * alpha.powi(3) * gamma * beta
            + af * (af + 1.0) * alpha.powi(4));

    Ok(SnrMoments { mean, second })
}

/// Same moments assembled from the γ₁/γ₂/γ₃ building blocks and
/// independence.
pub fn snr_moments_composed(inputs: &SisoMomentInputs) -> Result<SnrMoments> {
    inputs.validate()?;
    let g1 = gamma1_moments(inputs.gamma);
    let g2 = gamma2_moments(inputs.n_total, inputs.a, inputs.alpha, inputs.beta)?;
    let g3 = gamma3_moments(inputs.a, inputs.alpha);
    let t = inputs.transmit_snr;

    // E[(γ₁+γ₂)^k] by the binomial expansion
    let m = |k: usize| -> f64 {
        let mom = |v: &[f64; 4], j: usize| if j == 0 { 1.0 } else { v[j - 1] };
        (0..=k)
            .map(|j| binom(k, j) * mom(&g1, j) * mom(&g2, k - j))
            .sum()
    };
    let s2 = m(2);
    let s4 = m(4);
    Ok(SnrMoments {
        mean: t * (s2 + g3[0]),
        second: t * t * (s4 + 2.0 * s2 * g3[0] + g3[1]),
    })
}

/// Literal transcription of the published second-moment expansion,
/// including its `2√π C₃ γ³β³γ` term. Kept to reproduce curves drawn from
/// the printed formula; [`snr_moments_siso`] is the consistent form.
pub fn snr_moments_siso_as_printed(inputs: &SisoMomentInputs) -> Result<SnrMoments> {
    let fixed = snr_moments_siso(inputs)?;
    let t = inputs.transmit_snr;
    let c3v = c3(inputs.reflecting());
    let sp = PI.sqrt();
    let consistent = 2.0 * sp * c3v * inputs.gamma * (inputs.alpha * inputs.beta).powi(3);
    let printed = 2.0 * sp * c3v * inputs.gamma.powi(3) * inputs.beta.powi(3) * inputs.gamma;
    Ok(SnrMoments {
        mean: fixed.mean,
        second: fixed.second + t * t * (printed - consistent),
    })
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn gamma1_values() {
        let m = gamma1_moments(1.0);
        let want = [0.8862, 1.0, 1.3293, 2.0];
        for (x, w) in m.iter().zip(want) {
            assert!((x - w).abs() < 5e-5);
        }
        let m = gamma1_moments(2.0);
        assert_eq!(m[1], 4.0);
        assert_eq!(m[3], 32.0);
    }

    #[test]
    fn gamma2_edge_cases() {
        assert_eq!(gamma2_moments(5, 5, 0.3, 0.4).unwrap(), [0.0; 4]);
        let m = gamma2_moments(3, 2, 1.0, 1.0).unwrap();
        let want = [PI / 4.0, 1.0, 9.0 * PI / 16.0, 4.0];
        for (x, w) in m.iter().zip(want) {
            assert!(close(*x, w, 1e-15));
        }
        assert!(gamma2_moments(2, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn gamma3_values() {
        assert_eq!(gamma3_moments(0, 0.7), [0.0, 0.0]);
        assert_eq!(gamma3_moments(1, 1.0), [1.0, 2.0]);
    }

    #[test]
    fn rayleigh_moments_table() {
        assert!(close(rayleigh_abs_moment(1), PI.sqrt() / 2.0, 1e-15));
        assert_eq!(rayleigh_abs_moment(2), 1.0);
        assert!(close(rayleigh_abs_moment(3), 0.75 * PI.sqrt(), 1e-15));
        assert_eq!(rayleigh_abs_moment(4), 2.0);
        assert_eq!(rayleigh_abs_moment(6), 6.0);
    }

    #[test]
    fn closed_constants_match_partition_sums() {
        for m in 1..=64 {
            assert!(close(c3(m), c3_combinatorial(m), 1e-12), "C3 at {m}");
            assert!(close(c4(m), c4_combinatorial(m), 1e-12), "C4 at {m}");
        }
        assert_eq!(c3(0), 0.0);
        assert_eq!(c4(0), 0.0);
    }

    #[test]
    fn power_sum_first_two_moments() {
        let mu = [0.5, 0.7, 1.1, 2.0];
        // E[S] = m μ₁, E[S²] = m μ₂ + m(m−1) μ₁²
        assert!(close(power_sum_moment(6, 1, &mu), 3.0, 1e-15));
        assert!(close(
            power_sum_moment(6, 2, &mu),
            6.0 * 0.7 + 30.0 * 0.25,
            1e-15
        ));
    }

    #[test]
    fn all_connected_mean_reduces() {
        let i = SisoMomentInputs::new(6, 6, 0.3, 0.2, 0.5, 10.0).unwrap();
        let m = snr_moments_siso(&i).unwrap();
        let want = 10.0 * (0.25 + 6.0 * 0.09);
        assert!(close(m.mean, want, 1e-13));
        let c = snr_moments_composed(&i).unwrap();
        assert!(close(m.second, c.second, 1e-13));
    }

    #[test]
    fn no_connected_mean_matches_ris_expression() {
        let (n, al, be, ga, t) = (40usize, 0.3, 0.2, 0.5, 7.0);
        let i = SisoMomentInputs::new(n, 0, al, be, ga, t).unwrap();
        let nf = n as f64;
        let ris = t
            * (ga * ga
                + nf * PI / 4.0 * PI.sqrt() * ga * al * be
                + nf * (1.0 + PI * PI / 16.0 * (nf - 1.0)) * al * al * be * be);
        assert!(close(snr_moments_siso(&i).unwrap().mean, ris, 1e-13));
    }

    #[test]
    fn printed_form_differs_only_in_second_moment() {
        let i = SisoMomentInputs::new(30, 2, 0.3, 0.2, 0.5, 7.0).unwrap();
        let a = snr_moments_siso(&i).unwrap();
        let b = snr_moments_siso_as_printed(&i).unwrap();
        assert_eq!(a.mean, b.mean);
        assert!(a.second != b.second);
    }

    proptest::proptest! {
        #[test]
        fn expanded_and_composed_forms_agree(
            n in 0usize..3000, a_frac in 0.0f64..1.0,
            la in -8.0f64..0.0, lb in -8.0f64..0.0, lg in -8.0f64..0.0, lt in 0.0f64..12.0,
        ) {
            let a = ((n as f64) * a_frac) as usize;
            let i = SisoMomentInputs::new(
                n, a, 10f64.powf(la / 2.0), 10f64.powf(lb / 2.0), 10f64.powf(lg / 2.0), 10f64.powf(lt),
            ).unwrap();
            let x = snr_moments_siso(&i).unwrap();
            let y = snr_moments_composed(&i).unwrap();
            proptest::prop_assert!(close(x.mean, y.mean, 1e-10), "{} vs {}", x.mean, y.mean);
            proptest::prop_assert!(close(x.second, y.second, 1e-10), "{} vs {}", x.second, y.second);
            proptest::prop_assert!(x.variance() > 0.0);
        }
    }
}
