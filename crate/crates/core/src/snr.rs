//! Instantaneous received SNR and MRC rate for one channel realization.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, C64};
use crate::error::{domain, Result};
use crate::rdars::RdarsConfiguration;

/// Linear noise powers at the BS antennas and at connected elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_b_sq: f64,
    pub sigma_r_sq: f64,
}

impl NoiseModel {
    pub fn new(sigma_b_sq: f64, sigma_r_sq: f64) -> Result<Self> {
        if !(sigma_b_sq > 0.0 && sigma_r_sq > 0.0) {
            return Err(domain("noise powers must be positive"));
        }
        Ok(Self {
            sigma_b_sq,
            sigma_r_sq,
        })
    }

    pub fn equal(sigma_sq: f64) -> Result<Self> {
        Self::new(sigma_sq, sigma_sq)
    }
}

/// Received SNR split into the coherent reflected/direct part and the
/// part collected by connected elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrBreakdown {
    pub total: f64,
    pub reflection_gain: f64,
    pub distribution_gain: f64,
}

fn check_siso(real: &ChannelRealization, config: &RdarsConfiguration) -> Result<()> {
    if real.h_ue_bs.len() != 1 || real.h_rdars_bs.rows() != 1 {
        return Err(domain(format!(
            "single-antenna SNR needs L = 1, realization has L = {}",
            real.h_ue_bs.len()
        )));
    }
    if real.h_ue_rdars.len() != config.n_total() || real.h_rdars_bs.cols() != config.n_total() {
        return Err(domain("realization and configuration disagree on N"));
    }
    Ok(())
}

/// `γ̄·(|h_UB + h_RBᴴ B h_UR|² + h_URᴴ AᴴA h_UR)` for any phase assignment.
pub fn received_snr_siso(
    real: &ChannelRealization,
    config: &RdarsConfiguration,
    transmit_snr: f64,
) -> Result<SnrBreakdown> {
    check_siso(real, config)?;
    let b = config.effective_reflection();
    let h_rb = real.h_rb_siso();
    let cascade: C64 = h_rb
        .iter()
        .zip(&b)
        .zip(&real.h_ue_rdars)
        .map(|((rb, bi), ur)| rb.conj() * bi * ur)
        .sum();
    let reflection_gain = (real.h_ue_bs[0] + cascade).norm_sqr();
    let distribution_gain = distribution_gain(real, config);
    Ok(SnrBreakdown {
        total: transmit_snr * (reflection_gain + distribution_gain),
        reflection_gain,
        distribution_gain,
    })
}

/// Magnitude-sum form of the reflection gain,
/// `(|h_UB| + Σ_{reflecting} |h_RB,i||h_UR,i|)²`. Equals
/// [`received_snr_siso`] only when the phases are the instantaneous optimum.
pub fn received_snr_siso_aligned(
    real: &ChannelRealization,
    config: &RdarsConfiguration,
    transmit_snr: f64,
) -> Result<SnrBreakdown> {
    check_siso(real, config)?;
    let row = real.h_rdars_bs.row(0);
    let coherent: f64 = config
        .reflecting()
        .map(|i| row[i].norm() * real.h_ue_rdars[i].norm())
        .sum();
    let reflection_gain = (real.h_ue_bs[0].norm() + coherent).powi(2);
    let distribution_gain = distribution_gain(real, config);
    Ok(SnrBreakdown {
        total: transmit_snr * (reflection_gain + distribution_gain),
        reflection_gain,
        distribution_gain,
    })
}

fn distribution_gain(real: &ChannelRealization, config: &RdarsConfiguration) -> f64 {
    config
        .connected()
        .iter()
        .map(|&i| real.h_ue_rdars[i].norm_sqr())
        .sum()
}

/// Stacked effective channel `[H B h + d ; A h]` of length `L + a`.
pub fn composite_channel_simo(
    real: &ChannelRealization,
    config: &RdarsConfiguration,
) -> Result<Vec<C64>> {
    let l = real.h_ue_bs.len();
    let n = config.n_total();
    if real.h_rdars_bs.rows() != l || real.h_rdars_bs.cols() != n || real.h_ue_rdars.len() != n {
        return Err(domain(
            "realization dimensions do not match the configuration",
        ));
    }
    let bh: Vec<C64> = config
        .effective_reflection()
        .iter()
        .zip(&real.h_ue_rdars)
        .map(|(b, h)| b * h)
        .collect();
    let mut out = Vec::with_capacity(l + config.a());
    for r in 0..l {
        let reflected: C64 = real
            .h_rdars_bs
            .row(r)
            .iter()
            .zip(&bh)
            .map(|(x, y)| x * y)
            .sum();
        out.push(reflected + real.h_ue_bs[r]);
    }
    out.extend(config.connected().iter().map(|&i| real.h_ue_rdars[i]));
    Ok(out)
}

/// MRC output SNR `P‖h̃‖⁴ / h̃ᴴRh̃`; zero for a zero channel. The last `a`
/// entries of `h_tilde` see `σ_R²`, the rest `σ_B²`.
pub fn mrc_snr_simo(h_tilde: &[C64], p: f64, noise: &NoiseModel, a: usize) -> Result<f64> {
    if a > h_tilde.len() {
        return Err(domain(format!(
            "a = {a} exceeds the stacked channel length {}",
            h_tilde.len()
        )));
    }
    let split = h_tilde.len() - a;
    let bs: f64 = h_tilde[..split].iter().map(|x| x.norm_sqr()).sum();
    let remote: f64 = h_tilde[split..].iter().map(|x| x.norm_sqr()).sum();
    let energy = bs + remote;
    if energy == 0.0 {
        return Ok(0.0);
    }
    let quad = noise.sigma_b_sq * bs + noise.sigma_r_sq * remote;
    Ok(p * energy * energy / quad)
}

pub fn mrc_rate_simo(h_tilde: &[C64], p: f64, noise: &NoiseModel, a: usize) -> Result<f64> {
    Ok((1.0 + mrc_snr_simo(h_tilde, p, noise, a)?).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_rayleigh, CMatrix};
    use crate::rdars::optimal_phases_instantaneous;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn siso(h_ub: C64, h_rb: &[C64], h_ur: Vec<C64>) -> ChannelRealization {
        let row: Vec<C64> = h_rb.iter().map(|x| x.conj()).collect();
        ChannelRealization {
            h_rdars_bs: CMatrix::from_vec(1, row.len(), row).unwrap(),
            h_ue_rdars: h_ur,
            h_ue_bs: vec![h_ub],
        }
    }

    fn random_siso(rng: &mut ChaCha8Rng, n: usize) -> ChannelRealization {
        let h_rb = sample_rayleigh(rng, n, 0.7);
        let h_ur = sample_rayleigh(rng, n, 1.3);
        let h_ub = sample_rayleigh(rng, 1, 0.4)[0];
        siso(h_ub, &h_rb, h_ur)
    }

    #[test]
    fn single_reflecting_element() {
        let real = siso(c(0.0, 0.0), &[c(1.0, 0.0)], vec![c(1.0, 0.0)]);
        let cfg = RdarsConfiguration::first_connected(1, 0).unwrap();
        let s = received_snr_siso(&real, &cfg, 1.0).unwrap();
        assert_eq!(s.reflection_gain, 1.0);
        assert_eq!(s.distribution_gain, 0.0);
    }

    #[test]
    fn all_connected_collapses_to_das() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let real = random_siso(&mut rng, 6);
        let cfg = RdarsConfiguration::first_connected(6, 6).unwrap();
        let s = received_snr_siso(&real, &cfg, 2.0).unwrap();
        assert!((s.reflection_gain - real.h_ue_bs[0].norm_sqr()).abs() < 1e-15);
        let h2: f64 = real.h_ue_rdars.iter().map(|x| x.norm_sqr()).sum();
        assert!((s.distribution_gain - h2).abs() < 1e-14);
        assert!((s.total - 2.0 * (s.reflection_gain + s.distribution_gain)).abs() < 1e-14);
    }

    #[test]
    fn rejects_multi_antenna() {
        let real = ChannelRealization {
            h_rdars_bs: CMatrix::zeros(2, 3),
            h_ue_rdars: vec![c(0.0, 0.0); 3],
            h_ue_bs: vec![c(0.0, 0.0); 2],
        };
        let cfg = RdarsConfiguration::first_connected(3, 1).unwrap();
        assert!(received_snr_siso(&real, &cfg, 1.0).is_err());
    }

    #[test]
    fn cascade_form_matches_magnitude_form_under_optimal_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..50 {
            let n = 3 + trial % 20;
            let real = random_siso(&mut rng, n);
            let conn: BTreeSet<usize> = (0..n).filter(|i| i % 5 == 1).collect();
            let phases = optimal_phases_instantaneous(
                real.h_ue_bs[0],
                &real.h_rb_siso(),
                &real.h_ue_rdars,
                &conn,
            )
            .unwrap();
            let cfg = RdarsConfiguration::new(n, conn, phases).unwrap();
            let a = received_snr_siso(&real, &cfg, 3.0).unwrap();
            let b = received_snr_siso_aligned(&real, &cfg, 3.0).unwrap();
            assert!(((a.total - b.total) / b.total).abs() < 1e-12);
            assert!(((a.reflection_gain - b.reflection_gain) / b.reflection_gain).abs() < 1e-12);
            assert_eq!(a.distribution_gain, b.distribution_gain);
            let rel = (a.total - 3.0 * (a.reflection_gain + a.distribution_gain)) / a.total;
            assert!(rel.abs() < 1e-12);
        }
    }

    #[test]
    fn optimal_reflection_gain_dominates_random_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let n = 10;
            let real = random_siso(&mut rng, n);
            let conn: BTreeSet<usize> = [3].into_iter().collect();
            let phases = optimal_phases_instantaneous(
                real.h_ue_bs[0],
                &real.h_rb_siso(),
                &real.h_ue_rdars,
                &conn,
            )
            .unwrap();
            let cfg = RdarsConfiguration::new(n, conn, phases).unwrap();
            let best = received_snr_siso(&real, &cfg, 1.0).unwrap().reflection_gain;
            for _ in 0..10_000 {
                let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 7.0).collect();
                let other = received_snr_siso(&real, &cfg.with_phases(p).unwrap(), 1.0)
                    .unwrap()
                    .reflection_gain;
                assert!(other <= best * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn composite_without_connected_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (l, n) = (3, 4);
        let h = CMatrix::from_vec(l, n, sample_rayleigh(&mut rng, l * n, 1.0)).unwrap();
        let real = ChannelRealization {
            h_rdars_bs: h.clone(),
            h_ue_rdars: sample_rayleigh(&mut rng, n, 1.0),
            h_ue_bs: sample_rayleigh(&mut rng, l, 1.0),
        };
        let cfg = RdarsConfiguration::first_connected(n, 0).unwrap();
        let ht = composite_channel_simo(&real, &cfg).unwrap();
        assert_eq!(ht.len(), l);
        for r in 0..l {
            let want: C64 = (0..n)
                .map(|k| h.get(r, k) * real.h_ue_rdars[k])
                .sum::<C64>()
                + real.h_ue_bs[r];
            assert!((ht[r] - want).norm() < 1e-14);
        }

        let das = RdarsConfiguration::first_connected(n, n).unwrap();
        let ht = composite_channel_simo(&real, &das).unwrap();
        assert_eq!(&ht[..l], &real.h_ue_bs[..]);
        assert_eq!(&ht[l..], &real.h_ue_rdars[..]);
    }

    #[test]
    fn mrc_equal_noise_reduces_to_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = sample_rayleigh(&mut rng, 6, 1.0);
        let noise = NoiseModel::equal(0.5).unwrap();
        let e: f64 = h.iter().map(|x| x.norm_sqr()).sum();
        let r = mrc_rate_simo(&h, 2.0, &noise, 2).unwrap();
        assert!((r - (1.0 + 4.0 * e).log2()).abs() < 1e-13);
        assert_eq!(
            mrc_rate_simo(&[c(0.0, 0.0); 3], 1.0, &noise, 1).unwrap(),
            0.0
        );
    }

    #[test]
    fn mrc_unequal_noise_matches_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = sample_rayleigh(&mut rng, 7, 1.0);
        let noise = NoiseModel::new(0.3, 2.0).unwrap();
        let a = 3;
        // h̃ᴴ R h̃ with R = blk(σ_B² I, σ_R² I), written out entry by entry
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for (i, x) in h.iter().enumerate() {
            num += x.conj() * x;
            let r = if i < h.len() - a { 0.3 } else { 2.0 };
            den += x.conj() * r * x;
        }
        let want = (1.0 + 1.7 * num.re * num.re / den.re).log2();
        let got = mrc_rate_simo(&h, 1.7, &noise, a).unwrap();
        assert!(((got - want) / want).abs() < 1e-12);
    }

    #[test]
    fn mrc_matches_siso_for_single_antenna() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let real = random_siso(&mut rng, 9);
        let cfg = RdarsConfiguration::first_connected(9, 0)
            .unwrap()
            .with_phases((0..9).map(|i| i as f64 * 0.3).collect())
            .unwrap();
        let noise = NoiseModel::equal(0.25).unwrap();
        let ht = composite_channel_simo(&real, &cfg).unwrap();
        let r = mrc_rate_simo(&ht, 1.5, &noise, 0).unwrap();
        let s = received_snr_siso(&real, &cfg, 1.5 / 0.25).unwrap();
        assert!((r - (1.0 + s.total).log2()).abs() < 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn snr_monotone_in_transmit_snr(seed in 0u64..200, t1 in 0.0f64..1e3, dt in 0.0f64..1e3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let real = random_siso(&mut rng, 5);
            let cfg = RdarsConfiguration::first_connected(5, 1).unwrap();
            let lo = received_snr_siso(&real, &cfg, t1).unwrap().total;
            let hi = received_snr_siso(&real, &cfg, t1 + dt).unwrap().total;
            proptest::prop_assert!(hi >= lo);
        }
    }
}
