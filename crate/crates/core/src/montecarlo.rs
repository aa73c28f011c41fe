//! Seeded Monte Carlo estimation of ergodic rates and channel moments.
//!
//! Trial `t` draws from ChaCha8 stream `t` of the master seed, so any
//! trial can be replayed on its own and the schedule never matters. Trials
//! are grouped in fixed blocks; blocks run on a rayon pool and are reduced
//! in block order with compensated summation, which makes the results
//! bit-identical for every worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRealization, C64};
use crate::error::{domain, Error, Result};
use crate::rdars::{optimal_phases_instantaneous, PhasePolicy, RdarsConfiguration};
use crate::scenario::{ResolvedScenario, Scenario, System};
use crate::snr::composite_channel_simo;

const BLOCK: usize = 1024;
const Z95: f64 = 1.959_963_984_540_054;

/// Where a rate number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    MonteCarlo,
    ClosedForm,
    UpperBound,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Self::MonteCarlo => "monte-carlo",
            Self::ClosedForm => "closed-form",
            Self::UpperBound => "upper-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// bps/Hz.
    pub mean: f64,
    pub ci_halfwidth_95: f64,
    pub n_trials: usize,
    pub provenance: Provenance,
}

impl RateEstimate {
    pub fn exact(mean: f64, provenance: Provenance) -> Self {
        Self {
            mean,
            ci_halfwidth_95: 0.0,
            n_trials: 0,
            provenance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub scenario: Scenario,
    pub system: System,
    pub policy: PhasePolicy,
    pub n_trials: usize,
    pub master_seed: u64,
    pub parallelism: usize,
}

impl Campaign {
    /// Trials, seed, policy and worker count taken from the scenario.
    pub fn new(scenario: Scenario, system: System) -> Self {
        Self {
            system,
            policy: scenario.simulation.phase_policy,
            n_trials: scenario.simulation.trials,
            master_seed: scenario.seed,
            parallelism: scenario.simulation.parallelism,
            scenario,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(domain("campaign needs at least one trial"));
        }
        if self.parallelism == 0 {
            return Err(domain("campaign needs at least one worker"));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let mut s = self.scenario.clone();
        s.simulation.phase_policy = self.policy;
        s.resolve()?.for_system(self.system)
    }
}

/// RNG of trial `trial`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments2 {
    s1: CompensatedSum,
    s2: CompensatedSum,
    n: usize,
}

impl Moments2 {
    fn push(&mut self, x: f64) {
        self.s1.add(x);
        self.s2.add(x * x);
        self.n += 1;
    }

    fn merge(&mut self, other: &Moments2) {
        self.s1.add(other.s1.value());
        self.s2.add(other.s2.value());
        self.n += other.n;
    }

    fn mean_and_sd(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.s1.value() / n;
        if self.n < 2 {
            return (mean, 0.0);
        }
        let var = ((self.s2.value() - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, var.sqrt())
    }
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Numeric {
            context: "thread pool",
            detail: e.to_string(),
        })
}

/// Runs `per_block(range)` over fixed trial blocks and returns the block
/// results in order.
fn blocks<T: Send>(
    n_trials: usize,
    parallelism: usize,
    per_block: impl Fn(std::ops::Range<usize>) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let n_blocks = n_trials.div_ceil(BLOCK);
    let run = |b: usize| per_block(b * BLOCK..((b + 1) * BLOCK).min(n_trials));
    if parallelism <= 1 {
        (0..n_blocks).map(run).collect()
    } else {
        pool(parallelism)?.install(|| (0..n_blocks).into_par_iter().map(run).collect())
    }
}

/// Phases used on one realization.
fn trial_config<'a>(
    r: &'a ResolvedScenario,
    real: &ChannelRealization,
    scratch: &'a mut Option<RdarsConfiguration>,
) -> Result<&'a RdarsConfiguration> {
    if r.policy != PhasePolicy::OptimalInstantaneous || r.config.n_total() == r.config.a() {
        return Ok(&r.config);
    }
    let phases = optimal_phases_instantaneous(
        real.h_ue_bs[0],
        &real.h_rb_siso(),
        &real.h_ue_rdars,
        r.config.connected(),
    )?;
    *scratch = Some(r.config.with_phases(phases)?);
    Ok(scratch.as_ref().expect("just set"))
}

/// `‖h̃‖⁴ / h̃ᴴRh̃` of one realization: the SNR per watt of transmit power.
pub fn gain_per_watt(r: &ResolvedScenario, real: &ChannelRealization) -> Result<f64> {
    let mut scratch = None;
    let config = trial_config(r, real, &mut scratch)?;
    let h = composite_channel_simo(real, config)?;
    let l = r.bs_antennas();
    let (mut energy, mut quad) = (0.0, 0.0);
    for (i, x) in h.iter().enumerate() {
        let e = x.norm_sqr();
        energy += e;
        quad += e * if i < l {
            r.noise.sigma_b_sq
        } else {
            r.noise.sigma_r_sq
        };
    }
    Ok(if quad > 0.0 {
        energy * energy / quad
    } else {
        0.0
    })
}

/// Per-trial SNR per watt, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSamples {
    pub gains: Vec<f64>,
}

impl GainSamples {
    pub fn draw(
        r: &ResolvedScenario,
        n_trials: usize,
        seed: u64,
        parallelism: usize,
    ) -> Result<Self> {
        if n_trials == 0 {
            return Err(domain("need at least one trial"));
        }
        let parts = blocks(n_trials, parallelism, |range| {
            range
                .map(|t| {
                    let real = r.model.draw(&mut trial_rng(seed, t as u64));
                    gain_per_watt(r, &real)
                })
                .collect::<Result<Vec<f64>>>()
        })?;
        Ok(Self {
            gains: parts.concat(),
        })
    }

    /// Sample mean of `log₂(1 + P g)` with its 95% half-width.
    pub fn rate_at(&self, power_w: f64) -> RateEstimate {
        let mut m = Moments2::default();
        for chunk in self.gains.chunks(BLOCK) {
            let mut b = Moments2::default();
            for g in chunk {
                b.push((power_w * g).ln_1p() / std::f64::consts::LN_2);
            }
            m.merge(&b);
        }
        let (mean, sd) = m.mean_and_sd();
        RateEstimate {
            mean,
            ci_halfwidth_95: Z95 * sd / (m.n as f64).sqrt(),
            n_trials: m.n,
            provenance: Provenance::MonteCarlo,
        }
    }

    /// Transmit power in dBm at which the estimated rate reaches `target`,
    /// by bisection in `[lo_dbm, hi_dbm]`.
    pub fn power_for_rate_dbm(&self, target: f64, lo_dbm: f64, hi_dbm: f64) -> Result<f64> {
        power_for_rate_dbm(|p| Ok(self.rate_at(p).mean), target, lo_dbm, hi_dbm)
    }
}

/// Bisection on a rate curve that increases with power.
pub fn power_for_rate_dbm(
    rate_at_watts: impl Fn(f64) -> Result<f64>,
    target: f64,
    mut lo_dbm: f64,
    mut hi_dbm: f64,
) -> Result<f64> {
    let w = |dbm: f64| 10f64.powf((dbm - 30.0) / 10.0);
    if rate_at_watts(w(lo_dbm))? > target || rate_at_watts(w(hi_dbm))? < target {
        return Err(Error::Numeric {
            context: "power bisection",
            detail: format!("rate {target} not bracketed by [{lo_dbm}, {hi_dbm}] dBm"),
        });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo_dbm + hi_dbm);
        if rate_at_watts(w(mid))? < target {
            lo_dbm = mid;
        } else {
            hi_dbm = mid;
        }
        if hi_dbm - lo_dbm < 1e-9 {
            break;
        }
    }
    Ok(0.5 * (lo_dbm + hi_dbm))
}

/// Sample-mean ergodic rate of the campaign.
pub fn estimate_rate(c: &Campaign) -> Result<RateEstimate> {
    c.validate()?;
    let r = c.resolve()?;
    Ok(GainSamples::draw(&r, c.n_trials, c.master_seed, c.parallelism)?.rate_at(r.power_w))
}

/// A scalar channel statistic estimated by sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentSelector {
    /// `|h_UB|^k` (first BS antenna).
    Gamma1(u32),
    /// `(Σ_reflecting |H₀ᵢ||hᵢ|)^k`.
    Gamma2(u32),
    /// `(Σ_connected |hᵢ|²)^k`.
    Gamma3(u32),
    /// `‖h̃‖⁴`.
    SignalFourth,
    /// `h̃ᴴRh̃`.
    NoiseQuadratic,
    /// One of the fourteen pieces of `E‖h̃‖⁴`, numbered from 1.
    SignalTerm(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Per-sample estimators of the fourteen terms; each has the term's
/// expectation, though their per-sample sum is not `‖h̃‖⁴`.
fn signal_term_samples(r: &ResolvedScenario, real: &ChannelRealization) -> Result<[f64; 14]> {
    if r.model.per_realization_shadow_db.is_some() {
        return Err(domain("term estimators need fixed large-scale gains"));
    }
    let l = r.bs_antennas();
    let eps = r.epsilon;
    let dd = r.gains.ue_rdars / (eps + 1.0);
    let b = r.config.effective_reflection();

    let x: Vec<C64> = (0..l)
        .map(|row| {
            real.h_rdars_bs
                .row(row)
                .iter()
                .zip(&b)
                .zip(&real.h_ue_rdars)
                .map(|((h, bi), u)| h * bi * u)
                .sum()
        })
        .collect();
    let d = &real.h_ue_bs;
    let x2: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let d2: f64 = d.iter().map(|v| v.norm_sqr()).sum();
    let xd: C64 = x.iter().zip(d).map(|(a, b)| a.conj() * b).sum();

    // LoS and unit scattered parts at the connected elements
    let scale = dd.sqrt();
    let (mut los2, mut s2) = (0.0, 0.0);
    let mut los_s = C64::new(0.0, 0.0);
    for &i in r.config.connected() {
        let los = r.model.los_ue_rdars[i];
        let s = real.h_ue_rdars[i] / scale - los * eps.sqrt();
        los2 += los.norm_sqr();
        s2 += s.norm_sqr();
        los_s += los.conj() * s;
    }

    Ok([
        x2 * x2,
        xd.norm_sqr(),
        xd.norm_sqr(),
        d2 * d2,
        dd * dd * eps * eps * los2 * los2,
        dd * dd * eps * los_s.norm_sqr(),
        dd * dd * eps * los_s.norm_sqr(),
        dd * dd * s2 * s2,
        2.0 * x2 * d2,
        2.0 * dd * eps * x2 * los2,
        2.0 * dd * x2 * s2,
        2.0 * dd * eps * d2 * los2,
        2.0 * dd * d2 * s2,
        2.0 * dd * dd * eps * los2 * s2,
    ])
}

/// Per-realization quantities shared by several selectors.
#[derive(Default)]
struct TrialCache {
    direct: Option<f64>,
    reflection: Option<f64>,
    collected: Option<f64>,
    terms: Option<[f64; 14]>,
}

fn cached(slot: &mut Option<f64>, f: impl FnOnce() -> f64) -> f64 {
    *slot.get_or_insert_with(f)
}

fn selector_value(
    sel: MomentSelector,
    r: &ResolvedScenario,
    real: &ChannelRealization,
    cache: &mut TrialCache,
) -> Result<f64> {
    let cfg = &r.config;
    Ok(match sel {
        MomentSelector::Gamma1(k) => {
            cached(&mut cache.direct, || real.h_ue_bs[0].norm()).powi(k as i32)
        }
        MomentSelector::Gamma2(k) => cached(&mut cache.reflection, || {
            let row = real.h_rdars_bs.row(0);
            cfg.reflecting()
                .map(|i| row[i].norm() * real.h_ue_rdars[i].norm())
                .sum::<f64>()
        })
        .powi(k as i32),
        MomentSelector::Gamma3(k) => cached(&mut cache.collected, || {
            cfg.connected()
                .iter()
                .map(|&i| real.h_ue_rdars[i].norm_sqr())
                .sum::<f64>()
        })
        .powi(k as i32),
        MomentSelector::SignalFourth => {
            let e: f64 = composite_channel_simo(real, cfg)?
                .iter()
                .map(|v| v.norm_sqr())
                .sum();
            e * e
        }
        MomentSelector::NoiseQuadratic => {
            let l = r.bs_antennas();
            composite_channel_simo(real, cfg)?
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.norm_sqr()
                        * if i < l {
                            r.noise.sigma_b_sq
                        } else {
                            r.noise.sigma_r_sq
                        }
                })
                .sum()
        }
        MomentSelector::SignalTerm(k) => {
            if !(1..=14).contains(&k) {
                return Err(domain(format!("term index {k} outside 1..=14")));
            }
            if cache.terms.is_none() {
                cache.terms = Some(signal_term_samples(r, real)?);
            }
            cache.terms.expect("filled above")[k - 1]
        }
    })
}

/// Sample means and standard errors of the selected statistics, all from
/// the same realizations.
pub fn empirical_moments(
    r: &ResolvedScenario,
    selectors: &[MomentSelector],
    n_trials: usize,
    seed: u64,
    parallelism: usize,
) -> Result<Vec<MomentEstimate>> {
    if n_trials == 0 {
        return Err(domain("need at least one trial"));
    }
    let parts = blocks(n_trials, parallelism, |range| {
        let mut acc = vec![Moments2::default(); selectors.len()];
        for t in range {
            let real = r.model.draw(&mut trial_rng(seed, t as u64));
            let mut cache = TrialCache::default();
            for (m, &sel) in acc.iter_mut().zip(selectors) {
                m.push(selector_value(sel, r, &real, &mut cache)?);
            }
        }
        Ok(acc)
    })?;
    let mut total = vec![Moments2::default(); selectors.len()];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total
        .iter()
        .map(|m| {
            let (mean, sd) = m.mean_and_sd();
            MomentEstimate {
                mean,
                std_error: sd / (m.n as f64).sqrt(),
                n: m.n,
            }
        })
        .collect())
}

/// Scenario parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// `N`.
    Elements,
    /// `a`.
    Connected,
    TransmitPowerDbm,
    /// `L`.
    BsAntennas,
    /// `δ`.
    RicianDelta,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Elements => "elements",
            Self::Connected => "connected",
            Self::TransmitPowerDbm => "transmit_power_dbm",
            Self::BsAntennas => "bs_antennas",
            Self::RicianDelta => "rdars_bs_rician_linear",
        }
    }

    /// `scenario` with this axis set to `value`.
    pub fn apply(&self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = scenario.clone();
        let count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(domain(format!(
                    "{} needs a whole number, got {value}",
                    self.label()
                )))
            }
        };
        match self {
            Self::Elements => s.rdars.elements = count()?,
            Self::Connected => s.rdars.connected = count()?,
            Self::TransmitPowerDbm => s.power.transmit_power_dbm = value,
            Self::BsAntennas => s.bs.antennas = count()?,
            Self::RicianDelta => s.fading.rdars_bs_rician_linear = value,
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub system: System,
    pub estimate: RateEstimate,
}

/// Monte Carlo rate of each system at each axis value. Every point reuses
/// the template's seed, so all points share the same random numbers.
pub fn sweep(
    template: &Campaign,
    axis: SweepAxis,
    values: &[f64],
    systems: &[System],
) -> Result<Vec<SweepPoint>> {
    template.validate()?;
    let mut out = Vec::with_capacity(values.len() * systems.len());
    if axis == SweepAxis::TransmitPowerDbm {
        // power does not change the channel: draw once per system
        let per_system = systems
            .iter()
            .map(|&sys| {
                let c = Campaign {
                    system: sys,
                    ..template.clone()
                };
                let r = c.resolve()?;
                GainSamples::draw(&r, c.n_trials, c.master_seed, c.parallelism)
            })
            .collect::<Result<Vec<_>>>()?;
        for &v in values {
            axis.apply(&template.scenario, v)?;
            for (&sys, g) in systems.iter().zip(&per_system) {
                out.push(SweepPoint {
                    axis_value: v,
                    system: sys,
                    estimate: g.rate_at(10f64.powf((v - 30.0) / 10.0)),
                });
            }
        }
        return Ok(out);
    }
    for &v in values {
        let scenario = axis.apply(&template.scenario, v)?;
        for &sys in systems {
            let c = Campaign {
                scenario: scenario.clone(),
                system: sys,
                ..template.clone()
            };
            out.push(SweepPoint {
                axis_value: v,
                system: sys,
                estimate: estimate_rate(&c)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snr::mrc_rate_simo;

    fn small() -> Scenario {
        Scenario::default()
            .with_overrides(&[
                "rdars.elements=16",
                "rdars.connected=2",
                "simulation.trials=3000",
            ])
            .unwrap()
    }

    #[test]
    fn single_trial_matches_direct_evaluation() {
        let c = Campaign {
            n_trials: 1,
            ..Campaign::new(small(), System::Rdars)
        };
        let est = estimate_rate(&c).unwrap();
        let r = c.resolve().unwrap();
        let real = r.model.draw(&mut trial_rng(c.master_seed, 0));
        let h = composite_channel_simo(&real, &r.config).unwrap();
        let direct = mrc_rate_simo(&h, r.power_w, &r.noise, r.config.a()).unwrap();
        assert!((est.mean - direct).abs() < 1e-12);
        assert_eq!(est.ci_halfwidth_95, 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = Campaign {
            n_trials: 5000,
            ..Campaign::new(small(), System::Rdars)
        };
        let one = estimate_rate(&base).unwrap();
        let many = estimate_rate(&Campaign {
            parallelism: 16,
            ..base.clone()
        })
        .unwrap();
        assert_eq!(one.mean.to_bits(), many.mean.to_bits());
        assert_eq!(
            one.ci_halfwidth_95.to_bits(),
            many.ci_halfwidth_95.to_bits()
        );
    }

    #[test]
    fn ci_shrinks_with_trials() {
        let c = Campaign::new(small(), System::Rdars);
        let a = estimate_rate(&Campaign {
            n_trials: 2000,
            ..c.clone()
        })
        .unwrap();
        let b = estimate_rate(&Campaign {
            n_trials: 8000,
            ..c
        })
        .unwrap();
        let ratio = a.ci_halfwidth_95 / b.ci_halfwidth_95;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn gamma3_vanishes_without_connected_elements() {
        let s = small().with_overrides(&["rdars.connected=0"]).unwrap();
        let r = s.resolve().unwrap();
        let m = empirical_moments(
            &r,
            &[MomentSelector::Gamma3(1), MomentSelector::Gamma3(2)],
            500,
            3,
            1,
        )
        .unwrap();
        assert!(m.iter().all(|e| e.mean == 0.0 && e.std_error == 0.0));
    }

    #[test]
    fn single_reflection_product_mean() {
        let s = Scenario::default()
            .with_overrides(&[
                "bs.antennas=1",
                "rdars.elements=2",
                "rdars.connected=1",
                "fading.rdars_bs_rician_linear=0",
                "fading.ue_rdars_rician_linear=0",
                "path_loss.ue_rdars_gain_db=0",
                "path_loss.rdars_bs_gain_db=0",
            ])
            .unwrap();
        let r = s.resolve().unwrap();
        let m = empirical_moments(&r, &[MomentSelector::Gamma2(1)], 200_000, 11, 1).unwrap()[0];
        let want = std::f64::consts::PI / 4.0;
        assert!((m.mean - want).abs() < 3.0 * m.std_error, "{m:?}");
    }

    #[test]
    fn direct_link_fourth_moment() {
        let s = Scenario::default()
            .with_overrides(&[
                "bs.antennas=4",
                "rdars.elements=4",
                "path_loss.ue_bs_gain_db=0",
            ])
            .unwrap();
        let r = s.resolve().unwrap();
        let m = empirical_moments(&r, &[MomentSelector::SignalTerm(4)], 200_000, 5, 1).unwrap()[0];
        assert!((m.mean - 20.0).abs() < 3.0 * m.std_error, "{m:?}");
    }

    #[test]
    fn bad_term_index() {
        let r = small().resolve().unwrap();
        assert!(empirical_moments(&r, &[MomentSelector::SignalTerm(15)], 10, 1, 1).is_err());
    }

    #[test]
    fn power_sweep_is_monotone() {
        let c = Campaign {
            n_trials: 500,
            ..Campaign::new(small(), System::Rdars)
        };
        let pts = sweep(
            &c,
            SweepAxis::TransmitPowerDbm,
            &[0.0, 5.0, 10.0],
            &[System::Rdars, System::Das],
        )
        .unwrap();
        assert_eq!(pts.len(), 6);
        assert!(pts[0].estimate.mean < pts[2].estimate.mean);
        assert!(pts[2].estimate.mean < pts[4].estimate.mean);
    }

    #[test]
    fn bisection_recovers_power() {
        let g = GainSamples {
            gains: vec![1.0, 3.0, 10.0],
        };
        let dbm = g.power_for_rate_dbm(2.0, -30.0, 60.0).unwrap();
        let r = g.rate_at(10f64.powf((dbm - 30.0) / 10.0)).mean;
        assert!((r - 2.0).abs() < 1e-8);
        assert!(g.power_for_rate_dbm(100.0, -30.0, 60.0).is_err());
    }

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
