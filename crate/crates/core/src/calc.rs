//! Ad-hoc calculators. Each returns one JSON object echoing its inputs.

use serde_json::{json, Value};

use crate::analytic::{
    c3, c4, e_noise, e_signal, ergodic_rate_gamma, ergodic_rate_simo_approx, gamma1_moments,
    gamma2_moments, gamma3_moments, gamma_match, mean_snrs, rate_upper_bound_siso,
    rate_upper_bound_siso_as_printed, ris_crossover_n, snr_moments_siso, SisoMomentInputs,
    SnrMoments,
};
use crate::channel::{dbm_to_watts, linear_to_db};
use crate::error::Result;
use crate::scenario::Scenario;

/// Overrides that reproduce the mean-SNR comparison setting: every link
/// at −70 dB and a 90 dB transmit SNR.
pub const MEAN_SNR_PRESET: [&str; 7] = [
    "bs.antennas=1",
    "path_loss.ue_rdars_gain_db=-70",
    "path_loss.rdars_bs_gain_db=-70",
    "path_loss.ue_bs_gain_db=-70",
    "power.transmit_power_dbm=10",
    "power.noise_bs_dbm=-80",
    "power.noise_rdars_dbm=-80",
];

/// Single-antenna moment inputs straight from the scenario's link budget.
pub fn siso_inputs(s: &Scenario) -> Result<SisoMomentInputs> {
    let g = s.link_gains()?;
    SisoMomentInputs::from_gains(
        s.rdars.elements,
        s.rdars.connected,
        g.ue_rdars,
        g.rdars_bs,
        g.ue_bs,
        dbm_to_watts(s.power.transmit_power_dbm) / dbm_to_watts(s.power.noise_bs_dbm),
    )
}

fn echo(i: &SisoMomentInputs) -> Value {
    json!({
        "n_total": i.n_total,
        "a": i.a,
        "ue_rdars_gain_db": linear_to_db(i.alpha * i.alpha),
        "rdars_bs_gain_db": linear_to_db(i.beta * i.beta),
        "ue_bs_gain_db": linear_to_db(i.gamma * i.gamma),
        "transmit_snr_db": linear_to_db(i.transmit_snr),
    })
}

pub fn snr_moments(s: &Scenario) -> Result<Value> {
    let i = siso_inputs(s)?;
    let m = snr_moments_siso(&i)?;
    Ok(json!({
        "inputs": echo(&i),
        "outputs": {
            "mean_snr": m.mean,
            "second_moment_snr": m.second,
            "variance_snr": m.variance(),
            "direct_amplitude_moments": gamma1_moments(i.gamma),
            "reflection_sum_moments": gamma2_moments(i.n_total, i.a, i.alpha, i.beta)?,
            "distribution_gain_moments": gamma3_moments(i.a, i.alpha),
            "c3": c3(i.reflecting()),
            "c4": c4(i.reflecting()),
        }
    }))
}

pub fn gamma_fit(mean: f64, second_moment: f64) -> Result<Value> {
    let g = gamma_match(&SnrMoments {
        mean,
        second: second_moment,
    })?;
    Ok(json!({
        "inputs": {"mean": mean, "second_moment": second_moment},
        "outputs": {"shape_k": g.shape, "scale_p": g.scale},
    }))
}

pub fn rate_siso(s: &Scenario) -> Result<Value> {
    let i = siso_inputs(s)?;
    let m = snr_moments_siso(&i)?;
    let g = gamma_match(&m)?;
    Ok(json!({
        "inputs": echo(&i),
        "outputs": {
            "shape_k": g.shape,
            "scale_p": g.scale,
            "ergodic_rate_gamma_bps_hz": ergodic_rate_gamma(&g)?,
            "rate_upper_bound_bps_hz": rate_upper_bound_siso(&i)?,
        }
    }))
}

pub fn rate_simo(s: &Scenario) -> Result<Value> {
    let r = s.resolve()?;
    let i = r.simo_inputs()?;
    Ok(json!({
        "inputs": {
            "bs_antennas": i.bs_antennas,
            "n_total": i.n_total,
            "a": i.a,
            "ue_rdars_gain_db": linear_to_db(i.alpha),
            "rdars_bs_gain_db": linear_to_db(i.beta),
            "ue_bs_gain_db": linear_to_db(i.gamma),
            "rdars_bs_rician_linear": i.delta,
            "ue_rdars_rician_linear": i.epsilon,
            "transmit_power_dbm": s.power.transmit_power_dbm,
            "noise_bs_dbm": s.power.noise_bs_dbm,
            "noise_rdars_dbm": s.power.noise_rdars_dbm,
            "phase_policy": r.policy.label(),
        },
        "outputs": {
            "f_abs": i.f_abs,
            "e_signal": e_signal(&i)?,
            "e_noise": e_noise(&i)?,
            "ergodic_rate_approx_bps_hz": ergodic_rate_simo_approx(&i)?,
        }
    }))
}

pub fn bound(s: &Scenario) -> Result<Value> {
    let i = siso_inputs(s)?;
    Ok(json!({
        "inputs": echo(&i),
        "outputs": {
            "rate_upper_bound_bps_hz": rate_upper_bound_siso(&i)?,
            "rate_upper_bound_as_printed_bps_hz": rate_upper_bound_siso_as_printed(&i)?,
        }
    }))
}

pub fn threshold(s: &Scenario) -> Result<Value> {
    let i = siso_inputs(s)?;
    let n = ris_crossover_n(i.a, i.alpha, i.beta, i.gamma)?;
    let at = |nn: f64| -> Result<Value> {
        let m = mean_snrs(&SisoMomentInputs {
            n_total: nn.max(i.a as f64).round() as usize,
            ..i
        })?;
        Ok(json!({"rdars": m.rdars, "ris": m.ris, "das": m.das, "direct_only": m.direct_only}))
    };
    Ok(json!({
        "inputs": echo(&i),
        "outputs": {
            "ris_crossover_n": n,
            "mean_snrs_at_crossover": at(n)?,
        }
    }))
}
