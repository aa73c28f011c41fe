//! Instantaneous phase alignment for a single-antenna BS: with the optimal
//! phases the complex SNR equals its magnitude-sum form.

use rdars::montecarlo::trial_rng;
use rdars::rdars::optimal_phases_instantaneous;
use rdars::scenario::Scenario;
use rdars::snr::{received_snr_siso, received_snr_siso_aligned};

fn main() -> rdars::Result<()> {
    let scenario = Scenario::default().with_overrides(&[
        "bs.antennas=1",
        "rdars.elements=64",
        "rdars.connected=2",
        "fading.rdars_bs_rician_linear=0",
        "fading.ue_rdars_rician_linear=0",
    ])?;
    let r = scenario.resolve()?;
    let gbar = r.power_w / r.noise.sigma_b_sq;
    for t in 0..3 {
        let real = r.model.draw(&mut trial_rng(scenario.seed, t));
        let theta = optimal_phases_instantaneous(
            real.h_ue_bs[0],
            &real.h_rb_siso(),
            &real.h_ue_rdars,
            r.config.connected(),
        )?;
        let tuned = r.config.with_phases(theta)?;
        let zero = r.config.with_phases(vec![0.0; r.config.n_total()])?;
        let complex = received_snr_siso(&real, &tuned, gbar)?;
        let magnitude = received_snr_siso_aligned(&real, &tuned, gbar)?;
        let untuned = received_snr_siso(&real, &zero, gbar)?;
        println!(
            "trial {t}: optimal {:.3}  magnitude-sum {:.3}  all-zero phases {:.3}",
            complex.total, magnitude.total, untuned.total
        );
    }
    Ok(())
}
