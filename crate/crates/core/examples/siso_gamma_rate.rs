//! Gamma-matched ergodic rate and Jensen bound against Monte Carlo for
//! each system with a single-antenna BS.

use rdars::analytic::{ergodic_rate_from_moments, rate_upper_bound_siso, snr_moments_siso};
use rdars::montecarlo::{estimate_rate, Campaign};
use rdars::scenario::{Scenario, System};

fn main() -> rdars::Result<()> {
    let scenario = Scenario::default().with_overrides(&[
        "bs.antennas=1",
        "rdars.elements=1024",
        "rdars.connected=2",
        "fading.rdars_bs_rician_linear=0",
        "fading.ue_rdars_rician_linear=0",
        "simulation.phase_policy=\"optimal-instantaneous\"",
        "simulation.trials=4000",
    ])?;
    println!("{:<11} {:>8} {:>8} {:>8}", "system", "mc", "gamma", "bound");
    for system in [System::Rdars, System::Das, System::Ris] {
        let c = Campaign::new(scenario.clone(), system);
        let mc = estimate_rate(&c)?;
        let i = c.resolve()?.siso_moment_inputs()?;
        let gamma = ergodic_rate_from_moments(&snr_moments_siso(&i)?)?;
        let bound = rate_upper_bound_siso(&i)?;
        println!(
            "{:<11} {:>8.3} {:>8.3} {:>8.3}",
            system.label(),
            mc.mean,
            gamma,
            bound
        );
    }
    Ok(())
}
