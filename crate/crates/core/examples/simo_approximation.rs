//! Multi-antenna rate approximation against Monte Carlo with aligned
//! statistical phases.

use rdars::analytic::ergodic_rate_simo_approx;
use rdars::montecarlo::{estimate_rate, Campaign};
use rdars::scenario::{Scenario, System};

fn main() -> rdars::Result<()> {
    let scenario =
        Scenario::default().with_overrides(&["rdars.connected=2", "simulation.trials=4000"])?;
    for system in System::ALL {
        let c = Campaign::new(scenario.clone(), system);
        let r = c.resolve()?;
        let inputs = r.simo_inputs()?;
        let approx = ergodic_rate_simo_approx(&inputs)?;
        let mc = estimate_rate(&c)?;
        println!(
            "{:<11} |f| = {:>7.2}  approx {:.3}  mc {:.3} ± {:.3}",
            system.label(),
            inputs.f_abs,
            approx,
            mc.mean,
            mc.ci_halfwidth_95
        );
    }
    Ok(())
}
