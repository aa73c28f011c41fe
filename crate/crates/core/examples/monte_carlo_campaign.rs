//! A rate sweep over the element count, run on several workers. The
//! result does not depend on the worker count.

use rdars::montecarlo::{sweep, Campaign, SweepAxis};
use rdars::scenario::{Scenario, System};

fn main() -> rdars::Result<()> {
    let scenario = Scenario::default().with_overrides(&["simulation.trials=2000"])?;
    let mut campaign = Campaign::new(scenario, System::Rdars);
    campaign.parallelism = 4;
    let points = sweep(
        &campaign,
        SweepAxis::Elements,
        &[64.0, 256.0, 1024.0],
        &[System::Rdars, System::Das, System::Ris],
    )?;
    for p in &points {
        println!(
            "N = {:>5}  {:<6} {:.3} ± {:.3}",
            p.axis_value,
            p.system.label(),
            p.estimate.mean,
            p.estimate.ci_halfwidth_95
        );
    }
    campaign.parallelism = 1;
    let serial = sweep(&campaign, SweepAxis::Elements, &[64.0], &[System::Rdars])?;
    assert_eq!(serial[0].estimate, points[0].estimate);
    println!("serial and parallel runs agree bit for bit");
    Ok(())
}
