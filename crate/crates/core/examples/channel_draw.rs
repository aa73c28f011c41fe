//! Resolve the default scenario and look at one channel realization.

use rdars::montecarlo::trial_rng;
use rdars::scenario::Scenario;

fn main() -> rdars::Result<()> {
    let scenario =
        Scenario::default().with_overrides(&["rdars.elements=16", "rdars.connected=2"])?;
    let r = scenario.resolve()?;
    println!(
        "link gains (dB): ue-rdars {:.1}, rdars-bs {:.1}, ue-bs {:.1}",
        10.0 * r.gains.ue_rdars.log10(),
        10.0 * r.gains.rdars_bs.log10(),
        10.0 * r.gains.ue_bs.log10()
    );
    let real = r.model.draw(&mut trial_rng(scenario.seed, 0));
    println!("H is {}x{}", real.h_rdars_bs.rows(), real.h_rdars_bs.cols());
    for (i, h) in real.h_ue_rdars.iter().take(4).enumerate() {
        println!("h[{i}] = {:+.3e} {:+.3e}j", h.re, h.im);
    }
    for (l, d) in real.h_ue_bs.iter().enumerate() {
        println!("d[{l}] = {:+.3e} {:+.3e}j", d.re, d.im);
    }
    Ok(())
}
