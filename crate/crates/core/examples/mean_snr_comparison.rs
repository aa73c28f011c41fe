//! Mean SNR of each system as the surface grows, and the size at which a
//! passive surface catches up with a one-element RDARS.

use rdars::analytic::{mean_snrs, ris_crossover_n, SisoMomentInputs};

fn main() -> rdars::Result<()> {
    let g = 1e-7;
    let base = SisoMomentInputs::from_gains(100, 1, g, g, g, 1e9)?;
    println!(
        "{:>10} {:>9} {:>9} {:>9} {:>9}",
        "N", "rdars", "ris", "das", "direct"
    );
    for n in [1e2, 1e3, 1e4, 1e5, 1e6, 1e7] {
        let m = mean_snrs(&SisoMomentInputs {
            n_total: n as usize,
            ..base
        })?;
        let db = |x: f64| 10.0 * x.log10();
        println!(
            "{n:>10.0} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
            db(m.rdars),
            db(m.ris),
            db(m.das),
            db(m.direct_only)
        );
    }
    let n = ris_crossover_n(base.a, base.alpha, base.beta, base.gamma)?;
    println!("passive surface matches RDARS (a = 1) at N ≈ {n:.3e}");
    Ok(())
}
