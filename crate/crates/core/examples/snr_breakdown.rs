//! Closed-form SNR moments and their building blocks for one setting.

use rdars::analytic::{
    c3, c4, gamma1_moments, gamma2_moments, gamma3_moments, snr_moments_composed, snr_moments_siso,
    SisoMomentInputs,
};

fn main() -> rdars::Result<()> {
    let i = SisoMomentInputs::from_gains(256, 2, 1e-7, 1e-6, 1e-10, 1e9)?;
    println!("direct |h|^k      {:?}", gamma1_moments(i.gamma));
    println!(
        "reflection sum^k  {:?}",
        gamma2_moments(i.n_total, i.a, i.alpha, i.beta)?
    );
    println!("collected power^k {:?}", gamma3_moments(i.a, i.alpha));
    println!("C3 = {}, C4 = {}", c3(i.reflecting()), c4(i.reflecting()));
    let m = snr_moments_siso(&i)?;
    let c = snr_moments_composed(&i)?;
    println!("E[snr]   = {:.6e} (composed {:.6e})", m.mean, c.mean);
    println!("E[snr^2] = {:.6e} (composed {:.6e})", m.second, c.second);
    Ok(())
}
