//! Closed-form rate approximation for a multi-antenna BS under Rician fading.
//!
//! Gains `alpha`, `beta`, `gamma` here are linear *power* gains of the
//! UE–RDARS, RDARS–BS and UE–BS links. `delta` and `epsilon` are the Rician
//! factors of the RDARS–BS and UE–RDARS links.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::snr::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimoRateInputs {
    pub bs_antennas: usize,
    pub n_total: usize,
    pub a: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Transmit power in watts.
    pub power: f64,
    pub noise: NoiseModel,
    /// `|f(A, Θ)|`, at most `N − a`.
    pub f_abs: f64,
}

impl SimoRateInputs {
    pub fn validate(&self) -> Result<()> {
        if self.bs_antennas == 0 {
            return Err(domain("L must be at least 1"));
        }
        if self.a > self.n_total {
            return Err(domain(format!(
                "a = {} exceeds N = {}",
                self.a, self.n_total
            )));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("power", self.power),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("delta", self.delta), ("epsilon", self.epsilon)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        let m = (self.n_total - self.a) as f64;
        if !(self.f_abs >= 0.0 && self.f_abs <= m * (1.0 + 1e-12) + 1e-12) {
            return Err(domain(format!(
                "|f| = {} outside [0, N - a = {m}]",
                self.f_abs
            )));
        }
        Ok(())
    }

    /// Same inputs with the phases aligned to the user, `|f| = N − a`.
    pub fn aligned(mut self) -> Self {
        self.f_abs = (self.n_total - self.a) as f64;
        self
    }

    fn c(&self) -> f64 {
        self.beta * self.alpha / ((self.delta + 1.0) * (self.epsilon + 1.0))
    }

    fn d(&self) -> f64 {
        self.alpha / (self.epsilon + 1.0)
    }

    fn m(&self) -> f64 {
        (self.n_total - self.a) as f64
    }
}

/// `E‖h̃‖⁴`, the fourth moment of the composite channel norm.
pub fn e_signal(i: &SimoRateInputs) -> Result<f64> {
    i.validate()?;
    let l = i.bs_antennas as f64;
    let a = i.a as f64;
    let m = i.m();
    let (c, d) = (i.c(), i.d());
    let (de, ep) = (i.delta, i.epsilon);
    let f2 = i.f_abs * i.f_abs;

    let quartic = l
        * c
        * c
        * (l * (de * ep).powi(2) * f2 * f2
            + 2.0
                * de
                * ep
                * f2
                * (2.0 * l * m * de + l * m * ep + l * m + 2.0 * l + m * ep + m + 2.0)
            + l * m * m * (2.0 * de * de + ep * ep + 2.0 * de * ep + 2.0 * de + 2.0 * ep + 1.0)
            + m * m * (ep * ep + 2.0 * de * ep + 2.0 * de + 2.0 * ep + 1.0)
            + l * m * (2.0 * de + 2.0 * ep + 1.0)
            + m * (2.0 * de + 2.0 * ep + 1.0));
    let cross = l
        * c
        * (2.0 * de * ep * f2 * ((l + 1.0) * i.gamma + a * i.alpha)
            + 2.0 * m * (l + 1.0) * (ep + de + 1.0) * i.gamma);
    let distributed = 2.0 * l * a * (m * c * i.alpha * (ep + de + 1.0) + i.alpha * i.gamma);
    let direct = l * (l + 1.0) * i.gamma * i.gamma;
    let connected = a * d * d * ((ep + 1.0).powi(2) * a + 2.0 * ep + 1.0);
    Ok(quartic + cross + distributed + direct + connected)
}

/// `E[h̃ᴴ R h̃]`, the expected MRC noise power.
pub fn e_noise(i: &SimoRateInputs) -> Result<f64> {
    i.validate()?;
    let l = i.bs_antennas as f64;
    let m = i.m();
    let c = i.c();
    let f2 = i.f_abs * i.f_abs;
    Ok(i.noise.sigma_b_sq
        * l
        * (f2 * c * i.delta * i.epsilon + m * c * i.delta + m * c * (i.epsilon + 1.0) + i.gamma)
        + i.noise.sigma_r_sq * i.a as f64 * i.d() * (i.epsilon + 1.0))
}

/// `log₂(1 + P E‖h̃‖⁴ / E[h̃ᴴRh̃])`.
pub fn ergodic_rate_simo_approx(i: &SimoRateInputs) -> Result<f64> {
    let s = e_signal(i)?;
    let n = e_noise(i)?;
    Ok((i.power * s / n).ln_1p() / std::f64::consts::LN_2)
}

/// The fourteen expectations whose sum is [`e_signal`], in order:
///
/// 1. `E|x̲ᴴx̲|²` with `x̲ = HBh`
/// 2. and 3. `E|x̲ᴴd|²`, `E|dᴴx̲|²`
/// 4. `E|dᴴd|²`
/// 5. to 8. the connected-element LoS/scatter products
/// 9. `2 Re E[x̲ᴴx̲ dᴴd]`
/// 10. to 14. the remaining cross products with the connected part
pub fn signal_terms(i: &SimoRateInputs) -> Result<[f64; 14]> {
    i.validate()?;
    let l = i.bs_antennas as f64;
    let a = i.a as f64;
    let m = i.m();
    let (c, d, g) = (i.c(), i.d(), i.gamma);
    let (de, ep) = (i.delta, i.epsilon);
    let f2 = i.f_abs * i.f_abs;

    // E‖x̲‖² / (L c)
    let q = f2 * de * ep + m * de + m * (ep + 1.0);

    let t1 = c
        * c
        * (de * de * l * l * (ep * ep * f2 * f2 + 4.0 * ep * m * f2 + 2.0 * m * m)
            + 2.0 * de * l * (l + 1.0) * ((ep * f2 + m) * m * (ep + 1.0) + 2.0 * ep * f2 + m)
            + l * (l + 1.0) * (m * m * (ep + 1.0).powi(2) + m * (2.0 * ep + 1.0)));
    let t2 = g * l * c * q;
    Ok([
        t1,
        t2,
        t2,
        g * g * l * (l + 1.0),
        a * a * d * d * ep * ep,
        a * d * d * ep,
        a * d * d * ep,
        a * a * d * d + a * d * d,
        2.0 * l * l * c * g * q,
        2.0 * l * a * c * d * ep * q,
        2.0 * l * a * c * d * q,
        2.0 * l * a * d * g * ep,
        2.0 * l * a * d * g,
        2.0 * a * a * d * d * ep,
    ])
}
