//! Closed-form performance expressions.

pub mod comparison;
pub mod moments;
pub mod quadrature;
pub mod rate;
pub mod simo;

pub use comparison::{
    mean_snrs, rate_upper_bound_siso, rate_upper_bound_siso_as_printed, ris_crossover_n, MeanSnrs,
};
pub use moments::{
    c3, c4, gamma1_moments, gamma2_moments, gamma3_moments, snr_moments_composed, snr_moments_siso,
    snr_moments_siso_as_printed, SisoMomentInputs, SnrMoments,
};
pub use rate::{ergodic_rate_from_moments, ergodic_rate_gamma, gamma_match, GammaApprox};
pub use simo::{e_noise, e_signal, ergodic_rate_simo_approx, signal_terms, SimoRateInputs};
