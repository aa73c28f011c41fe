//! Element-mode assignment and phase shifts of the surface.
//!
//! Elements are indexed from zero. An element is either *connected* (a
//! remote receive antenna wired back to the BS) or *reflecting* (a passive
//! unit-modulus phase shifter). The effective reflection coefficients are
//! derived on demand and never stored.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{upa_phase, AngleSet, NodeGeometry, C64};
use crate::error::{domain, Result};

/// Phase comparisons are done modulo 2π at this tolerance.
pub const PHASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdarsConfiguration {
    n_total: usize,
    connected: BTreeSet<usize>,
    phases: Vec<f64>,
}

impl RdarsConfiguration {
    pub fn new(n_total: usize, connected: BTreeSet<usize>, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != n_total {
            return Err(domain(format!(
                "expected {n_total} phases, got {}",
                phases.len()
            )));
        }
        if let Some(&bad) = connected.iter().find(|&&i| i >= n_total) {
            return Err(domain(format!(
                "connected element {bad} outside 0..{n_total}"
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(domain("phases must be finite"));
        }
        let mut cfg = Self {
            n_total,
            connected,
            phases,
        };
        cfg.zero_connected_phases();
        Ok(cfg)
    }

    /// First `a` elements connected, every phase zero.
    pub fn first_connected(n_total: usize, a: usize) -> Result<Self> {
        if a > n_total {
            return Err(domain(format!("a = {a} exceeds N = {n_total}")));
        }
        Self::new(n_total, (0..a).collect(), vec![0.0; n_total])
    }

    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        Self::new(self.n_total, self.connected.clone(), phases)
    }

    fn zero_connected_phases(&mut self) {
        for &i in &self.connected {
            self.phases[i] = 0.0;
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Number of connected elements.
    pub fn a(&self) -> usize {
        self.connected.len()
    }

    pub fn connected(&self) -> &BTreeSet<usize> {
        &self.connected
    }

    pub fn is_connected(&self, i: usize) -> bool {
        self.connected.contains(&i)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn reflecting(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_total).filter(move |i| !self.connected.contains(i))
    }

    pub fn connected_list(&self) -> Vec<usize> {
        self.connected.iter().copied().collect()
    }

    /// Diagonal of `(I − AᴴA)Θ`.
    pub fn effective_reflection(&self) -> Vec<C64> {
        (0..self.n_total)
            .map(|i| {
                if self.is_connected(i) {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar(1.0, self.phases[i])
                }
            })
            .collect()
    }
}

/// How reflection phases are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PhasePolicy {
    /// Re-optimised on every realization from full CSI. Single-antenna BS only.
    OptimalInstantaneous,
    /// Fixed, aligned to the UE through the LoS geometry.
    #[default]
    StatisticalAligned,
    /// All phases zero.
    Identity,
}

impl PhasePolicy {
    pub fn label(&self) -> &'static str {
        match self {
            Self::OptimalInstantaneous => "optimal-instantaneous",
            Self::StatisticalAligned => "statistical-aligned",
            Self::Identity => "identity",
        }
    }
}

/// `arg` with `arg(0) = 0`.
fn arg0(z: C64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Instantaneous-CSI optimal phases for a single-antenna BS: every
/// reflected path is rotated onto the direct path. Connected entries are 0.
pub fn optimal_phases_instantaneous(
    h_ub: C64,
    h_rb: &[C64],
    h_ur: &[C64],
    connected: &BTreeSet<usize>,
) -> Result<Vec<f64>> {
    if h_rb.len() != h_ur.len() {
        return Err(domain(format!(
            "RDARS–BS has {} entries but UE–RDARS has {}",
            h_rb.len(),
            h_ur.len()
        )));
    }
    let direct = arg0(h_ub);
    Ok(h_rb
        .iter()
        .zip(h_ur)
        .enumerate()
        .map(|(i, (rb, ur))| {
            if connected.contains(&i) {
                0.0
            } else {
                direct + arg0(*rb) - arg0(*ur)
            }
        })
        .collect())
}

/// Geometric phase `ζ_n` between the UE incidence direction and the
/// BS departure direction at every element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentPhases {
    pub zeta: Vec<f64>,
}

impl AlignmentPhases {
    /// Phases that make every reflected LoS term add coherently: `−ζ_n`.
    pub fn aligned_phases(&self) -> Vec<f64> {
        self.zeta.iter().map(|z| -z).collect()
    }
}

pub fn alignment_zeta(
    rdars_geometry: &NodeGeometry,
    ue_angles: &AngleSet,
    bs_departure_angles: &AngleSet,
) -> AlignmentPhases {
    let cols = rdars_geometry.array_cols;
    let s = rdars_geometry.element_spacing_ratio;
    let sin_term = ue_angles.elevation.sin() * ue_angles.azimuth.sin()
        - bs_departure_angles.elevation.sin() * bs_departure_angles.azimuth.sin();
    let cos_term = ue_angles.elevation.cos() - bs_departure_angles.elevation.cos();
    let zeta = (0..rdars_geometry.len())
        .map(|n| {
            let row = (n / cols) as f64;
            let col = (n % cols) as f64;
            2.0 * PI * s * (row * sin_term + col * cos_term)
        })
        .collect();
    AlignmentPhases { zeta }
}

/// Same quantity as [`alignment_zeta`] built from the two steering
/// vectors' phases instead of the closed form.
pub fn alignment_zeta_from_steering(
    rdars_geometry: &NodeGeometry,
    ue_angles: &AngleSet,
    bs_departure_angles: &AngleSet,
) -> AlignmentPhases {
    let cols = rdars_geometry.array_cols;
    let s = rdars_geometry.element_spacing_ratio;
    let zeta = (0..rdars_geometry.len())
        .map(|n| upa_phase(cols, s, ue_angles, n) - upa_phase(cols, s, bs_departure_angles, n))
        .collect();
    AlignmentPhases { zeta }
}

/// Coherent reflection sum `Σ_{n reflecting} e^{j(ζ_n + θ_n)}`.
pub fn f_value(config: &RdarsConfiguration, zeta: &AlignmentPhases) -> Result<C64> {
    if zeta.zeta.len() != config.n_total() {
        return Err(domain(format!(
            "zeta has {} entries, configuration has {}",
            zeta.zeta.len(),
            config.n_total()
        )));
    }
    Ok(config
        .reflecting()
        .map(|n| C64::from_polar(1.0, zeta.zeta[n] + config.phases()[n]))
        .sum())
}

/// `true` when two phases agree modulo 2π.
pub fn phases_equal(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(2.0 * PI);
    d < PHASE_TOLERANCE || 2.0 * PI - d < PHASE_TOLERANCE
}
