//! Large-scale gains and small-scale fading for the UE–BS, UE–RDARS and
//! RDARS–BS links.
//!
//! All powers are linear inside this module; dB only appears at the
//! path-loss boundary. Fading draws take an explicit RNG so that every
//! caller controls its own stream.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type C64 = Complex64;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Log-distance path-loss law `C0 + 10·n·log10(d) + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub c0_db: f64,
    pub exponent: f64,
    pub shadow_sigma_db: f64,
}

impl PathLossParams {
    pub fn new(c0_db: f64, exponent: f64, shadow_sigma_db: f64) -> Result<Self> {
        if !c0_db.is_finite() {
            return Err(domain("reference path loss must be finite"));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(domain(format!(
                "path-loss exponent must be > 0, got {exponent}"
            )));
        }
        if !(shadow_sigma_db >= 0.0 && shadow_sigma_db.is_finite()) {
            return Err(domain(format!(
                "shadowing deviation must be >= 0, got {shadow_sigma_db}"
            )));
        }
        Ok(Self {
            c0_db,
            exponent,
            shadow_sigma_db,
        })
    }
}

pub fn path_loss_db(params: &PathLossParams, distance_m: f64, shadow_db: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(domain(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(params.c0_db + 10.0 * params.exponent * distance_m.log10() + shadow_db)
}

pub fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Position and planar-array layout of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGeometry {
    pub position: [f64; 3],
    pub array_rows: usize,
    pub array_cols: usize,
    /// Element spacing over wavelength.
    pub element_spacing_ratio: f64,
}

impl NodeGeometry {
    pub fn new(
        position: [f64; 3],
        array_rows: usize,
        array_cols: usize,
        element_spacing_ratio: f64,
    ) -> Result<Self> {
        if array_rows * array_cols == 0 {
            return Err(domain("array must contain at least one element"));
        }
        if !(element_spacing_ratio >= 0.0 && element_spacing_ratio.is_finite()) {
            return Err(domain("element spacing ratio must be non-negative"));
        }
        Ok(Self {
            position,
            array_rows,
            array_cols,
            element_spacing_ratio,
        })
    }

    /// Near-square layout for `elements` elements: the largest divisor not
    /// above the square root becomes the row count.
    pub fn near_square(position: [f64; 3], elements: usize, element_spacing_ratio: f64) -> Self {
        let (rows, cols) = near_square_factors(elements);
        Self {
            position,
            array_rows: rows,
            array_cols: cols,
            element_spacing_ratio,
        }
    }

    pub fn len(&self) -> usize {
        self.array_rows * self.array_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(rows, cols)` with `rows <= cols`, `rows * cols == n` and `rows` as
/// large as possible. Zero elements maps to `(0, 0)`.
pub fn near_square_factors(n: usize) -> (usize, usize) {
    if n == 0 {
        return (0, 0);
    }
    let mut rows = (n as f64).sqrt() as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    let rows = rows.max(1);
    (rows, n / rows)
}

/// Azimuth/elevation pair in radians. Values are not normalised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub azimuth: f64,
    pub elevation: f64,
}

impl AngleSet {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation }
    }

    /// Both angles uniform on `[0, 2π)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            azimuth: rng.random::<f64>() * 2.0 * PI,
            elevation: rng.random::<f64>() * 2.0 * PI,
        }
    }
}

/// Electrical phase of element `index` (zero-based) of a planar array with
/// `cols` elements per row.
pub fn upa_phase(cols: usize, spacing_ratio: f64, angles: &AngleSet, index: usize) -> f64 {
    let row = (index / cols) as f64;
    let col = (index % cols) as f64;
    2.0 * PI
        * spacing_ratio
        * (row * angles.azimuth.sin() * angles.elevation.sin() + col * angles.elevation.cos())
}

/// Planar-array steering vector; every entry has unit modulus.
pub fn array_response(geometry: &NodeGeometry, angles: &AngleSet) -> Vec<C64> {
    (0..geometry.len())
        .map(|x| {
            C64::from_polar(
                1.0,
                upa_phase(
                    geometry.array_cols,
                    geometry.element_spacing_ratio,
                    angles,
                    x,
                ),
            )
        })
        .collect()
}

/// Line-of-sight directions of one link. `arrival` is the angle at the
/// receiving array, `departure` the angle leaving the transmitting array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosAngles {
    pub arrival: AngleSet,
    pub departure: AngleSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStatistics {
    /// Linear average power gain per antenna pair.
    pub gain: f64,
    /// Linear Rician factor; zero is Rayleigh.
    pub rician_factor: f64,
    pub los: Option<LosAngles>,
}

impl LinkStatistics {
    pub fn rayleigh(gain: f64) -> Result<Self> {
        Self::new(gain, 0.0, None)
    }

    pub fn new(gain: f64, rician_factor: f64, los: Option<LosAngles>) -> Result<Self> {
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(domain(format!("link gain must be > 0, got {gain}")));
        }
        if !(rician_factor >= 0.0 && rician_factor.is_finite()) {
            return Err(domain(format!(
                "rician factor must be >= 0, got {rician_factor}"
            )));
        }
        if (rician_factor > 0.0) != los.is_some() {
            return Err(domain(
                "line-of-sight angles must be given exactly when the rician factor is positive",
            ));
        }
        Ok(Self {
            gain,
            rician_factor,
            los,
        })
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(domain(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// `u · vᴴ`.
    pub fn outer_conj(u: &[C64], v: &[C64]) -> Self {
        let data = u
            .iter()
            .flat_map(|ui| v.iter().map(move |vj| ui * vj.conj()))
            .collect();
        Self {
            rows: u.len(),
            cols: v.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// I.i.d. `CN(0, gain)` entries.
pub fn sample_rayleigh<R: Rng + ?Sized>(rng: &mut R, length: usize, gain: f64) -> Vec<C64> {
    let scale = gain.sqrt();
    (0..length).map(|_| standard_complex(rng) * scale).collect()
}

/// `sqrt(gain/(K+1)) · (sqrt(K)·los + W)` with `W` i.i.d. unit-variance
/// complex Gaussian.
pub fn sample_rician<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    stats: &LinkStatistics,
    los: &CMatrix,
) -> Result<CMatrix> {
    if los.rows != rows || los.cols != cols {
        return Err(domain(format!(
            "LoS matrix is {}x{}, expected {rows}x{cols}",
            los.rows, los.cols
        )));
    }
    Ok(CMatrix {
        rows,
        cols,
        data: rician_entries(
            rng,
            stats.gain,
            stats.rician_factor,
            los.data.iter().copied(),
        ),
    })
}

fn rician_entries<R: Rng + ?Sized>(
    rng: &mut R,
    gain: f64,
    k: f64,
    los: impl Iterator<Item = C64>,
) -> Vec<C64> {
    let scale = (gain / (k + 1.0)).sqrt();
    let los_weight = k.sqrt();
    los.map(|l| (l * los_weight + standard_complex(rng)) * scale)
        .collect()
}

/// One draw of every channel coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `H`, L×N.
    pub h_rdars_bs: CMatrix,
    /// `h`, length N.
    pub h_ue_rdars: Vec<C64>,
    /// `d`, length L.
    pub h_ue_bs: Vec<C64>,
}

impl ChannelRealization {
    /// RDARS–BS vector in the single-antenna convention, where the cascade
    /// reads `h_RBᴴ B h_UR`: the conjugate of the only row of `H`.
    pub fn h_rb_siso(&self) -> Vec<C64> {
        self.h_rdars_bs.row(0).iter().map(|x| x.conj()).collect()
    }

    /// Raw IEEE-754 bits of every coefficient in a fixed order.
    pub fn to_bits(&self) -> Vec<u64> {
        self.h_rdars_bs
            .as_slice()
            .iter()
            .chain(self.h_ue_rdars.iter())
            .chain(self.h_ue_bs.iter())
            .flat_map(|c| [c.re.to_bits(), c.im.to_bits()])
            .collect()
    }
}

/// How shadow fading enters the large-scale gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShadowingMode {
    /// No shadowing term.
    #[default]
    Off,
    /// One draw per link, held for every realization.
    PerScenario,
    /// Fresh draw for every realization.
    PerRealization,
}

/// Statistics and LoS geometry needed to draw realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub bs_antennas: usize,
    pub ue_bs: LinkStatistics,
    pub ue_rdars: LinkStatistics,
    pub rdars_bs: LinkStatistics,
    /// Shadow deviation applied per realization, only used in
    /// [`ShadowingMode::PerRealization`].
    pub per_realization_shadow_db: Option<f64>,
    /// `h̄`, the UE–RDARS LoS vector (length N).
    pub los_ue_rdars: Vec<C64>,
    /// `a_L` of the RDARS–BS LoS, arrival side (length L).
    pub los_bs_arrival: Vec<C64>,
    /// `a_N` of the RDARS–BS LoS, departure side (length N).
    pub los_rdars_departure: Vec<C64>,
}

impl ChannelModel {
    pub fn rdars_elements(&self) -> usize {
        self.los_ue_rdars.len()
    }

    /// Model restricted to a subset of RDARS elements, keeping each kept
    /// element's LoS entries unchanged.
    pub fn restricted_to(&self, elements: &[usize]) -> Self {
        let pick = |v: &[C64]| elements.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Self {
            los_ue_rdars: pick(&self.los_ue_rdars),
            los_rdars_departure: pick(&self.los_rdars_departure),
            ..self.clone()
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let l = self.bs_antennas;
        let n = self.rdars_elements();
        let (g_ub, g_ur, g_rb) = match self.per_realization_shadow_db {
            Some(sigma) if sigma > 0.0 => {
                let mut z = || -> f64 {
                    let s: f64 = StandardNormal.sample(rng);
                    db_to_linear(-sigma * s)
                };
                let (a, b, c) = (z(), z(), z());
                (
                    self.ue_bs.gain * a,
                    self.ue_rdars.gain * b,
                    self.rdars_bs.gain * c,
                )
            }
            _ => (self.ue_bs.gain, self.ue_rdars.gain, self.rdars_bs.gain),
        };

        let h_ue_bs = sample_rayleigh(rng, l, g_ub);
        let h_ue_rdars = rician_entries(
            rng,
            g_ur,
            self.ue_rdars.rician_factor,
            self.los_ue_rdars.iter().copied(),
        );
        let los_big = self.los_bs_arrival.iter().flat_map(|ar| {
            self.los_rdars_departure
                .iter()
                .map(move |dep| ar * dep.conj())
        });
        let h_rdars_bs = CMatrix {
            rows: l,
            cols: n,
            data: rician_entries(rng, g_rb, self.rdars_bs.rician_factor, los_big),
        };

        ChannelRealization {
            h_rdars_bs,
            h_ue_rdars,
            h_ue_bs,
        }
    }
}
