//! Scenario files: a TOML description of one experiment.
//!
//! Every key carries its unit in the name. Missing keys take the defaults
//! of the reference layout (BS at (0, 0, 10) m, surface at (20, 20, 10) m,
//! UE at (200, 0, 1.5) m, 10 dBm transmit power, −80 dBm noise).

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{SimoRateInputs, SisoMomentInputs};
use crate::channel::{
    array_response, db_to_linear, dbm_to_watts, distance, path_loss_db, AngleSet, ChannelModel,
    LinkStatistics, LosAngles, NodeGeometry, PathLossParams, ShadowingMode,
};
use crate::error::{domain, Error, FieldError, Result};
use crate::rdars::{alignment_zeta, f_value, AlignmentPhases, PhasePolicy, RdarsConfiguration};
use crate::snr::NoiseModel;

/// RNG stream reserved for the LoS angle draw.
pub const ANGLE_STREAM: u64 = u64::MAX;
/// RNG stream reserved for the per-scenario shadowing draw.
pub const SHADOW_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub bs: BsSection,
    pub rdars: RdarsSection,
    pub ue: UeSection,
    pub path_loss: PathLossSection,
    pub fading: FadingSection,
    pub power: PowerSection,
    pub angles: AnglesSection,
    pub simulation: SimulationSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsSection {
    pub position_m: [f64; 3],
    /// `L`.
    pub antennas: usize,
    /// Defaults to the near-square factorisation of `antennas`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub array_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RdarsSection {
    pub position_m: [f64; 3],
    /// `N`.
    pub elements: usize,
    /// `a`.
    pub connected: usize,
    /// Zero-based indices of the connected elements; the first `a` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connected_indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub array_rows: Option<usize>,
    pub element_spacing_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UeSection {
    pub position_m: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossSection {
    pub c0_db: f64,
    pub ue_rdars_exponent: f64,
    pub rdars_bs_exponent: f64,
    pub ue_bs_exponent: f64,
    pub shadow_sigma_db: f64,
    pub shadowing: ShadowingMode,
    /// Fixed link gains that bypass the geometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_rdars_gain_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdars_bs_gain_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_bs_gain_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FadingSection {
    /// `δ`, RDARS–BS.
    pub rdars_bs_rician_linear: f64,
    /// `ε`, UE–RDARS.
    pub ue_rdars_rician_linear: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    pub transmit_power_dbm: f64,
    pub noise_bs_dbm: f64,
    pub noise_rdars_dbm: f64,
}

/// Fixed LoS angles as `[azimuth, elevation]` in radians. Absent entries
/// are drawn uniformly on `[0, 2π)` from the scenario seed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnglesSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_rdars_arrival_rad: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdars_bs_departure_rad: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rdars_bs_arrival_rad: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub trials: usize,
    pub parallelism: usize,
    pub phase_policy: PhasePolicy,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            seed: 1,
            bs: BsSection::default(),
            rdars: RdarsSection::default(),
            ue: UeSection::default(),
            path_loss: PathLossSection::default(),
            fading: FadingSection::default(),
            power: PowerSection::default(),
            angles: AnglesSection::default(),
            simulation: SimulationSection::default(),
        }
    }
}

impl Default for BsSection {
    fn default() -> Self {
        Self {
            position_m: [0.0, 0.0, 10.0],
            antennas: 4,
            array_rows: None,
        }
    }
}

impl Default for RdarsSection {
    fn default() -> Self {
        Self {
            position_m: [20.0, 20.0, 10.0],
            elements: 512,
            connected: 1,
            connected_indices: None,
            array_rows: None,
            element_spacing_ratio: 0.5,
        }
    }
}

impl Default for UeSection {
    fn default() -> Self {
        Self {
            position_m: [200.0, 0.0, 1.5],
        }
    }
}

impl Default for PathLossSection {
    fn default() -> Self {
        Self {
            c0_db: 30.0,
            ue_rdars_exponent: 2.5,
            rdars_bs_exponent: 2.0,
            ue_bs_exponent: 3.1,
            shadow_sigma_db: 3.0,
            shadowing: ShadowingMode::Off,
            ue_rdars_gain_db: None,
            rdars_bs_gain_db: None,
            ue_bs_gain_db: None,
        }
    }
}

impl Default for FadingSection {
    fn default() -> Self {
        Self {
            rdars_bs_rician_linear: 10.0,
            ue_rdars_rician_linear: 10.0,
        }
    }
}

impl Default for PowerSection {
    fn default() -> Self {
        Self {
            transmit_power_dbm: 10.0,
            noise_bs_dbm: -80.0,
            noise_rdars_dbm: -80.0,
        }
    }
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            trials: 10_000,
            parallelism: 1,
            phase_policy: PhasePolicy::StatisticalAligned,
        }
    }
}

/// Which architecture to evaluate on a scenario's channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    /// As configured.
    Rdars,
    /// Every element reflecting.
    Ris,
    /// Only the connected elements, reflection removed.
    Das,
    /// No surface: MRC over the direct link.
    NoSurface,
}

impl System {
    pub const ALL: [System; 4] = [System::Rdars, System::Ris, System::Das, System::NoSurface];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Rdars => "rdars",
            Self::Ris => "ris",
            Self::Das => "das",
            Self::NoSurface => "no-surface",
        }
    }
}

/// Linear power gains of the three links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains {
    pub ue_rdars: f64,
    pub rdars_bs: f64,
    pub ue_bs: f64,
}

/// Everything a simulation or closed form needs, derived from a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub model: ChannelModel,
    pub config: RdarsConfiguration,
    pub zeta: AlignmentPhases,
    pub noise: NoiseModel,
    pub power_w: f64,
    pub policy: PhasePolicy,
    pub gains: LinkGains,
    pub delta: f64,
    pub epsilon: f64,
}

fn check(errors: &mut Vec<FieldError>, ok: bool, path: &str, message: impl FnOnce() -> String) {
    if !ok {
        errors.push(FieldError::new(path, message()));
    }
}

impl Scenario {
    /// Parses and validates scenario text. An empty string yields the
    /// default scenario.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| {
            Error::Validation(vec![FieldError::new(
                "<document>",
                e.message().trim().to_string(),
            )])
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let mut e = Vec::new();
        let finite3 = |p: &[f64; 3]| p.iter().all(|x| x.is_finite());

        check(
            &mut e,
            finite3(&self.bs.position_m),
            "bs.position_m",
            || "coordinates must be finite".into(),
        );
        check(
            &mut e,
            finite3(&self.rdars.position_m),
            "rdars.position_m",
            || "coordinates must be finite".into(),
        );
        check(
            &mut e,
            finite3(&self.ue.position_m),
            "ue.position_m",
            || "coordinates must be finite".into(),
        );
        for (path, a, b) in [
            ("ue.position_m", self.ue.position_m, self.bs.position_m),
            (
                "rdars.position_m",
                self.rdars.position_m,
                self.bs.position_m,
            ),
            ("ue.position_m", self.ue.position_m, self.rdars.position_m),
        ] {
            check(&mut e, distance(a, b) > 0.0, path, || {
                "nodes must not coincide".into()
            });
        }

        let l = self.bs.antennas;
        check(&mut e, l >= 1, "bs.antennas", || {
            "need at least one antenna".into()
        });
        if let Some(r) = self.bs.array_rows {
            check(
                &mut e,
                r >= 1 && l.is_multiple_of(r),
                "bs.array_rows",
                || format!("{r} rows do not tile bs.antennas = {l}"),
            );
        }

        let n = self.rdars.elements;
        let a = self.rdars.connected;
        check(&mut e, a <= n, "rdars.connected", || {
            format!("rdars.connected = {a} exceeds rdars.elements = {n}")
        });
        if let Some(r) = self.rdars.array_rows {
            check(
                &mut e,
                r >= 1 && n.is_multiple_of(r),
                "rdars.array_rows",
                || format!("{r} rows do not tile rdars.elements = {n}"),
            );
        }
        if let Some(idx) = &self.rdars.connected_indices {
            check(&mut e, idx.len() == a, "rdars.connected_indices", || {
                format!("{} indices given but rdars.connected = {a}", idx.len())
            });
            let unique: BTreeSet<_> = idx.iter().collect();
            check(
                &mut e,
                unique.len() == idx.len(),
                "rdars.connected_indices",
                || "indices must be distinct".into(),
            );
            check(
                &mut e,
                idx.iter().all(|&i| i < n),
                "rdars.connected_indices",
                || format!("indices must lie in 0..{n}"),
            );
        }
        let s = self.rdars.element_spacing_ratio;
        check(
            &mut e,
            s >= 0.0 && s.is_finite(),
            "rdars.element_spacing_ratio",
            || format!("must be non-negative, got {s}"),
        );

        let pl = &self.path_loss;
        check(&mut e, pl.c0_db.is_finite(), "path_loss.c0_db", || {
            "must be finite".into()
        });
        for (path, v) in [
            ("path_loss.ue_rdars_exponent", pl.ue_rdars_exponent),
            ("path_loss.rdars_bs_exponent", pl.rdars_bs_exponent),
            ("path_loss.ue_bs_exponent", pl.ue_bs_exponent),
        ] {
            check(&mut e, v > 0.0 && v.is_finite(), path, || {
                format!("must be positive, got {v}")
            });
        }
        check(
            &mut e,
            pl.shadow_sigma_db >= 0.0 && pl.shadow_sigma_db.is_finite(),
            "path_loss.shadow_sigma_db",
            || format!("must be non-negative, got {}", pl.shadow_sigma_db),
        );
        for (path, v) in [
            ("path_loss.ue_rdars_gain_db", pl.ue_rdars_gain_db),
            ("path_loss.rdars_bs_gain_db", pl.rdars_bs_gain_db),
            ("path_loss.ue_bs_gain_db", pl.ue_bs_gain_db),
        ] {
            if let Some(v) = v {
                check(&mut e, v.is_finite(), path, || "must be finite".into());
            }
        }

        for (path, v) in [
            (
                "fading.rdars_bs_rician_linear",
                self.fading.rdars_bs_rician_linear,
            ),
            (
                "fading.ue_rdars_rician_linear",
                self.fading.ue_rdars_rician_linear,
            ),
        ] {
            check(&mut e, v >= 0.0 && v.is_finite(), path, || {
                format!("must be non-negative, got {v}")
            });
        }
        for (path, v) in [
            ("power.transmit_power_dbm", self.power.transmit_power_dbm),
            ("power.noise_bs_dbm", self.power.noise_bs_dbm),
            ("power.noise_rdars_dbm", self.power.noise_rdars_dbm),
        ] {
            check(&mut e, v.is_finite(), path, || "must be finite".into());
        }
        for (path, v) in [
            (
                "angles.ue_rdars_arrival_rad",
                self.angles.ue_rdars_arrival_rad,
            ),
            (
                "angles.rdars_bs_departure_rad",
                self.angles.rdars_bs_departure_rad,
            ),
            (
                "angles.rdars_bs_arrival_rad",
                self.angles.rdars_bs_arrival_rad,
            ),
        ] {
            if let Some([az, el]) = v {
                check(&mut e, az.is_finite() && el.is_finite(), path, || {
                    "angles must be finite".into()
                });
            }
        }

        check(
            &mut e,
            self.simulation.trials >= 1,
            "simulation.trials",
            || "need at least one trial".into(),
        );
        check(
            &mut e,
            self.simulation.parallelism >= 1,
            "simulation.parallelism",
            || "need at least one worker".into(),
        );
        if self.simulation.phase_policy == PhasePolicy::OptimalInstantaneous {
            check(&mut e, l == 1, "simulation.phase_policy", || {
                format!("optimal-instantaneous needs bs.antennas = 1, got {l}")
            });
        }

        if e.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(e))
        }
    }

    /// Canonical TOML: every key written, fixed order. Re-parsing it gives
    /// back an identical scenario.
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("scenario always serialises")
    }

    /// First 16 hex digits of the SHA-256 of the canonical form. The
    /// worker count is left out because it never changes results.
    pub fn hash(&self) -> String {
        let mut s = self.clone();
        s.simulation.parallelism = 1;
        let digest = Sha256::digest(s.to_canonical_toml().as_bytes());
        hex::encode(&digest[..8])
    }

    /// Applies `key=value` overrides (dotted paths, TOML values; bare words
    /// are taken as strings) and re-validates.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut root = toml::Table::try_from(self).expect("scenario always serialises");
        let mut errors = Vec::new();
        for raw in overrides {
            let raw = raw.as_ref();
            let Some((key, value)) = raw.split_once('=') else {
                errors.push(FieldError::new(raw, "expected key=value"));
                continue;
            };
            let key = key.trim();
            let value = parse_value(value.trim());
            let parts: Vec<&str> = key.split('.').collect();
            if let Err(msg) = set_path(&mut root, &parts, value) {
                errors.push(FieldError::new(key, msg));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let text = toml::to_string(&root).expect("table serialises");
        Self::from_toml_str(&text)
    }

    /// Derives channel statistics, LoS vectors, the surface configuration
    /// and noise powers. Random angles and per-scenario shadowing come from
    /// dedicated streams of the scenario seed.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        self.validate()?;
        let n = self.rdars.elements;
        let l = self.bs.antennas;

        let mut angle_rng = ChaCha8Rng::seed_from_u64(self.seed);
        angle_rng.set_stream(ANGLE_STREAM);
        // always draw all three so a fixed entry never shifts the others
        let drawn = [
            AngleSet::random(&mut angle_rng),
            AngleSet::random(&mut angle_rng),
            AngleSet::random(&mut angle_rng),
        ];
        let pick = |fixed: Option<[f64; 2]>, d: AngleSet| {
            fixed.map(|[az, el]| AngleSet::new(az, el)).unwrap_or(d)
        };
        let ue_arrival = pick(self.angles.ue_rdars_arrival_rad, drawn[0]);
        let rb_departure = pick(self.angles.rdars_bs_departure_rad, drawn[1]);
        let rb_arrival = pick(self.angles.rdars_bs_arrival_rad, drawn[2]);

        let geometry = |pos, count, rows: Option<usize>, spacing| -> NodeGeometry {
            match rows {
                Some(r) => NodeGeometry {
                    position: pos,
                    array_rows: r,
                    array_cols: count / r,
                    element_spacing_ratio: spacing,
                },
                None => NodeGeometry::near_square(pos, count, spacing),
            }
        };
        let spacing = self.rdars.element_spacing_ratio;
        let rdars_geom = geometry(self.rdars.position_m, n, self.rdars.array_rows, spacing);
        let bs_geom = geometry(self.bs.position_m, l, self.bs.array_rows, spacing);

        let gains = self.link_gains()?;
        let delta = self.fading.rdars_bs_rician_linear;
        let epsilon = self.fading.ue_rdars_rician_linear;
        let los =
            |k: f64, arrival, departure| (k > 0.0).then_some(LosAngles { arrival, departure });

        let los_ue_rdars = if n > 0 {
            array_response(&rdars_geom, &ue_arrival)
        } else {
            Vec::new()
        };
        let los_rdars_departure = if n > 0 {
            array_response(&rdars_geom, &rb_departure)
        } else {
            Vec::new()
        };
        let model = ChannelModel {
            bs_antennas: l,
            ue_bs: LinkStatistics::rayleigh(gains.ue_bs)?,
            ue_rdars: LinkStatistics::new(
                gains.ue_rdars,
                epsilon,
                los(epsilon, ue_arrival, ue_arrival),
            )?,
            rdars_bs: LinkStatistics::new(
                gains.rdars_bs,
                delta,
                los(delta, rb_arrival, rb_departure),
            )?,
            per_realization_shadow_db: (self.path_loss.shadowing == ShadowingMode::PerRealization)
                .then_some(self.path_loss.shadow_sigma_db),
            los_ue_rdars,
            los_bs_arrival: array_response(&bs_geom, &rb_arrival),
            los_rdars_departure,
        };

        let zeta = if n > 0 {
            alignment_zeta(&rdars_geom, &ue_arrival, &rb_departure)
        } else {
            AlignmentPhases { zeta: Vec::new() }
        };
        let connected: BTreeSet<usize> = match &self.rdars.connected_indices {
            Some(idx) => idx.iter().copied().collect(),
            None => (0..self.rdars.connected).collect(),
        };
        let policy = self.simulation.phase_policy;
        let config = RdarsConfiguration::new(n, connected, policy_phases(policy, &zeta))?;

        Ok(ResolvedScenario {
            model,
            config,
            zeta,
            noise: NoiseModel::new(
                dbm_to_watts(self.power.noise_bs_dbm),
                dbm_to_watts(self.power.noise_rdars_dbm),
            )?,
            power_w: dbm_to_watts(self.power.transmit_power_dbm),
            policy,
            gains,
            delta,
            epsilon,
        })
    }

    /// Linear link gains including any per-scenario shadowing draw.
    pub fn link_gains(&self) -> Result<LinkGains> {
        let pl = &self.path_loss;
        let shadow = if pl.shadowing == ShadowingMode::PerScenario {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(SHADOW_STREAM);
            let mut z = || -> f64 {
                let s: f64 = StandardNormal.sample(&mut rng);
                pl.shadow_sigma_db * s
            };
            [z(), z(), z()]
        } else {
            [0.0; 3]
        };
        let gain = |fixed: Option<f64>, exponent, a, b, z| -> Result<f64> {
            match fixed {
                Some(g) => Ok(db_to_linear(g)),
                None => {
                    let params = PathLossParams::new(pl.c0_db, exponent, pl.shadow_sigma_db)?;
                    Ok(db_to_linear(-path_loss_db(&params, distance(a, b), z)?))
                }
            }
        };
        Ok(LinkGains {
            ue_rdars: gain(
                pl.ue_rdars_gain_db,
                pl.ue_rdars_exponent,
                self.ue.position_m,
                self.rdars.position_m,
                shadow[0],
            )?,
            rdars_bs: gain(
                pl.rdars_bs_gain_db,
                pl.rdars_bs_exponent,
                self.rdars.position_m,
                self.bs.position_m,
                shadow[1],
            )?,
            ue_bs: gain(
                pl.ue_bs_gain_db,
                pl.ue_bs_exponent,
                self.ue.position_m,
                self.bs.position_m,
                shadow[2],
            )?,
        })
    }
}

fn policy_phases(policy: PhasePolicy, zeta: &AlignmentPhases) -> Vec<f64> {
    match policy {
        PhasePolicy::StatisticalAligned => zeta.aligned_phases(),
        PhasePolicy::Identity | PhasePolicy::OptimalInstantaneous => vec![0.0; zeta.zeta.len()],
    }
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(
    table: &mut toml::Table,
    parts: &[&str],
    value: toml::Value,
) -> std::result::Result<(), String> {
    match parts {
        [] => Err("empty key".into()),
        [last] => {
            table.insert(last.to_string(), value);
            Ok(())
        }
        [head, rest @ ..] => {
            let entry = table
                .entry(head.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match entry {
                toml::Value::Table(t) => set_path(t, rest, value),
                _ => Err(format!("`{head}` is not a section")),
            }
        }
    }
}

impl ResolvedScenario {
    pub fn bs_antennas(&self) -> usize {
        self.model.bs_antennas
    }

    /// The same channels seen by another architecture.
    pub fn for_system(&self, system: System) -> Result<Self> {
        match system {
            System::Rdars => Ok(self.clone()),
            System::Ris => {
                let n = self.config.n_total();
                let config = RdarsConfiguration::new(
                    n,
                    BTreeSet::new(),
                    policy_phases(self.policy, &self.zeta),
                )?;
                Ok(Self {
                    config,
                    ..self.clone()
                })
            }
            System::Das => self.restricted(&self.config.connected_list()),
            System::NoSurface => self.restricted(&[]),
        }
    }

    fn restricted(&self, keep: &[usize]) -> Result<Self> {
        let m = keep.len();
        Ok(Self {
            model: self.model.restricted_to(keep),
            config: RdarsConfiguration::new(m, (0..m).collect(), vec![0.0; m])?,
            zeta: AlignmentPhases {
                zeta: keep.iter().map(|&i| self.zeta.zeta[i]).collect(),
            },
            ..self.clone()
        })
    }

    /// `|f(A, Θ)|` of the fixed configuration.
    pub fn f_abs(&self) -> Result<f64> {
        Ok(f_value(&self.config, &self.zeta)?.norm())
    }

    /// Inputs of the multi-antenna closed form for this configuration.
    pub fn simo_inputs(&self) -> Result<SimoRateInputs> {
        if self.policy == PhasePolicy::OptimalInstantaneous {
            return Err(domain(
                "the multi-antenna closed form needs fixed phases, not optimal-instantaneous",
            ));
        }
        let i = SimoRateInputs {
            bs_antennas: self.bs_antennas(),
            n_total: self.config.n_total(),
            a: self.config.a(),
            alpha: self.gains.ue_rdars,
            beta: self.gains.rdars_bs,
            gamma: self.gains.ue_bs,
            delta: self.delta,
            epsilon: self.epsilon,
            power: self.power_w,
            noise: self.noise,
            f_abs: self
                .f_abs()?
                .min((self.config.n_total() - self.config.a()) as f64),
        };
        i.validate()?;
        Ok(i)
    }

    /// Inputs of the single-antenna moment formulas. They assume Rayleigh
    /// fading, instantaneous-optimal phases and equal noise powers.
    pub fn siso_moment_inputs(&self) -> Result<SisoMomentInputs> {
        SisoMomentInputs::from_gains(
            self.config.n_total(),
            self.config.a(),
            self.gains.ue_rdars,
            self.gains.rdars_bs,
            self.gains.ue_bs,
            self.power_w / self.noise.sigma_b_sq,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let s = Scenario::from_toml_str("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.path_loss.c0_db, 30.0);
        assert_eq!(s.power.transmit_power_dbm, 10.0);
        assert_eq!(s.rdars.position_m, [20.0, 20.0, 10.0]);
        assert_eq!(s.fading.rdars_bs_rician_linear, 10.0);
    }

    #[test]
    fn connected_above_elements_names_both_fields() {
        let err = Scenario::from_toml_str("[rdars]\nelements = 2\nconnected = 3\n").unwrap_err();
        match err {
            Error::Validation(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].path, "rdars.connected");
                assert!(v[0].message.contains("rdars.elements"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collects_every_violation() {
        let text =
            "[bs]\nantennas = 0\n[path_loss]\nue_bs_exponent = -1.0\n[simulation]\ntrials = 0\n";
        let Error::Validation(v) = Scenario::from_toml_str(text).unwrap_err() else {
            panic!()
        };
        let paths: Vec<_> = v.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"bs.antennas"));
        assert!(paths.contains(&"path_loss.ue_bs_exponent"));
        assert!(paths.contains(&"simulation.trials"));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(
            Scenario::from_toml_str("[rdars]\nelemnts = 4\n"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let s =
            Scenario::from_toml_str("seed = 9\n[rdars]\nelements = 64\nconnected = 2\n").unwrap();
        let c1 = s.to_canonical_toml();
        let s2 = Scenario::from_toml_str(&c1).unwrap();
        assert_eq!(s, s2);
        assert_eq!(c1, s2.to_canonical_toml());
        assert_eq!(s.hash(), s2.hash());
        assert_eq!(s.hash().len(), 16);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let s = Scenario::default()
            .with_overrides(&[
                "rdars.elements=64",
                "simulation.phase_policy=identity",
                "seed = 5",
            ])
            .unwrap();
        assert_eq!(s.rdars.elements, 64);
        assert_eq!(s.simulation.phase_policy, PhasePolicy::Identity);
        assert_eq!(s.seed, 5);
        assert!(Scenario::default()
            .with_overrides(&["rdars.connected=600"])
            .is_err());
        assert!(Scenario::default().with_overrides(&["nonsense"]).is_err());
        assert_ne!(s.hash(), Scenario::default().hash());
    }

    #[test]
    fn default_gains_follow_geometry() {
        let g = Scenario::default().link_gains().unwrap();
        assert!((g.ue_bs - 10f64.powf(-10.134_407_778_611_55)).abs() < 1e-20);
        let d_ur = distance([200.0, 0.0, 1.5], [20.0, 20.0, 10.0]);
        assert!((g.ue_rdars - 10f64.powf(-(30.0 + 25.0 * d_ur.log10()) / 10.0)).abs() < 1e-22);
    }

    #[test]
    fn resolve_defaults() {
        let r = Scenario::default().resolve().unwrap();
        assert_eq!(r.model.bs_antennas, 4);
        assert_eq!(r.config.n_total(), 512);
        assert_eq!(r.config.a(), 1);
        // aligned phases make every reflected LoS term coherent
        assert!((r.f_abs().unwrap() - 511.0).abs() < 1e-9);
        assert!((r.power_w - 0.01).abs() < 1e-15);
        assert!((r.power_w / r.noise.sigma_b_sq - 1e9).abs() < 1e-3);
    }

    #[test]
    fn resolve_is_deterministic_and_seed_dependent() {
        let a = Scenario::default().resolve().unwrap();
        let b = Scenario::default().resolve().unwrap();
        assert_eq!(a, b);
        let c = Scenario {
            seed: 2,
            ..Scenario::default()
        }
        .resolve()
        .unwrap();
        assert_ne!(a.model.los_ue_rdars, c.model.los_ue_rdars);
    }

    #[test]
    fn per_scenario_shadowing_changes_gains() {
        let mut s = Scenario::default();
        let g0 = s.link_gains().unwrap();
        s.path_loss.shadowing = ShadowingMode::PerScenario;
        let g1 = s.link_gains().unwrap();
        assert_ne!(g0, g1);
        assert_eq!(g1, s.link_gains().unwrap());
    }

    #[test]
    fn system_views() {
        let r = Scenario::default()
            .with_overrides(&["rdars.connected=2", "rdars.elements=16"])
            .unwrap()
            .resolve()
            .unwrap();
        let ris = r.for_system(System::Ris).unwrap();
        assert_eq!(ris.config.a(), 0);
        assert!((ris.f_abs().unwrap() - 16.0).abs() < 1e-9);
        let das = r.for_system(System::Das).unwrap();
        assert_eq!(das.config.n_total(), 2);
        assert_eq!(das.config.a(), 2);
        let none = r.for_system(System::NoSurface).unwrap();
        assert_eq!(none.config.n_total(), 0);
        assert_eq!(none.model.rdars_elements(), 0);
    }

    #[test]
    fn instantaneous_policy_needs_single_antenna() {
        assert!(Scenario::from_toml_str(
            "[simulation]\nphase_policy = \"optimal-instantaneous\"\n"
        )
        .is_err());
        assert!(Scenario::from_toml_str(
            "[bs]\nantennas = 1\n[simulation]\nphase_policy = \"optimal-instantaneous\"\n"
        )
        .is_ok());
    }

    #[test]
    fn zero_elements_resolve() {
        let r = Scenario::from_toml_str("[rdars]\nelements = 0\nconnected = 0\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(r.model.rdars_elements(), 0);
    }
}
