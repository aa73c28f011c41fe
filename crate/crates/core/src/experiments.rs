//! Figure sweeps written as CSV tables with a JSON sidecar.
//!
//! Each figure id pins its own sweep axis, grid, systems and channel model
//! on top of the default scenario; user overrides are applied last.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic::{
    ergodic_rate_from_moments, ergodic_rate_simo_approx, mean_snrs, rate_upper_bound_siso,
    snr_moments_siso, SisoMomentInputs,
};
use crate::channel::{dbm_to_watts, linear_to_db};
use crate::error::{Error, Result};
use crate::montecarlo::{Campaign, GainSamples, Provenance, SweepAxis};
use crate::rdars::PhasePolicy;
use crate::scenario::{ResolvedScenario, Scenario, System};

pub const FIGURE_IDS: [&str; 7] = ["fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6", "fig7"];

/// Build identification baked in at compile time.
pub const GIT_DESCRIBE: &str = env!("RDARS_GIT_DESCRIBE");

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub axis: String,
    pub axis_value: f64,
    pub system: String,
    /// `rate_bps_hz` or `mean_snr_db`.
    pub metric: String,
    pub value: f64,
    pub ci_halfwidth_95: f64,
    pub provenance: Provenance,
    pub scenario_hash: String,
}

pub const CSV_COLUMNS: [&str; 8] = [
    "axis",
    "axis_value",
    "system",
    "metric",
    "value",
    "ci_halfwidth_95",
    "provenance",
    "scenario_hash",
];

/// A curve: one architecture at one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub system: System,
    pub connected: usize,
    pub policy: PhasePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkModel {
    /// Single BS antenna, Rayleigh links, Gamma closed form and bound.
    SingleAntenna,
    /// Multi-antenna BS, Rician links, moment-ratio closed form.
    MultiAntenna,
    /// Closed-form mean SNR only.
    MeanSnr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: &'static str,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub pins: Vec<String>,
    pub series: Vec<Series>,
    pub model: LinkModel,
}

fn series(label: &str, system: System, connected: usize, policy: PhasePolicy) -> Series {
    Series {
        label: label.to_string(),
        system,
        connected,
        policy,
    }
}

fn single_antenna_series() -> Vec<Series> {
    let p = PhasePolicy::OptimalInstantaneous;
    vec![
        series("rdars(a=1)", System::Rdars, 1, p),
        series("rdars(a=2)", System::Rdars, 2, p),
        series("das(a=1)", System::Das, 1, p),
        series("das(a=2)", System::Das, 2, p),
        series("ris", System::Ris, 0, p),
        series("no-surface", System::NoSurface, 0, p),
    ]
}

fn multi_antenna_series() -> Vec<Series> {
    let al = PhasePolicy::StatisticalAligned;
    let id = PhasePolicy::Identity;
    vec![
        series("rdars(a=1,theta=aligned)", System::Rdars, 1, al),
        series("rdars(a=2,theta=aligned)", System::Rdars, 2, al),
        series("rdars(a=1,theta=identity)", System::Rdars, 1, id),
        series("rdars(a=2,theta=identity)", System::Rdars, 2, id),
        series("das(a=1)", System::Das, 1, al),
        series("das(a=2)", System::Das, 2, al),
        series("ris(theta=aligned)", System::Ris, 0, al),
        series("no-surface", System::NoSurface, 0, al),
    ]
}

/// `count` points log-spaced over `[lo, hi]`, rounded to whole numbers.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let mut v: Vec<f64> = (0..count)
        .map(|i| {
            10f64
                .powf(a + (b - a) * i as f64 / (count - 1) as f64)
                .round()
        })
        .collect();
    v.dedup();
    v
}

fn pins(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

const SINGLE_ANTENNA_PINS: [&str; 4] = [
    "bs.antennas=1",
    "fading.rdars_bs_rician_linear=0",
    "fading.ue_rdars_rician_linear=0",
    "simulation.phase_policy=\"optimal-instantaneous\"",
];

pub fn figure_spec(id: &str) -> Result<FigureSpec> {
    let spec = match id {
        "fig3" => FigureSpec {
            id: "fig3",
            axis: SweepAxis::Elements,
            values: log_grid(1e2, 1e7, 50),
            pins: pins(&[
                "bs.antennas=1",
                "rdars.connected=1",
                "path_loss.ue_rdars_gain_db=-70",
                "path_loss.rdars_bs_gain_db=-70",
                "path_loss.ue_bs_gain_db=-70",
                "power.transmit_power_dbm=10",
                "power.noise_bs_dbm=-80",
                "power.noise_rdars_dbm=-80",
            ]),
            series: vec![
                series(
                    "rdars(a=1)",
                    System::Rdars,
                    1,
                    PhasePolicy::OptimalInstantaneous,
                ),
                series("ris", System::Ris, 0, PhasePolicy::OptimalInstantaneous),
                series(
                    "das(a=1)",
                    System::Das,
                    1,
                    PhasePolicy::OptimalInstantaneous,
                ),
                series(
                    "no-surface",
                    System::NoSurface,
                    0,
                    PhasePolicy::OptimalInstantaneous,
                ),
            ],
            model: LinkModel::MeanSnr,
        },
        "fig4a" => FigureSpec {
            id: "fig4a",
            axis: SweepAxis::Elements,
            values: (1..=8).map(|k| 128.0 * k as f64).collect(),
            pins: pins(&SINGLE_ANTENNA_PINS),
            series: single_antenna_series(),
            model: LinkModel::SingleAntenna,
        },
        "fig4b" => FigureSpec {
            id: "fig4b",
            axis: SweepAxis::TransmitPowerDbm,
            values: (-10..=20).map(|p| p as f64).collect(),
            pins: [&SINGLE_ANTENNA_PINS[..], &["rdars.elements=1024"]]
                .concat()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            series: single_antenna_series(),
            model: LinkModel::SingleAntenna,
        },
        "fig5a" => FigureSpec {
            id: "fig5a",
            axis: SweepAxis::Elements,
            values: vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            pins: pins(&["bs.antennas=4"]),
            series: multi_antenna_series(),
            model: LinkModel::MultiAntenna,
        },
        "fig5b" => FigureSpec {
            id: "fig5b",
            axis: SweepAxis::TransmitPowerDbm,
            values: (-10..=20).step_by(2).map(|p| p as f64).collect(),
            pins: pins(&["bs.antennas=4", "rdars.elements=512"]),
            series: multi_antenna_series(),
            model: LinkModel::MultiAntenna,
        },
        "fig6" => FigureSpec {
            id: "fig6",
            axis: SweepAxis::BsAntennas,
            values: (1..=16).map(|l| l as f64).collect(),
            pins: pins(&["rdars.elements=512"]),
            series: multi_antenna_series(),
            model: LinkModel::MultiAntenna,
        },
        "fig7" => FigureSpec {
            id: "fig7",
            axis: SweepAxis::RicianDelta,
            values: vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            pins: pins(&["bs.antennas=4", "rdars.elements=512"]),
            series: multi_antenna_series(),
            model: LinkModel::MultiAntenna,
        },
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    Ok(spec)
}

/// The figure's base scenario: defaults, then figure pins, then `overrides`.
pub fn figure_scenario<S: AsRef<str>>(
    spec: &FigureSpec,
    base: &Scenario,
    overrides: &[S],
) -> Result<Scenario> {
    let pinned = base.with_overrides(&spec.pins)?;
    pinned.with_overrides(overrides)
}

fn series_scenario(s: &Scenario, series: &Series) -> Result<Scenario> {
    let mut out = s.clone();
    out.rdars.connected = series.connected;
    out.rdars.connected_indices = None;
    out.simulation.phase_policy = series.policy;
    out.validate()?;
    Ok(out)
}

fn rate_row(
    spec: &FigureSpec,
    x: f64,
    series: &Series,
    value: f64,
    ci: f64,
    provenance: Provenance,
    hash: &str,
) -> ResultRow {
    ResultRow {
        axis: spec.axis.label().to_string(),
        axis_value: x,
        system: series.label.clone(),
        metric: "rate_bps_hz".to_string(),
        value,
        ci_halfwidth_95: ci,
        provenance,
        scenario_hash: hash.to_string(),
    }
}

fn closed_forms(model: LinkModel, r: &ResolvedScenario) -> Result<Vec<(Provenance, f64)>> {
    match model {
        LinkModel::SingleAntenna => {
            let i = r.siso_moment_inputs()?;
            Ok(vec![
                (
                    Provenance::ClosedForm,
                    ergodic_rate_from_moments(&snr_moments_siso(&i)?)?,
                ),
                (Provenance::UpperBound, rate_upper_bound_siso(&i)?),
            ])
        }
        LinkModel::MultiAntenna => Ok(vec![(
            Provenance::ClosedForm,
            ergodic_rate_simo_approx(&r.simo_inputs()?)?,
        )]),
        LinkModel::MeanSnr => Ok(Vec::new()),
    }
}

fn mean_snr_rows(spec: &FigureSpec, base: &Scenario) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &x in &spec.values {
        for s in &spec.series {
            let sc = series_scenario(&spec.axis.apply(base, x)?, s)?;
            // every system's mean SNR follows from the RDARS inputs
            let g = sc.link_gains()?;
            let inputs = SisoMomentInputs::from_gains(
                sc.rdars.elements,
                spec.series[0].connected,
                g.ue_rdars,
                g.rdars_bs,
                g.ue_bs,
                dbm_to_watts(sc.power.transmit_power_dbm) / dbm_to_watts(sc.power.noise_bs_dbm),
            )?;
            let m = mean_snrs(&inputs)?;
            let v = match s.system {
                System::Rdars => m.rdars,
                System::Ris => m.ris,
                System::Das => m.das,
                System::NoSurface => m.direct_only,
            };
            rows.push(ResultRow {
                axis: spec.axis.label().to_string(),
                axis_value: x,
                system: s.label.clone(),
                metric: "mean_snr_db".to_string(),
                value: linear_to_db(v),
                ci_halfwidth_95: 0.0,
                provenance: Provenance::ClosedForm,
                scenario_hash: sc.hash(),
            });
        }
    }
    Ok(rows)
}

/// Evaluates every series at every grid point.
pub fn figure_rows(spec: &FigureSpec, base: &Scenario) -> Result<Vec<ResultRow>> {
    if spec.model == LinkModel::MeanSnr {
        return mean_snr_rows(spec, base);
    }
    let mut rows = Vec::new();
    if spec.axis == SweepAxis::TransmitPowerDbm {
        for s in &spec.series {
            let sc = series_scenario(base, s)?;
            let campaign = Campaign::new(sc.clone(), s.system);
            let r = campaign.resolve()?;
            let g = GainSamples::draw(
                &r,
                campaign.n_trials,
                campaign.master_seed,
                campaign.parallelism,
            )?;
            for &x in &spec.values {
                let point = spec.axis.apply(&sc, x)?;
                let hash = point.hash();
                let rp = ResolvedScenario {
                    power_w: 10f64.powf((x - 30.0) / 10.0),
                    ..r.clone()
                };
                let mc = g.rate_at(rp.power_w);
                rows.push(rate_row(
                    spec,
                    x,
                    s,
                    mc.mean,
                    mc.ci_halfwidth_95,
                    mc.provenance,
                    &hash,
                ));
                for (prov, v) in closed_forms(spec.model, &rp)? {
                    rows.push(rate_row(spec, x, s, v, 0.0, prov, &hash));
                }
            }
        }
    } else {
        for &x in &spec.values {
            let point = spec.axis.apply(base, x)?;
            for s in &spec.series {
                let sc = series_scenario(&point, s)?;
                let hash = sc.hash();
                let campaign = Campaign::new(sc, s.system);
                let r = campaign.resolve()?;
                let mc = GainSamples::draw(
                    &r,
                    campaign.n_trials,
                    campaign.master_seed,
                    campaign.parallelism,
                )?
                .rate_at(r.power_w);
                rows.push(rate_row(
                    spec,
                    x,
                    s,
                    mc.mean,
                    mc.ci_halfwidth_95,
                    mc.provenance,
                    &hash,
                ));
                for (prov, v) in closed_forms(spec.model, &r)? {
                    rows.push(rate_row(spec, x, s, v, 0.0, prov, &hash));
                }
            }
        }
    }
    // keep each series' rows together regardless of the loop order above
    let order: Vec<&str> = spec.series.iter().map(|s| s.label.as_str()).collect();
    rows.sort_by(|a, b| {
        let ia = order.iter().position(|l| *l == a.system);
        let ib = order.iter().position(|l| *l == b.system);
        ia.cmp(&ib).then(a.axis_value.total_cmp(&b.axis_value))
    });
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub figure: String,
    pub scenario: Scenario,
    pub scenario_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub git_describe: String,
    pub timestamp: String,
    pub wall_time_s: f64,
    pub csv_columns: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub rows: Vec<ResultRow>,
    pub sidecar: Sidecar,
}

/// Runs a figure with `overrides` applied on top of its pins. `seed`
/// replaces the scenario seed when given.
pub fn run_figure<S: AsRef<str>>(
    id: &str,
    overrides: &[S],
    seed: Option<u64>,
) -> Result<FigureOutput> {
    let start = Instant::now();
    let spec = figure_spec(id)?;
    let mut base = figure_scenario(&spec, &Scenario::default(), overrides)?;
    if let Some(s) = seed {
        base.seed = s;
    }
    let rows = figure_rows(&spec, &base)?;
    Ok(FigureOutput {
        rows,
        sidecar: Sidecar {
            figure: spec.id.to_string(),
            scenario_hash: base.hash(),
            seed: base.seed,
            scenario: base,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            git_describe: GIT_DESCRIBE.to_string(),
            timestamp: humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string(),
            wall_time_s: start.elapsed().as_secs_f64(),
            csv_columns: CSV_COLUMNS.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// CSV bytes of `rows`, header first.
pub fn rows_to_csv(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io {
        path: "<memory>".into(),
        source: e.into_error(),
    })
}

/// Sidecar path next to a CSV: `x.csv` → `x.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV and its sidecar.
pub fn write_figure(out: &FigureOutput, csv_path: &Path) -> Result<()> {
    let io = |path: &Path| {
        let p = path.display().to_string();
        move |source| Error::Io { path: p, source }
    };
    std::fs::write(csv_path, rows_to_csv(&out.rows)?).map_err(io(csv_path))?;
    let side = sidecar_path(csv_path);
    let json = serde_json::to_string_pretty(&out.sidecar)?;
    std::fs::write(&side, json + "\n").map_err(io(&side))?;
    Ok(())
}

/// Parses a CSV written by [`write_figure`].
pub fn read_rows(bytes: &[u8]) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(bytes);
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}
