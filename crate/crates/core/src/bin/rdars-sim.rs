use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdars::experiments::{run_figure, write_figure};
use rdars::scenario::Scenario;
use rdars::{calc, Error};

#[derive(Parser)]
#[command(
    name = "rdars-sim",
    version,
    about = "RDARS rate simulator and calculators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a figure sweep and write CSV plus a JSON sidecar.
    Figure {
        /// fig3, fig4a, fig4b, fig5a, fig5b, fig6 or fig7.
        id: String,
        /// Scenario override, `key=value` with a dotted key.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output CSV path; defaults to `<id>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form calculators; print one JSON object.
    Calc {
        #[command(subcommand)]
        sub: CalcCommand,
    },
    /// Check a scenario file and print its canonical form.
    Validate { file: PathBuf },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file; defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// `N`.
    #[arg(long)]
    elements: Option<usize>,
    /// `a`.
    #[arg(long)]
    connected: Option<usize>,
    /// Start from every link at −70 dB and a 90 dB transmit SNR.
    #[arg(long)]
    mean_snr_preset: bool,
}

#[derive(Subcommand)]
enum CalcCommand {
    SnrMoments(ScenarioArgs),
    GammaFit {
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        second_moment: f64,
    },
    RateSiso(ScenarioArgs),
    RateSimo(ScenarioArgs),
    Bound(ScenarioArgs),
    Threshold(ScenarioArgs),
}

impl ScenarioArgs {
    fn load(&self) -> rdars::Result<Scenario> {
        let mut s = match &self.scenario {
            Some(p) => Scenario::from_file(p)?,
            None => Scenario::default(),
        };
        if self.mean_snr_preset {
            s = s.with_overrides(&calc::MEAN_SNR_PRESET)?;
        }
        let mut ov = self.overrides.clone();
        if let Some(n) = self.elements {
            ov.push(format!("rdars.elements={n}"));
        }
        if let Some(a) = self.connected {
            ov.push(format!("rdars.connected={a}"));
        }
        s.with_overrides(&ov)
    }
}

fn run(cli: Cli) -> rdars::Result<()> {
    match cli.command {
        Command::Figure {
            id,
            overrides,
            out,
            seed,
        } => {
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{id}.csv")));
            let result = run_figure(&id, &overrides, seed)?;
            write_figure(&result, &path)?;
            eprintln!(
                "wrote {} rows to {} in {:.1}s",
                result.rows.len(),
                path.display(),
                result.sidecar.wall_time_s
            );
        }
        Command::Calc { sub } => {
            let v = match sub {
                CalcCommand::SnrMoments(a) => calc::snr_moments(&a.load()?)?,
                CalcCommand::GammaFit {
                    mean,
                    second_moment,
                } => calc::gamma_fit(mean, second_moment)?,
                CalcCommand::RateSiso(a) => calc::rate_siso(&a.load()?)?,
                CalcCommand::RateSimo(a) => calc::rate_simo(&a.load()?)?,
                CalcCommand::Bound(a) => calc::bound(&a.load()?)?,
                CalcCommand::Threshold(a) => calc::threshold(&a.load()?)?,
            };
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Command::Validate { file } => {
            let s = Scenario::from_file(&file)?;
            print!("{}", s.to_canonical_toml());
            eprintln!("ok: scenario hash {}", s.hash());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
