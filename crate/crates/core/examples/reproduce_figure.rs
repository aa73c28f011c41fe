//! Run a figure sweep and write its CSV and JSON sidecar.
//!
//! `cargo run --release --example reproduce_figure -- fig4a out.csv`

use std::path::PathBuf;

use rdars::experiments::{run_figure, sidecar_path, write_figure};

fn main() -> rdars::Result<()> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "fig3".into());
    let out = PathBuf::from(args.next().unwrap_or_else(|| format!("{id}.csv")));
    let overrides: Vec<String> = args.collect();
    let result = run_figure(&id, &overrides, None)?;
    write_figure(&result, &out)?;
    println!(
        "{} rows -> {} (+ {}), {:.1}s",
        result.rows.len(),
        out.display(),
        sidecar_path(&out).display(),
        result.sidecar.wall_time_s
    );
    Ok(())
}
