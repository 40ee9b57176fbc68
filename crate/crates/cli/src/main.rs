//! `muagg`: run simulations, sweeps, the air-time calculator and traces.

mod presets;
mod settings;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use muagg_core::{scenarios, PhyMacParams, RunMetrics, SimConfig, TraceRecorder};
use serde::Serialize;
use toml::Table;

use presets::PresetKind;
use settings::MissingFile;
use sweep::SweepSpec;

#[derive(Parser)]
#[command(
    name = "muagg",
    version,
    about = "MU-MIMO packet aggregation simulator for 802.11ac downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its metrics as JSON.
    Run(RunArgs),
    /// Run a parameter sweep and write one CSV row per point and replication.
    Sweep(SweepArgs),
    /// Print the transmission-cycle breakdown and the saturation throughput.
    Timing(TimingArgs),
    /// Write the event trace of a run.
    Trace(TraceArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct Source {
    /// Configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Override a configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn table(&self, kind: PresetKind) -> Result<Table> {
        match (&self.config, &self.preset) {
            (Some(path), _) => settings::read_table(path),
            (None, Some(name)) => settings::parse_table(presets::find(name, kind)?.body),
            (None, None) => Ok(Table::new()),
        }
    }

    fn sim_config(&self, kind: PresetKind) -> Result<SimConfig> {
        let mut table = self.table(kind)?;
        settings::apply_overrides(&mut table, &self.set)?;
        if let Some(seed) = self.seed {
            table.insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        settings::to_config(table)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// CSV output path; the resolved specification goes to `<stem>.spec.json`.
    #[arg(long)]
    output: PathBuf,
    /// Worker threads.
    #[arg(long, env = "MUAGG_PARALLEL", default_value_t = 1)]
    parallel: usize,
    /// Append a wall-clock `runtime_s` column.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct TimingArgs {
    /// AP antennas M.
    #[arg(long, short = 'm')]
    antennas: Option<u32>,
    /// Maximum A-MPDU size B.
    #[arg(long, short = 'b')]
    max_ampdu: Option<u64>,
    /// `smax-table`.
    #[arg(long)]
    preset: Option<String>,
    /// Run configuration whose `phy` table supplies the constants.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunOutput<'a> {
    scheduler: &'a str,
    offered_load: f64,
    lambda: f64,
    seed: u64,
    config: &'a SimConfig,
    metrics: &'a RunMetrics,
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = args.source.sim_config(PresetKind::Run)?;
    let metrics = muagg_core::run(&config)?;
    let out = RunOutput {
        scheduler: config.scheduler.as_str(),
        offered_load: config.offered_load_bps(),
        lambda: config.arrival_rate(),
        seed: config.seed,
        config: &config,
        metrics: &metrics,
    };
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(&out)?)?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let src = &args.source;
    let table = match (&src.config, &src.preset) {
        (None, None) => bail!("a sweep needs --config or --preset"),
        _ => src.table(PresetKind::Sweep)?,
    };
    let spec = SweepSpec::from_table(table, &src.set, src.seed)?;
    let results = sweep::execute(&spec, args.parallel)?;
    let file = fs::File::create(&args.output)
        .with_context(|| format!("cannot create {}", args.output.display()))?;
    sweep::write_csv(
        std::io::BufWriter::new(file),
        spec.axis,
        &results,
        args.timings,
    )?;
    let sidecar = sweep::sidecar_path(&args.output);
    fs::write(&sidecar, serde_json::to_string_pretty(&spec)?)
        .with_context(|| format!("cannot write {}", sidecar.display()))?;
    eprintln!("wrote {} rows to {}", results.len(), args.output.display());
    Ok(())
}

fn timing_table(phy: &PhyMacParams, antennas: u32, max_ampdu: u64) -> Result<String> {
    let cycle = phy.cycle_duration(antennas, max_ampdu, antennas)?;
    let s_max = phy.s_max(antennas, max_ampdu)?;
    let mut out = format!(
        "M={antennas} B={max_ampdu}\n{:<10} {:>12}\n",
        "phase", "duration_us"
    );
    for (name, d) in cycle.parts() {
        out.push_str(&format!("{name:<10} {:>12}\n", d.as_micros_f64()));
    }
    out.push_str(&format!(
        "{:<10} {:>12}\n",
        "total",
        cycle.total.as_micros_f64()
    ));
    out.push_str(&format!("{:<10} {:>12.2} Mbps\n", "s_max", s_max / 1e6));
    Ok(out)
}

fn cmd_timing(args: TimingArgs) -> Result<()> {
    let mut table = match &args.config {
        Some(path) => settings::read_table(path)?,
        None => Table::new(),
    };
    settings::apply_overrides(&mut table, &args.set)?;
    let phy: PhyMacParams = match table.remove("phy") {
        Some(v) => v.try_into().context("invalid `phy` table")?,
        None => PhyMacParams::default(),
    };
    phy.validate()?;

    let (antennas, sizes): (Vec<u32>, Vec<u64>) =
        match (&args.preset, args.antennas, args.max_ampdu) {
            (Some(name), _, _) => {
                #[derive(serde::Deserialize)]
                struct Grid {
                    antennas: Vec<u32>,
                    max_ampdu: Vec<u64>,
                }
                let grid: Grid = toml::from_str(presets::find(name, PresetKind::Timing)?.body)?;
                (grid.antennas, grid.max_ampdu)
            }
            (None, Some(m), Some(b)) => (vec![m], vec![b]),
            _ => {
                return Err(UsageError(
                    "timing needs --antennas and --max-ampdu, or --preset".into(),
                )
                .into())
            }
        };
    let mut out = String::new();
    for &m in &antennas {
        for &b in &sizes {
            if m < 1 || b < 1 {
                return Err(
                    UsageError(format!("M and B must be at least 1 (got M={m}, B={b})")).into(),
                );
            }
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&timing_table(&phy, m, b)?);
        }
    }
    std::io::stdout().write_all(out.as_bytes())?;
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<()> {
    let mut recorder = TraceRecorder::default();
    match args.source.preset.as_deref() {
        Some(name) if presets::find(name, PresetKind::Trace).is_ok() => {
            scenarios::run_worked_example(&mut recorder)?;
        }
        _ => {
            let config = args.source.sim_config(PresetKind::Run)?;
            muagg_core::run_with(&config, &mut recorder)?;
        }
    }
    let text = recorder.to_text();
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_presets() {
    for p in presets::PRESETS {
        let kind = match p.kind {
            PresetKind::Run => "run",
            PresetKind::Sweep => "sweep",
            PresetKind::Timing => "timing",
            PresetKind::Trace => "trace",
        };
        println!("{:<16} {:<7} {}", p.name, kind, p.summary);
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Timing(a) => cmd_timing(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<MissingFile>() || err.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
