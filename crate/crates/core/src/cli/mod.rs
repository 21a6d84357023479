//! Batch command-line front end: `run`, `compare` and `sweep`.

pub mod config;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::diagnostics::{box_model_area, fit_froude, BoxModelParams, FroudeFit};
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::run::{box_model_for, run_scenario, scaling_for, RunOutput};
use crate::state::SimConfig;
use config::{canonical_key, load, load_config, parse_list};
use output::{read_trace_csv, write_front_csv, write_snapshot_csv, write_sweep_csv, SweepRow, TraceFile};
use plot::{Chart, Series, Style};

/// Caps the number of scenarios a sweep runs at once.
pub const THREADS_ENV: &str = "HEAVYLAYER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "heavylayer", version, about = "Two-layer shallow-water heavy-gas dispersal solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one scenario and write the front trace, snapshots and a plot.
    Run {
        /// Config file path or bundled config name (krypton_5cm, krypton_10cm, krypton_15cm).
        config: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Comma-separated snapshot times in seconds; replaces output.snapshot_times.
        #[arg(long, value_name = "T1,T2,...")]
        snapshot_times: Option<String>,
    },
    /// Fit the box model to front traces and compare with a reference trace.
    Compare {
        /// Front-trace CSV files written by `run`.
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Reference trace with columns t[s],R[m].
        #[arg(long = "ref", value_name = "CSV")]
        reference: Option<PathBuf>,
        /// Scenario of the traces; defaults to the bundled config named like the trace.
        #[arg(long)]
        config: Option<String>,
        /// Start of the fit window in seconds (default fit.t_min).
        #[arg(long)]
        t_min: Option<f64>,
        /// End of the fit window (default fit.t_max, else the last sample).
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run a scenario once per value of one config key.
    Sweep {
        config: String,
        /// Config key or alias to vary, e.g. drag.c or m_cells.
        #[arg(long)]
        key: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
}

/// Parses arguments, executes the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out_dir, snapshot_times } => cmd_run(&config, &out_dir, snapshot_times.as_deref()),
        Command::Compare { traces, reference, config, t_min, t_max, out_dir } => {
            cmd_compare(&traces, reference.as_deref(), config.as_deref(), (t_min, t_max), &out_dir)
        }
        Command::Sweep { config, key, values, out_dir } => cmd_sweep(&config, &key, &values, &out_dir),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", dir.display()))))
}

fn fit_window(config: &SimConfig, end: f64) -> (f64, f64) {
    (config.fit_window.0, config.fit_window.1.unwrap_or(end))
}

/// Simulated front plus the box-model line at the fitted Froude number.
fn front_chart(title: &str, trace: &[(f64, f64)], params: &BoxModelParams, fit: Option<&FroudeFit>) -> Chart {
    let mut series = vec![Series::new("simulation", trace.to_vec(), Style::Line)];
    if let Some(fit) = fit {
        let p = BoxModelParams { froude: fit.froude, ..*params };
        let line = trace.iter().map(|&(t, _)| (t, (box_model_area(t, &p) / std::f64::consts::PI).sqrt())).collect();
        series.push(Series::new(format!("box model Fr = {:.3}", fit.froude), line, Style::Dashed));
    }
    Chart { title: title.to_string(), x_label: "t [s]".into(), y_label: "R [m]".into(), series }
}

fn write_run_outputs(config: &SimConfig, out: &RunOutput, dir: &Path, prefix: &str) -> Result<Option<FroudeFit>> {
    write_front_csv(&dir.join(format!("{prefix}_front.csv")), &out.trace, &scaling_for(config)?)?;
    for (t, field) in &out.snapshots {
        write_snapshot_csv(&dir.join(format!("{prefix}_snapshot_{t}.csv")), &config.grid, field)?;
    }
    let fit = fit_froude(&out.trace, &box_model_for(config), fit_window(config, out.final_time)).ok();
    front_chart(prefix, out.trace.samples(), &box_model_for(config), fit.as_ref()).save(&dir.join(format!("{prefix}_front.svg")));
    Ok(fit)
}

pub fn cmd_run(source: &str, out_dir: &Path, snapshot_times: Option<&str>) -> Result<()> {
    let mut config = load_config(source)?;
    if let Some(list) = snapshot_times {
        config.snapshot_times = parse_list(list).map_err(|_| Error::Config(format!("bad --snapshot-times `{list}`")))?;
        config.validate()?;
    }
    let out = run_scenario(&config, Execution::default())?;
    create_dir(out_dir)?;
    let fit = write_run_outputs(&config, &out, out_dir, &config.name)?;

    let final_radius = out.trace.samples().last().map_or(0.0, |s| s.1);
    println!("scenario {}: {} steps to t = {} s in {:.2} s", config.name, out.steps, out.final_time, out.elapsed.as_secs_f64());
    println!("final front radius: {final_radius:.4} m");
    match fit {
        Some(f) => {
            let (t0, t1) = fit_window(&config, out.final_time);
            println!("Froude fit over [{t0}, {t1}] s: Fr = {:.4}, R^2 = {:.4}", f.froude, f.area.r_squared);
        }
        None => println!("Froude fit: not enough samples in the fit window"),
    }
    println!("relative mass drift: lower {:.3e}, upper {:.3e}", out.mass_drift.0, out.mass_drift.1);
    println!("minimum heights: h1 = {:.3e} m, h2 = {:.4} m", out.min_height.0, out.min_height.1);
    println!("outputs written to {}", out_dir.display());
    Ok(())
}

fn config_for_trace(trace: &Path, explicit: Option<&str>) -> Result<SimConfig> {
    if let Some(source) = explicit {
        return load_config(source);
    }
    let stem = trace.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    let name = stem.strip_suffix("_front").unwrap_or(stem);
    load_config(name).map_err(|_| Error::Config(format!("cannot infer the scenario of {}; pass --config", trace.display())))
}

/// Maximum and mean relative deviation of `trace` from `reference` at the reference times inside `window`.
pub fn relative_deviation(trace: &crate::diagnostics::FrontTrace, reference: &[(f64, f64)], window: (f64, f64)) -> Option<(f64, f64)> {
    let errs: Vec<f64> = reference
        .iter()
        .filter(|(t, r)| *t >= window.0 && *t <= window.1 && *r > 0.0)
        .filter_map(|&(t, r)| trace.radius_at(t).map(|sim| (sim - r).abs() / r))
        .collect();
    if errs.is_empty() {
        return None;
    }
    let max = errs.iter().copied().fold(0.0, f64::max);
    Some((max, errs.iter().sum::<f64>() / errs.len() as f64))
}

/// Largest (max − min)/mean spread of Σ across curves at common τ values.
pub fn collapse_spread(curves: &[Vec<(f64, f64)>], samples: usize) -> Option<f64> {
    let lo = curves.iter().filter_map(|c| c.first().map(|p| p.0)).fold(f64::NEG_INFINITY, f64::max);
    let hi = curves.iter().filter_map(|c| c.last().map(|p| p.0)).fold(f64::INFINITY, f64::min);
    if curves.len() < 2 || !(hi > lo) || samples < 2 {
        return None;
    }
    let interp = |c: &[(f64, f64)], x: f64| {
        let i = c.partition_point(|p| p.0 < x).clamp(1, c.len() - 1);
        let (a, b) = (c[i - 1], c[i]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    };
    let mut worst = 0.0_f64;
    for k in 0..samples {
        let x = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let vals: Vec<f64> = curves.iter().map(|c| interp(c, x)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let spread = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - vals.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(spread / mean);
    }
    Some(worst)
}

pub fn cmd_compare(
    traces: &[PathBuf],
    reference: Option<&Path>,
    config: Option<&str>,
    window: (Option<f64>, Option<f64>),
    out_dir: &Path,
) -> Result<()> {
    let reference = reference.map(read_trace_csv).transpose()?;
    create_dir(out_dir)?;
    let mut scaled = Vec::new();
    for path in traces {
        let file: TraceFile = read_trace_csv(path)?;
        let cfg = config_for_trace(path, config)?;
        let trace = file.to_trace(&cfg.name, cfg.dam.left.lower.h)?;
        let end = trace.samples().last().map_or(0.0, |s| s.0);
        let default = fit_window(&cfg, end);
        let win = (window.0.unwrap_or(default.0), window.1.unwrap_or(default.1));
        let params = box_model_for(&cfg);
        let fit = fit_froude(&trace, &params, win)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");

        println!("{}: scenario {}", path.display(), cfg.name);
        println!("  fit window [{}, {}] s, {} samples", win.0, win.1, fit.area.samples);
        println!("  Froude number: {:.4} (R^2 = {:.4})", fit.froude, fit.area.r_squared);
        println!("  box-model slope dA/dt: {:.5} m2/s", BoxModelParams { froude: fit.froude, ..params }.area_rate());
        println!("  area residual RMS: {:.3e} m2", fit.area.residual_rms);

        let mut chart = front_chart(stem, trace.samples(), &params, Some(&fit));
        if let Some(r) = &reference {
            match relative_deviation(&trace, &r.samples, win) {
                Some((max, mean)) => println!("  deviation from reference: max {:.2}%, mean {:.2}%", 100.0 * max, 100.0 * mean),
                None => println!("  reference has no samples inside the fit window"),
            }
            chart.series.push(Series::new("reference", r.samples.clone(), Style::Markers));
        }
        chart.save(&out_dir.join(format!("{stem}_compare.svg")));
        if let Some(s) = file.scaled_area() {
            scaled.push((stem.to_string(), s));
        }
    }
    if scaled.len() >= 2 {
        let curves: Vec<_> = scaled.iter().map(|(_, c)| c.clone()).collect();
        if let Some(spread) = collapse_spread(&curves, 200) {
            println!("scaled collapse: max relative spread of Sigma at matched tau = {:.2}%", 100.0 * spread);
        }
        let chart = Chart {
            title: "scaled cloud area".into(),
            x_label: "tau [-]".into(),
            y_label: "Sigma [-]".into(),
            series: scaled.into_iter().map(|(n, c)| Series::new(n, c, Style::Line)).collect(),
        };
        chart.save(&out_dir.join("collapse.svg"));
    }
    Ok(())
}

/// Scenario-level parallelism requested through [`THREADS_ENV`].
pub fn sweep_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

fn sweep_row(value: &str, config: &SimConfig, out: &RunOutput) -> SweepRow {
    let fit = fit_froude(&out.trace, &box_model_for(config), fit_window(config, out.final_time)).ok();
    SweepRow {
        value: value.to_string(),
        froude: fit.map_or(f64::NAN, |f| f.froude),
        r_squared: fit.map_or(f64::NAN, |f| f.area.r_squared),
        final_radius: out.trace.samples().last().map_or(0.0, |s| s.1),
        steps: out.steps,
        mass_drift: out.mass_drift.0.abs().max(out.mass_drift.1.abs()),
    }
}

#[cfg(feature = "parallel")]
fn run_all(configs: &[SimConfig], threads: Option<usize>) -> Vec<Result<RunOutput>> {
    use rayon::prelude::*;
    let workers = threads.unwrap_or_else(rayon::current_num_threads).min(configs.len()).max(1);
    let inner = if workers > 1 { Execution::Sequential } else { Execution::default() };
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| configs.par_iter().map(|c| run_scenario(c, inner)).collect()),
        Err(_) => configs.iter().map(|c| run_scenario(c, Execution::default())).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all(configs: &[SimConfig], _threads: Option<usize>) -> Vec<Result<RunOutput>> {
    configs.iter().map(|c| run_scenario(c, Execution::Sequential)).collect()
}

pub fn cmd_sweep(source: &str, key: &str, values: &str, out_dir: &Path) -> Result<()> {
    let key = canonical_key(key)?;
    let threads = sweep_threads()?;
    let (raw, name) = load(source)?;
    let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    let configs = values
        .iter()
        .map(|v| {
            let mut r = raw.clone();
            r.set(key, v)?;
            let mut cfg = r.build(&name)?;
            cfg.name = format!("{}_{key}_{v}", cfg.name);
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    create_dir(out_dir)?;
    let mut rows = Vec::with_capacity(configs.len());
    for ((value, cfg), out) in values.iter().zip(&configs).zip(run_all(&configs, threads)) {
        let out = out?;
        write_run_outputs(cfg, &out, out_dir, &cfg.name)?;
        rows.push(sweep_row(value, cfg, &out));
    }
    let summary = out_dir.join(format!("sweep_{key}.csv"));
    write_sweep_csv(&summary, &rows)?;

    println!("{:>12} {:>8} {:>8} {:>10} {:>8}", key, "Fr", "R^2", "R_final", "steps");
    for r in &rows {
        println!("{:>12} {:>8.4} {:>8.4} {:>10.4} {:>8}", r.value, r.froude, r.r_squared, r.final_radius, r.steps);
    }
    println!("summary written to {}", summary.display());
    Ok(())
}
