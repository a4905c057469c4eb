//! Command-line driver: config parsing, presets, and result files.
//!
//! A run writes `results.csv`, `summary.json` and, on request, a gnuplot
//! script `plot.gp` into the output directory. Exit codes: 0 success,
//! 2 configuration error, 3 output directory not writable, 4 numeric failure.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

pub use config::{parse_config, parse_config_str, parse_config_with_base, Preset, RunConfig};
pub use output::{plot_script, results_csv, ChannelInfo, Summary, CSV_HEADER};

use crate::montecarlo::{run_experiment, snr_gap, Crossing, CurveSource, Experiment, ExperimentOutput, SnrGapReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("numeric failure: {0}")]
    Numeric(crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Output { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e.root() {
            crate::Error::Config(msg) => CliError::Config(msg.clone()),
            _ => CliError::Numeric(e),
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "nspsim", version, about = "Monte Carlo detection study for null-space projected MIMO radar waveforms")]
pub struct Args {
    /// TOML config file; its keys override the preset.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Trials per (SNR, P_FA) point.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
    #[arg(long, value_enum, value_name = "NAME")]
    pub preset: Option<Preset>,
    /// Also write a gnuplot script.
    #[arg(long)]
    pub emit_plot: bool,
}

impl Args {
    /// Preset, then config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = self.preset.map(RunConfig::preset).unwrap_or_default();
        let mut cfg = match &self.config {
            Some(path) => parse_config_with_base(path, &base)?,
            None => base,
        };
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials_per_point = trials;
        }
        if let Some(workers) = self.workers {
            cfg.workers = Some(workers);
        }
        cfg.emit_plot |= self.emit_plot;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output: ExperimentOutput,
    pub gap_reports: Vec<SnrGapReport>,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub plot_path: Option<PathBuf>,
    pub wall_time_s: f64,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

/// Gap reports for every P_FA and every curve source.
pub fn gap_reports(output: &ExperimentOutput, target_pd: f64) -> Vec<SnrGapReport> {
    let mut reports = Vec::new();
    for pfa in 0..output.plan.pfa.len() {
        for source in [CurveSource::Empirical, CurveSource::TheoryPaper, CurveSource::TheoryCalibrated] {
            reports.push(snr_gap(&output.curves, pfa, target_pd, source));
        }
    }
    reports
}

fn channel_info(plan: &crate::ExperimentPlan) -> Result<Option<Vec<ChannelInfo>>, CliError> {
    if plan.channel_mode != crate::montecarlo::ChannelMode::FixedPerExperiment || !plan.needs_channels() {
        return Ok(None);
    }
    let exp = Experiment::new(plan.clone())?;
    let state = exp.fixed_state().expect("fixed mode with NSP curves has a channel state");
    Ok(Some(
        state
            .projectors
            .iter()
            .zip(&state.waveforms)
            .enumerate()
            .map(|(i, (p, w))| ChannelInfo {
                bs_id: p.bs_id,
                nullity: p.nullity,
                degradation: state.selection.degradation[i],
                target_gain: w.target_gain.re,
                selected: i == state.selection.index,
            })
            .collect(),
    ))
}

/// Runs the experiment described by `cfg` and writes its result files.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let plan = cfg.to_plan(cfg.resolved_workers()?);
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;

    let started = Instant::now();
    let output = run_experiment(&plan)?;
    let channels = channel_info(&plan)?;
    let gaps = gap_reports(&output, cfg.target_pd);
    let wall_time_s = started.elapsed().as_secs_f64();

    let csv_path = dir.join("results.csv");
    write(&csv_path, &results_csv(&output.curves))?;
    let summary = Summary::new(cfg, &output, &gaps, channels, wall_time_s);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let summary_path = dir.join("summary.json");
    write(&summary_path, &json)?;
    let plot_path = if cfg.emit_plot {
        let path = dir.join("plot.gp");
        write(&path, &plot_script(&output.curves, &plan.pfa, "results.csv"))?;
        Some(path)
    } else {
        None
    };
    Ok(RunReport { output, gap_reports: gaps, csv_path, summary_path, plot_path, wall_time_s })
}

/// Entry point behind the binary; returns the process exit code.
pub fn main_with<I, S>(argv: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = args.resolve().and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            eprintln!("wrote {} ({:.1} s)", report.csv_path.display(), report.wall_time_s);
            for rep in report.gap_reports.iter().filter(|r| r.source == CurveSource::Empirical) {
                let gaps: Vec<String> = rep
                    .entries
                    .iter()
                    .map(|e| match (e.gap_db, e.crossing) {
                        (Some(g), _) => format!("{}={g:.2}", e.curve),
                        (None, Crossing::BelowGrid) => format!("{}=below-grid", e.curve),
                        (None, Crossing::Unreached) => format!("{}=unreached", e.curve),
                        (None, Crossing::At(_)) => format!("{}=no-reference", e.curve),
                    })
                    .collect();
                eprintln!("P_FA={:e} gap at P_D={}: {}", rep.pfa, rep.target_pd, gaps.join(" "));
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
