use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::montecarlo::{ChannelMode, DetectorMode, ExperimentPlan, WaveformMode};
use crate::radar::reference;

/// Named parameter sets for the standard scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 2x4 channels, five base stations, single P_FA panel.
    Fig3,
    /// 2x4 channels, five base stations, four P_FA panels.
    Fig4,
    /// 2x8 channels, five base stations, four P_FA panels.
    Fig5,
}

/// Everything a run needs. Parsed from flat TOML; unknown keys are rejected
/// and missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub antennas: usize,
    pub bs_antennas: usize,
    pub base_stations: usize,
    pub samples: usize,
    pub target_angle_deg: f64,
    pub snr_db: Vec<f64>,
    pub pfa: Vec<f64>,
    pub trials_per_point: usize,
    pub seed: u64,
    pub channel_mode: ChannelMode,
    pub waveform_modes: Vec<WaveformMode>,
    pub detector: DetectorMode,
    pub grid_step_deg: f64,
    pub rank_tol: f64,
    pub carrier_hz: f64,
    pub spacing_wavelengths: f64,
    /// Worker threads; when absent, `NSPSIM_THREADS` or the core count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub target_pd: f64,
    pub output_dir: PathBuf,
    pub emit_plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plan = ExperimentPlan::default();
        Self {
            antennas: plan.antennas,
            bs_antennas: plan.bs_antennas,
            base_stations: plan.base_stations,
            samples: plan.samples,
            target_angle_deg: plan.target_angle_deg,
            snr_db: plan.snr_db,
            pfa: plan.pfa,
            trials_per_point: plan.trials_per_point,
            seed: plan.master_seed,
            channel_mode: plan.channel_mode,
            waveform_modes: plan.waveform_modes,
            detector: plan.detector,
            grid_step_deg: plan.grid_step_deg,
            rank_tol: plan.rank_tol,
            carrier_hz: reference::CARRIER_HZ,
            spacing_wavelengths: reference::SPACING_WAVELENGTHS,
            workers: None,
            target_pd: 0.9,
            output_dir: PathBuf::from("results"),
            emit_plot: false,
        }
    }
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = Self::default();
        match preset {
            Preset::Fig3 => Self { antennas: 4, pfa: vec![1e-3], ..base },
            Preset::Fig4 => Self { antennas: 4, ..base },
            Preset::Fig5 => Self { antennas: 8, ..base },
        }
    }

    pub fn wavelength_m(&self) -> f64 {
        reference::SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Plan for this config. `workers` must already be resolved.
    pub fn to_plan(&self, workers: usize) -> ExperimentPlan {
        let lambda = self.wavelength_m();
        ExperimentPlan {
            antennas: self.antennas,
            bs_antennas: self.bs_antennas,
            base_stations: self.base_stations,
            samples: self.samples,
            target_angle_deg: self.target_angle_deg,
            snr_db: self.snr_db.clone(),
            pfa: self.pfa.clone(),
            trials_per_point: self.trials_per_point,
            master_seed: self.seed,
            channel_mode: self.channel_mode,
            waveform_modes: self.waveform_modes.clone(),
            detector: self.detector,
            grid_step_deg: self.grid_step_deg,
            rank_tol: self.rank_tol,
            wavelength_m: lambda,
            element_spacing_m: self.spacing_wavelengths * lambda,
            workers,
        }
    }

    /// Worker count from the config, else `NSPSIM_THREADS`, else the number
    /// of available cores.
    pub fn resolved_workers(&self) -> Result<usize, CliError> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var("NSPSIM_THREADS") {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Config(format!("NSPSIM_THREADS: expected a positive integer, got {v:?}"))),
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(CliError::Config(format!("carrier_hz: {} must be positive", self.carrier_hz)));
        }
        if !(self.spacing_wavelengths > 0.0 && self.spacing_wavelengths.is_finite()) {
            return Err(CliError::Config(format!(
                "spacing_wavelengths: {} must be positive",
                self.spacing_wavelengths
            )));
        }
        if !(self.target_pd > 0.0 && self.target_pd < 1.0) {
            return Err(CliError::Config(format!("target_pd: {} outside (0, 1)", self.target_pd)));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers: must be at least 1".into()));
        }
        self.to_plan(self.workers.unwrap_or(1)).validate().map_err(CliError::from)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }
}

/// Parses `text` on top of `base`: keys present in the text replace the
/// corresponding fields of `base`. The result is validated.
pub fn parse_config_str(text: &str, base: &RunConfig) -> Result<RunConfig, CliError> {
    let overrides: toml::Table = text.parse().map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
    let mut merged =
        toml::Table::try_from(base).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))?;
    merged.extend(overrides);
    let cfg: RunConfig = merged.try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file over the defaults.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    parse_config_with_base(path, &RunConfig::default())
}

pub fn parse_config_with_base(path: &Path, base: &RunConfig) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_str(&text, base)
}
