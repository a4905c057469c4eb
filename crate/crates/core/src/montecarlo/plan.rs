use std::fmt;

use serde::{Deserialize, Serialize};

use crate::detection::DEFAULT_GRID_STEP_DEG;
use crate::error::{Error, Result};
use crate::radar::reference;
use crate::sharing::RANK_TOL_EPS_MULTIPLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMode {
    /// One channel set for the whole experiment.
    FixedPerExperiment,
    /// Fresh channels every trial (every pulse repetition interval).
    RedrawnPerTrial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveformMode {
    Orthogonal,
    NspPerBs,
    NspSelected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorMode {
    /// Grid-search GLRT over the full azimuth grid.
    Scan,
    /// Statistic evaluated at the true target angle only.
    TrueAngle,
}

/// Identifies one detection curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveKey {
    Orthogonal,
    /// Waveform projected onto the null space of base station `id` (1-based).
    PerBs(usize),
    Selected,
}

impl CurveKey {
    pub fn mode(&self) -> WaveformMode {
        match self {
            CurveKey::Orthogonal => WaveformMode::Orthogonal,
            CurveKey::PerBs(_) => WaveformMode::NspPerBs,
            CurveKey::Selected => WaveformMode::NspSelected,
        }
    }

    pub fn mode_label(&self) -> &'static str {
        match self {
            CurveKey::Orthogonal => "orthogonal",
            CurveKey::PerBs(_) => "nsp-per-bs",
            CurveKey::Selected => "nsp-selected",
        }
    }

    pub fn bs_label(&self) -> String {
        match self {
            CurveKey::Orthogonal => "orthogonal".into(),
            CurveKey::PerBs(id) => id.to_string(),
            CurveKey::Selected => "selected".into(),
        }
    }

    pub fn is_nsp(&self) -> bool {
        !matches!(self, CurveKey::Orthogonal)
    }
}

impl fmt::Display for CurveKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKey::PerBs(id) => write!(f, "nsp-bs{id}"),
            other => f.write_str(other.mode_label()),
        }
    }
}

/// Full description of one Monte Carlo sweep. SNR is `|α|²/σ²_n` with
/// `σ²_n = 1` and real positive `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub antennas: usize,
    pub bs_antennas: usize,
    pub base_stations: usize,
    pub samples: usize,
    pub target_angle_deg: f64,
    pub snr_db: Vec<f64>,
    pub pfa: Vec<f64>,
    pub trials_per_point: usize,
    pub master_seed: u64,
    pub channel_mode: ChannelMode,
    pub waveform_modes: Vec<WaveformMode>,
    pub detector: DetectorMode,
    pub grid_step_deg: f64,
    /// Relative singular-value threshold for the numerical rank.
    pub rank_tol: f64,
    pub wavelength_m: f64,
    pub element_spacing_m: f64,
    pub workers: usize,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        let lambda = reference::wavelength();
        Self {
            antennas: 8,
            bs_antennas: reference::BS_ANTENNAS,
            base_stations: 5,
            samples: 64,
            target_angle_deg: 10.0,
            snr_db: (-20..=20).map(f64::from).collect(),
            pfa: vec![1e-1, 1e-3, 1e-5, 1e-7],
            trials_per_point: 10_000,
            master_seed: 42,
            channel_mode: ChannelMode::FixedPerExperiment,
            waveform_modes: vec![WaveformMode::Orthogonal, WaveformMode::NspPerBs, WaveformMode::NspSelected],
            detector: DetectorMode::Scan,
            grid_step_deg: DEFAULT_GRID_STEP_DEG,
            rank_tol: RANK_TOL_EPS_MULTIPLE * f64::EPSILON,
            wavelength_m: lambda,
            element_spacing_m: reference::SPACING_WAVELENGTHS * lambda,
            workers: 1,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if self.antennas == 0 {
            return fail("antennas", "must be at least 1".into());
        }
        if self.bs_antennas == 0 {
            return fail("bs_antennas", "must be at least 1".into());
        }
        if self.base_stations == 0 {
            return fail("base_stations", "must be at least 1".into());
        }
        if self.samples < self.antennas {
            return fail("samples", format!("L = {} must be >= M = {}", self.samples, self.antennas));
        }
        if !(self.target_angle_deg.abs() <= 90.0) {
            return fail("target_angle_deg", format!("{} outside [-90, 90]", self.target_angle_deg));
        }
        if self.snr_db.is_empty() {
            return fail("snr_db", "must not be empty".into());
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return fail("snr_db", "values must be finite".into());
        }
        if self.snr_db.windows(2).any(|w| !(w[0] < w[1])) {
            return fail("snr_db", "values must be strictly increasing".into());
        }
        if self.pfa.is_empty() {
            return fail("pfa", "must not be empty".into());
        }
        if let Some(p) = self.pfa.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return fail("pfa", format!("{p} outside (0, 1)"));
        }
        if self.trials_per_point == 0 {
            return fail("trials_per_point", "must be at least 1".into());
        }
        if self.waveform_modes.is_empty() {
            return fail("waveform_modes", "must enable at least one mode".into());
        }
        if !(self.grid_step_deg > 0.0 && self.grid_step_deg <= 180.0) {
            return fail("grid_step_deg", format!("{} outside (0, 180]", self.grid_step_deg));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return fail("rank_tol", format!("{} outside (0, 1)", self.rank_tol));
        }
        if !(self.wavelength_m > 0.0) {
            return fail("wavelength_m", "must be positive".into());
        }
        if !(self.element_spacing_m > 0.0) {
            return fail("element_spacing_m", "must be positive".into());
        }
        if self.workers == 0 {
            return fail("workers", "must be at least 1".into());
        }
        Ok(())
    }

    pub fn has_mode(&self, mode: WaveformMode) -> bool {
        self.waveform_modes.contains(&mode)
    }

    /// Curves produced by this plan, in output order.
    pub fn curve_keys(&self) -> Vec<CurveKey> {
        let mut keys = Vec::new();
        if self.has_mode(WaveformMode::Orthogonal) {
            keys.push(CurveKey::Orthogonal);
        }
        if self.has_mode(WaveformMode::NspPerBs) {
            keys.extend((1..=self.base_stations).map(CurveKey::PerBs));
        }
        if self.has_mode(WaveformMode::NspSelected) {
            keys.push(CurveKey::Selected);
        }
        keys
    }

    pub fn needs_channels(&self) -> bool {
        self.has_mode(WaveformMode::NspPerBs) || self.has_mode(WaveformMode::NspSelected)
    }

    /// `|α|` for each SNR point.
    pub fn path_loss_amplitudes(&self) -> Vec<f64> {
        self.snr_db.iter().map(|db| 10f64.powf(db / 20.0)).collect()
    }
}
