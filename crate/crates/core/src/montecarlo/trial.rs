use std::borrow::Cow;

use nalgebra::Complex;

use super::plan::{ChannelMode, CurveKey, DetectorMode, ExperimentPlan};
use crate::detection::{sufficient_statistic, uniform_grid, DetectorConfig, GlrtScanner};
use crate::error::{Error, Result};
use crate::numerics::{rng_substream, CMatrix};
use crate::radar::{orthogonal_waveforms, steering_vector, transmit_receive_matrix, ArrayGeometry, SteeringVector, WaveformSet};
use crate::sharing::{
    draw_channels, project_waveform, projection_matrix, select_channel, ChannelSelection, InterferenceChannel,
    ProjectionMatrix,
};

/// Purpose tag mixed into the RNG stream id; the low 56 bits carry the trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamKind {
    FixedChannels = 1,
    TrialChannels = 2,
    NoiseH1 = 3,
    NoiseH0 = 4,
}

const TRIAL_BITS: u32 = 56;

impl StreamKind {
    pub fn stream_id(self, trial: u64) -> u64 {
        debug_assert!(trial < 1 << TRIAL_BITS);
        ((self as u64) << TRIAL_BITS) | trial
    }
}

/// One transmitted waveform with everything the detector needs precomputed.
#[derive(Debug, Clone)]
pub struct ModeWaveform {
    /// Base station whose null space the waveform lives in; `None` for the
    /// unprojected orthogonal set.
    pub bs_id: Option<usize>,
    pub waveform: WaveformSet<f64>,
    pub correlation: CMatrix<f64>,
    /// `a₀^H Rᵀ a₀` at the true target angle.
    pub target_gain: Complex<f64>,
    scanner: GlrtScanner<f64>,
    /// Noiseless beamformed outputs for `α = 1`.
    signal: Vec<Complex<f64>>,
}

impl ModeWaveform {
    pub fn scanner(&self) -> &GlrtScanner<f64> {
        &self.scanner
    }

    pub fn is_degenerate(&self) -> bool {
        self.scanner.usable_directions() == 0
    }

    /// Grid maximum of the calibrated statistic for echo `α A₀ X + N`, given
    /// the beamformed noise outputs.
    fn grid_max(&self, alpha: f64, noise: &[Complex<f64>]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (g, (s, w)) in self.signal.iter().zip(noise).enumerate() {
            if let Some(stat) = self.scanner.statistic_at(g, *s * alpha + *w) {
                if best.is_none_or(|b| stat > b) {
                    best = Some(stat);
                }
            }
        }
        best
    }
}

/// Channels, projectors and projected waveforms in force for one trial.
#[derive(Debug, Clone)]
pub struct ChannelState {
    pub channels: Vec<InterferenceChannel<f64>>,
    pub projectors: Vec<ProjectionMatrix<f64>>,
    pub selection: ChannelSelection<f64>,
    /// Projected waveform per base station, in id order.
    pub waveforms: Vec<ModeWaveform>,
}

impl ChannelState {
    pub fn selected(&self) -> &ModeWaveform {
        &self.waveforms[self.selection.index]
    }
}

/// Per-curve result of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveOutcome {
    pub key: CurveKey,
    /// Target-absent statistic.
    pub h0: Option<f64>,
    /// Target-present statistic per SNR point; `None` when no direction is usable.
    pub h1: Vec<Option<f64>>,
    pub target_gain: Complex<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub selected_bs: Option<usize>,
    /// One entry per curve, in [`ExperimentPlan::curve_keys`] order.
    pub curves: Vec<CurveOutcome>,
}

impl TrialOutcome {
    pub fn detected(&self, curve: usize, snr: usize, threshold: f64) -> bool {
        self.curves[curve].h1[snr].is_some_and(|s| s > threshold)
    }

    pub fn false_alarm(&self, curve: usize, threshold: f64) -> bool {
        self.curves[curve].h0.is_some_and(|s| s > threshold)
    }

    /// Decision vector over curves at one SNR point and threshold.
    pub fn decisions(&self, snr: usize, threshold: f64) -> Vec<bool> {
        (0..self.curves.len()).map(|c| self.detected(c, snr, threshold)).collect()
    }
}

/// A validated plan with all trial-independent state prepared.
#[derive(Debug, Clone)]
pub struct Experiment {
    plan: ExperimentPlan,
    geom: ArrayGeometry<f64>,
    target: SteeringVector<f64>,
    tx_rx: CMatrix<f64>,
    base: WaveformSet<f64>,
    detector: DetectorConfig<f64>,
    keys: Vec<CurveKey>,
    amplitudes: Vec<f64>,
    orthogonal: ModeWaveform,
    fixed: Option<ChannelState>,
}

impl Experiment {
    pub fn new(plan: ExperimentPlan) -> Result<Self> {
        plan.validate()?;
        if plan.trials_per_point as u64 >= 1 << TRIAL_BITS {
            return Err(Error::Config("trials_per_point: too many trials".into()));
        }
        let geom = ArrayGeometry::new(plan.antennas, plan.wavelength_m, plan.element_spacing_m)?;
        let target = steering_vector(&geom, plan.target_angle_deg.to_radians())?;
        let tx_rx = transmit_receive_matrix(&target);
        let base = orthogonal_waveforms(plan.antennas, plan.samples)?;
        let grid = match plan.detector {
            DetectorMode::Scan => uniform_grid(plan.grid_step_deg)?,
            DetectorMode::TrueAngle => vec![target.angle],
        };
        // The per-pfa thresholds are applied during aggregation; the scanner
        // only needs the 2/σ² scaling with σ² = 1.
        let detector = DetectorConfig::new(plan.pfa[0], grid, 1.0)?;
        let keys = plan.curve_keys();
        let amplitudes = plan.path_loss_amplitudes();
        let mut exp = Self {
            orthogonal: prepare(&geom, &detector, &tx_rx, &target, None, base.clone())?,
            plan,
            geom,
            target,
            tx_rx,
            base,
            detector,
            keys,
            amplitudes,
            fixed: None,
        };
        if exp.plan.needs_channels() && exp.plan.channel_mode == ChannelMode::FixedPerExperiment {
            exp.fixed = Some(exp.build_state(StreamKind::FixedChannels.stream_id(0))?);
        }
        Ok(exp)
    }

    pub fn plan(&self) -> &ExperimentPlan {
        &self.plan
    }

    pub fn geometry(&self) -> &ArrayGeometry<f64> {
        &self.geom
    }

    pub fn curve_keys(&self) -> &[CurveKey] {
        &self.keys
    }

    pub fn target_steering(&self) -> &SteeringVector<f64> {
        &self.target
    }

    pub fn tx_rx(&self) -> &CMatrix<f64> {
        &self.tx_rx
    }

    pub fn base_waveform(&self) -> &WaveformSet<f64> {
        &self.base
    }

    pub fn detector(&self) -> &DetectorConfig<f64> {
        &self.detector
    }

    pub fn orthogonal(&self) -> &ModeWaveform {
        &self.orthogonal
    }

    /// The experiment-wide channel state in fixed mode.
    pub fn fixed_state(&self) -> Option<&ChannelState> {
        self.fixed.as_ref()
    }

    /// Channel state seen by `trial`, or `None` when no NSP mode is enabled.
    pub fn channel_state(&self, trial: u64) -> Result<Option<Cow<'_, ChannelState>>> {
        if !self.plan.needs_channels() {
            return Ok(None);
        }
        Ok(Some(match &self.fixed {
            Some(state) => Cow::Borrowed(state),
            None => Cow::Owned(self.build_state(StreamKind::TrialChannels.stream_id(trial))?),
        }))
    }

    /// The `M × L` unit-variance noise realization of `trial` for one hypothesis.
    pub fn noise(&self, kind: StreamKind, trial: u64) -> CMatrix<f64> {
        rng_substream(self.plan.master_seed, kind.stream_id(trial)).complex_gaussian_matrix(
            self.plan.antennas,
            self.plan.samples,
            1.0,
        )
    }

    /// Waveform transmitted for `key` under `state`.
    pub fn mode_waveform<'a>(&'a self, key: CurveKey, state: Option<&'a ChannelState>) -> &'a ModeWaveform {
        match key {
            CurveKey::Orthogonal => &self.orthogonal,
            CurveKey::PerBs(id) => &state.expect("NSP curve without channel state").waveforms[id - 1],
            CurveKey::Selected => state.expect("NSP curve without channel state").selected(),
        }
    }

    /// Runs one trial at every SNR point. The outcome depends only on the
    /// master seed and `trial`.
    pub fn run_trial(&self, trial: u64) -> Result<TrialOutcome> {
        self.trial_inner(trial).map_err(|e| e.in_trial(trial))
    }

    fn trial_inner(&self, trial: u64) -> Result<TrialOutcome> {
        let state = self.channel_state(trial)?;
        let state = state.as_deref();
        let noise_h1 = self.noise(StreamKind::NoiseH1, trial);
        let noise_h0 = self.noise(StreamKind::NoiseH0, trial);
        let mut curves = Vec::with_capacity(self.keys.len());
        for &key in &self.keys {
            let mode = self.mode_waveform(key, state);
            let samples = mode.waveform.samples();
            let out_h1 = mode.scanner.matched_outputs(&sufficient_statistic(&noise_h1, samples)?);
            let out_h0 = mode.scanner.matched_outputs(&sufficient_statistic(&noise_h0, samples)?);
            curves.push(CurveOutcome {
                key,
                h0: mode.grid_max(0.0, &out_h0),
                h1: self.amplitudes.iter().map(|&alpha| mode.grid_max(alpha, &out_h1)).collect(),
                target_gain: mode.target_gain,
                degenerate: mode.is_degenerate(),
            });
        }
        Ok(TrialOutcome { trial, selected_bs: state.map(|s| s.selection.bs_id), curves })
    }

    fn build_state(&self, stream_id: u64) -> Result<ChannelState> {
        let plan = &self.plan;
        let mut rng = rng_substream(plan.master_seed, stream_id);
        let channels = draw_channels(plan.base_stations, plan.bs_antennas, plan.antennas, &mut rng)?;
        let projectors =
            channels.iter().map(|ch| projection_matrix(ch, plan.rank_tol)).collect::<Result<Vec<_>>>()?;
        let selection = select_channel(&projectors, &self.base)?;
        let waveforms = projectors
            .iter()
            .map(|p| {
                let projected = project_waveform(p, &self.base);
                prepare(&self.geom, &self.detector, &self.tx_rx, &self.target, Some(p.bs_id), projected.waveform().clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelState { channels, projectors, selection, waveforms })
    }
}

fn prepare(
    geom: &ArrayGeometry<f64>,
    detector: &DetectorConfig<f64>,
    tx_rx: &CMatrix<f64>,
    target: &SteeringVector<f64>,
    bs_id: Option<usize>,
    waveform: WaveformSet<f64>,
) -> Result<ModeWaveform> {
    let correlation = waveform.correlation();
    let scanner = GlrtScanner::new(geom, &correlation, detector)?;
    let noiseless = tx_rx * waveform.samples();
    let signal = scanner.matched_outputs(&sufficient_statistic(&noiseless, waveform.samples())?);
    let target_gain = target.quadratic_form(&correlation.transpose());
    Ok(ModeWaveform { bs_id, waveform, correlation, target_gain, scanner, signal })
}
