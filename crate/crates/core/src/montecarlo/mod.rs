//! Seeded Monte Carlo sweeps over SNR and false-alarm grids.
//!
//! Every trial draws its randomness from substreams keyed by the trial index
//! alone, so the same trial produces the same outcome at every SNR point, for
//! every P_FA and on any number of workers. The H₁ noise realization is reused
//! across the SNR grid (common random numbers), which keeps empirical curves
//! monotone in SNR up to detector ties.

mod curve;
mod gap;
mod plan;
mod trial;

pub use curve::{
    run_experiment, wilson_interval, CurvePoint, DetectionCurve, ExperimentOutput, FalseAlarmPoint,
    TheoryMatch,
};
pub use gap::{isotonic_nondecreasing, snr_gap, Crossing, CurveSource, GapEntry, SnrGapReport};
pub use plan::{ChannelMode, CurveKey, DetectorMode, ExperimentPlan, WaveformMode};
pub use trial::{ChannelState, CurveOutcome, Experiment, ModeWaveform, StreamKind, TrialOutcome};
