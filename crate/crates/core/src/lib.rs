//! Monte Carlo study of target detection by a colocated MIMO radar that
//! projects its waveform onto the null space of a radar-to-base-station
//! interference channel.
//!
//! The numeric modules are generic over the [`Real`] scalar (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`, which is what the simulator and
//! CLI use.

// Validation uses `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod detection;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod radar;
pub mod scalar;
pub mod sharing;

pub use error::{Error, Result};
pub use montecarlo::{run_experiment, DetectionCurve, ExperimentPlan};
pub use scalar::Real;

pub type ComplexMatrix = numerics::CMatrix<f64>;
pub type ComplexMatrix32 = numerics::CMatrix<f32>;
pub type Chi2Pair = numerics::Chi2Pair<f64>;
pub type ArrayGeometry = radar::ArrayGeometry<f64>;
pub type SteeringVector = radar::SteeringVector<f64>;
pub type WaveformSet = radar::WaveformSet<f64>;
pub type TargetScenario = radar::TargetScenario<f64>;
pub type InterferenceChannel = sharing::InterferenceChannel<f64>;
pub type ProjectionMatrix = sharing::ProjectionMatrix<f64>;
pub type ChannelSelection = sharing::ChannelSelection<f64>;
pub type ProjectedWaveform = sharing::ProjectedWaveform<f64>;
pub type DetectorConfig = detection::DetectorConfig<f64>;
pub type GlrtResult = detection::GlrtResult<f64>;
pub type TheoryPoint = detection::TheoryPoint<f64>;
