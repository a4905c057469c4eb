//! Colocated MIMO radar model: uniform linear array steering vectors,
//! orthogonal DFT waveforms and range-Doppler-compensated point-target echoes.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, RngStream};
use crate::scalar::Real;

/// Reference system parameters of the simulated radar.
pub mod reference {
    pub const SPEED_OF_LIGHT: f64 = 3.0e8;
    pub const CARRIER_HZ: f64 = 3.55e9;
    /// Element spacing as a fraction of the carrier wavelength.
    pub const SPACING_WAVELENGTHS: f64 = 0.75;
    pub const BS_ANTENNAS: usize = 2;
    // Kinematic parameters below are removed by range-Doppler compensation
    // and kept for documentation only.
    pub const RADIAL_VELOCITY_MPS: f64 = 2000.0;
    pub const TARGET_RANGE_M: f64 = 500.0e3;

    pub fn wavelength() -> f64 {
        SPEED_OF_LIGHT / CARRIER_HZ
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry<T: Real> {
    antennas: usize,
    wavelength: T,
    spacing: T,
}

impl<T: Real> ArrayGeometry<T> {
    pub fn new(antennas: usize, wavelength: T, spacing: T) -> Result<Self> {
        if antennas == 0 {
            return Err(Error::Config("array needs at least one antenna".into()));
        }
        if !(wavelength > T::zero()) || !(spacing > T::zero()) {
            return Err(Error::Config(format!(
                "wavelength ({wavelength}) and element spacing ({spacing}) must be positive"
            )));
        }
        Ok(Self { antennas, wavelength, spacing })
    }

    /// `M`-element array at 3.55 GHz with three-quarter-wavelength spacing.
    pub fn reference(antennas: usize) -> Result<Self> {
        let lambda = reference::wavelength();
        Self::new(antennas, T::lit(lambda), T::lit(lambda * reference::SPACING_WAVELENGTHS))
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn wavelength(&self) -> T {
        self.wavelength
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }
}

/// Array response toward azimuth `angle`, with unit-modulus entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector<T: Real> {
    pub angle: T,
    pub entries: DVector<Complex<T>>,
}

impl<T: Real> SteeringVector<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise conjugate `a*`.
    pub fn conj(&self) -> DVector<Complex<T>> {
        self.entries.map(|z| z.conj())
    }

    /// `a^H B a` for a square matrix `B`.
    pub fn quadratic_form(&self, b: &CMatrix<T>) -> Complex<T> {
        (self.entries.adjoint() * b * &self.entries)[(0, 0)]
    }
}

/// Entry `k` is `exp(−j 2π k d sin θ / λ)`, `k = 0..M−1`.
pub fn steering_vector<T: Real>(geom: &ArrayGeometry<T>, angle: T) -> Result<SteeringVector<T>> {
    if !(angle.abs() <= T::lit(FRAC_PI_2)) {
        return Err(Error::Domain(format!("azimuth {angle} rad outside [-pi/2, pi/2]")));
    }
    let phase_step = -T::lit(2.0 * PI) * geom.spacing * angle.sin() / geom.wavelength;
    let entries = DVector::from_fn(geom.antennas, |k, _| {
        let phase = phase_step * T::from_usize(k).unwrap();
        Complex::new(phase.cos(), phase.sin())
    });
    Ok(SteeringVector { angle, entries })
}

/// `A(θ) = a aᵀ` (plain transpose: transmit and receive share the steering vector).
pub fn transmit_receive_matrix<T: Real>(a: &SteeringVector<T>) -> CMatrix<T> {
    &a.entries * a.entries.transpose()
}

/// `M × L` transmit samples; column `n` is `x[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSet<T: Real> {
    samples: CMatrix<T>,
}

impl<T: Real> WaveformSet<T> {
    pub fn from_samples(samples: CMatrix<T>) -> Self {
        Self { samples }
    }

    pub fn samples(&self) -> &CMatrix<T> {
        &self.samples
    }

    pub fn into_samples(self) -> CMatrix<T> {
        self.samples
    }

    pub fn antennas(&self) -> usize {
        self.samples.nrows()
    }

    pub fn sample_count(&self) -> usize {
        self.samples.ncols()
    }

    /// Sample-sum correlation `Σₙ x[n] x[n]^H`.
    pub fn correlation(&self) -> CMatrix<T> {
        &self.samples * self.samples.adjoint()
    }
}

/// Normalized DFT rows: `x_m[n] = exp(j 2π m n / L) / √L`.
pub fn orthogonal_waveforms<T: Real>(antennas: usize, samples: usize) -> Result<WaveformSet<T>> {
    if antennas == 0 {
        return Err(Error::Config("waveform set needs at least one antenna".into()));
    }
    if samples < antennas {
        return Err(Error::Config(format!(
            "orthogonal waveforms need L >= M (L = {samples}, M = {antennas})"
        )));
    }
    let norm = T::one() / T::from_usize(samples).unwrap().sqrt();
    let l = samples as u64;
    let x = CMatrix::from_fn(antennas, samples, |m, n| {
        // reduce m·n mod L first so the phase stays exact for long windows
        let k = (m as u64 * n as u64) % l;
        let phase = T::lit(2.0 * PI * k as f64 / l as f64);
        Complex::new(phase.cos() * norm, phase.sin() * norm)
    });
    Ok(WaveformSet { samples: x })
}

/// Single point target in white complex Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetScenario<T: Real> {
    pub angle: T,
    pub path_loss: Complex<T>,
    noise_variance: T,
}

impl<T: Real> TargetScenario<T> {
    pub fn new(angle: T, path_loss: Complex<T>, noise_variance: T) -> Result<Self> {
        if !(noise_variance > T::zero()) || !noise_variance.is_finite() {
            return Err(Error::Config(format!("noise variance must be positive, got {noise_variance}")));
        }
        Ok(Self { angle, path_loss, noise_variance })
    }

    /// Noise-free limit, used to inspect the deterministic echo component.
    pub fn noiseless(angle: T, path_loss: Complex<T>) -> Self {
        Self { angle, path_loss, noise_variance: T::zero() }
    }

    pub fn noise_variance(&self) -> T {
        self.noise_variance
    }
}

/// `Y = α A(θ) X + N` with `N` i.i.d. `CN(0, σ²_n)`. `α = 0` gives the target-absent echo.
pub fn synthesize_echo<T: Real>(
    scn: &TargetScenario<T>,
    geom: &ArrayGeometry<T>,
    waveform: &WaveformSet<T>,
    rng: &mut RngStream,
) -> Result<CMatrix<T>> {
    if waveform.antennas() != geom.antennas() {
        return Err(Error::Config(format!(
            "waveform has {} rows but the array has {} antennas",
            waveform.antennas(),
            geom.antennas()
        )));
    }
    let a = steering_vector(geom, scn.angle)?;
    let noise = if scn.noise_variance > T::zero() {
        rng.complex_gaussian_matrix(geom.antennas(), waveform.sample_count(), scn.noise_variance)
    } else {
        CMatrix::zeros(geom.antennas(), waveform.sample_count())
    };
    Ok(echo_with_noise(&transmit_receive_matrix(&a), scn.path_loss, waveform.samples(), noise))
}

/// Deterministic echo `α A X` plus a caller-supplied noise realization.
pub fn echo_with_noise<T: Real>(
    tx_rx: &CMatrix<T>,
    path_loss: Complex<T>,
    samples: &CMatrix<T>,
    mut noise: CMatrix<T>,
) -> CMatrix<T> {
    if path_loss != Complex::new(T::zero(), T::zero()) {
        noise.gemm(path_loss, tx_rx, samples, Complex::new(T::one(), T::zero()));
    }
    noise
}
