//! GLRT detection of a single point target from the matched-filter statistic
//! `E = Σₙ y[n] x[n]^H`, plus the closed-form detection probabilities.
//!
//! The raw ratio `|a^H E a*|² / (M a^H Rᵀ a)` is exponential with mean `σ²_n`
//! under H₀. The detector multiplies it by `2/σ²_n` so that it follows the
//! central χ²₂ law and thresholds come straight from the χ²₂ quantile.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::numerics::{chi2_central_inv, chi2_noncentral_sf, CMatrix};
use crate::radar::{steering_vector, ArrayGeometry, SteeringVector};
use crate::scalar::Real;

/// Directions with `a^H Rᵀ a ≤ DEGENERATE_FLOOR · M · tr(R)` are unusable.
pub const DEGENERATE_FLOOR: f64 = 1e-10;

pub const DEFAULT_GRID_STEP_DEG: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Target absent.
    H0,
    /// Target present.
    H1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig<T: Real> {
    pfa: T,
    grid: Vec<T>,
    statistic_scaling: T,
}

impl<T: Real> DetectorConfig<T> {
    /// Detector with the χ²₂-calibrating scale `2/σ²_n`.
    pub fn new(pfa: T, grid: Vec<T>, noise_variance: T) -> Result<Self> {
        if !(noise_variance > T::zero()) {
            return Err(Error::Config(format!("noise variance must be positive, got {noise_variance}")));
        }
        Self::with_scaling(pfa, grid, T::lit(2.0) / noise_variance)
    }

    pub fn with_scaling(pfa: T, grid: Vec<T>, statistic_scaling: T) -> Result<Self> {
        if !(pfa > T::zero() && pfa < T::one()) {
            return Err(Error::Config(format!("P_FA must lie in (0, 1), got {pfa}")));
        }
        if grid.is_empty() {
            return Err(Error::Config("angle grid is empty".into()));
        }
        let half_pi = T::lit(FRAC_PI_2);
        if grid.iter().any(|t| !(t.abs() <= half_pi)) {
            return Err(Error::Config("angle grid leaves [-pi/2, pi/2]".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("angle grid must be strictly increasing".into()));
        }
        if !(statistic_scaling > T::zero()) {
            return Err(Error::Config("statistic scaling must be positive".into()));
        }
        Ok(Self { pfa, grid, statistic_scaling })
    }

    pub fn pfa(&self) -> T {
        self.pfa
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn statistic_scaling(&self) -> T {
        self.statistic_scaling
    }

    /// `δ = F⁻¹_{χ²₂}(1 − P_FA)`.
    pub fn threshold(&self) -> T {
        chi2_central_inv(T::one() - self.pfa).expect("P_FA validated in (0, 1)")
    }
}

/// Uniform azimuth grid over `[-90°, 90°]` with the given step in degrees.
pub fn uniform_grid<T: Real>(step_deg: f64) -> Result<Vec<T>> {
    if !(step_deg > 0.0 && step_deg <= 180.0) {
        return Err(Error::Config(format!("grid step must lie in (0, 180] degrees, got {step_deg}")));
    }
    let n = (180.0 / step_deg + 1e-9).floor() as usize;
    let mut grid: Vec<T> = (0..=n)
        .map(|k| T::lit((-90.0 + k as f64 * step_deg).min(90.0).to_radians()))
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Matched-filter statistic `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStatistic<T: Real> {
    pub e: CMatrix<T>,
}

pub fn sufficient_statistic<T: Real>(echo: &CMatrix<T>, transmitted: &CMatrix<T>) -> Result<SufficientStatistic<T>> {
    if echo.shape() != transmitted.shape() {
        return Err(Error::Config(format!(
            "echo is {:?} but the transmitted samples are {:?}",
            echo.shape(),
            transmitted.shape()
        )));
    }
    Ok(SufficientStatistic { e: echo * transmitted.adjoint() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlrtResult<T: Real> {
    pub statistic: T,
    pub angle: T,
    pub decision: Hypothesis,
    pub threshold: T,
    /// Every grid direction was unusable; the decision is forced to H₀.
    pub degenerate: bool,
}

/// `a^H Rᵀ a`, real and non-negative for Hermitian PSD `R`.
pub fn beam_gain<T: Real>(a: &SteeringVector<T>, r: &CMatrix<T>) -> T {
    a.quadratic_form(&r.transpose()).re
}

fn degenerate_floor<T: Real>(r: &CMatrix<T>) -> T {
    let tr = r.diagonal().iter().fold(T::zero(), |acc, z| acc + z.re);
    T::lit(DEGENERATE_FLOOR) * T::from_usize(r.nrows()).unwrap() * tr.max(T::zero())
}

/// Raw ratio `|a^H E a*|² / (M a^H Rᵀ a)`.
pub fn glrt_ratio<T: Real>(e: &SufficientStatistic<T>, r: &CMatrix<T>, a: &SteeringVector<T>) -> Result<T> {
    let gain = beam_gain(a, r);
    if !(gain > degenerate_floor(r)) {
        return Err(Error::DegenerateDirection { value: gain.to_f64_lossy() });
    }
    let conj = a.conj();
    let z = (a.entries.adjoint() * &e.e * conj)[(0, 0)];
    Ok(z.norm_sqr() / (T::from_usize(a.len()).unwrap() * gain))
}

/// Calibrated statistic at a single angle, scaled by `2/σ²_n`.
pub fn glrt_statistic<T: Real>(
    e: &SufficientStatistic<T>,
    r: &CMatrix<T>,
    geom: &ArrayGeometry<T>,
    angle: T,
    noise_variance: T,
) -> Result<T> {
    if !(noise_variance > T::zero()) {
        return Err(Error::Config(format!("noise variance must be positive, got {noise_variance}")));
    }
    let a = steering_vector(geom, angle)?;
    Ok(T::lit(2.0) / noise_variance * glrt_ratio(e, r, &a)?)
}

/// Precomputed steering vectors and beam gains for repeated scans against the
/// same waveform correlation.
#[derive(Debug, Clone)]
pub struct GlrtScanner<T: Real> {
    angles: Vec<T>,
    /// Column `g` holds `conj(a(θ_g))`.
    conj_steering: CMatrix<T>,
    /// `M a^H Rᵀ a / scaling` per grid angle; `None` marks an unusable direction.
    denominators: Vec<Option<T>>,
    threshold: T,
}

impl<T: Real> GlrtScanner<T> {
    pub fn new(geom: &ArrayGeometry<T>, r: &CMatrix<T>, cfg: &DetectorConfig<T>) -> Result<Self> {
        let m = geom.antennas();
        if r.shape() != (m, m) {
            return Err(Error::Config(format!("correlation is {:?}, expected {m}x{m}", r.shape())));
        }
        let floor = degenerate_floor(r);
        let mut conj_steering = CMatrix::zeros(m, cfg.grid().len());
        let mut denominators = Vec::with_capacity(cfg.grid().len());
        for (g, &angle) in cfg.grid().iter().enumerate() {
            let a = steering_vector(geom, angle)?;
            conj_steering.column_mut(g).copy_from(&a.conj());
            let gain = beam_gain(&a, r);
            denominators.push(
                (gain > floor).then(|| T::from_usize(m).unwrap() * gain / cfg.statistic_scaling()),
            );
        }
        Ok(Self { angles: cfg.grid().to_vec(), conj_steering, denominators, threshold: cfg.threshold() })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn usable_directions(&self) -> usize {
        self.denominators.iter().filter(|d| d.is_some()).count()
    }

    /// Beamformed outputs `a(θ_g)^H E a(θ_g)*` for every grid angle.
    pub fn matched_outputs(&self, e: &SufficientStatistic<T>) -> Vec<Complex<T>> {
        // Σ_k conj(a)_k · (E conj(a))_k per grid column
        let projected = &e.e * &self.conj_steering;
        (0..self.angles.len())
            .map(|g| {
                projected
                    .column(g)
                    .iter()
                    .zip(self.conj_steering.column(g).iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (w, u)| acc + *w * *u)
            })
            .collect()
    }

    /// Calibrated statistic for beamformed output `z` at grid index `g`;
    /// `None` for unusable directions.
    pub fn statistic_at(&self, g: usize, z: Complex<T>) -> Option<T> {
        self.denominators[g].map(|d| z.norm_sqr() / d)
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    /// Calibrated statistic at every usable grid angle.
    pub fn statistics(&self, e: &SufficientStatistic<T>) -> Vec<Option<T>> {
        self.matched_outputs(e).into_iter().enumerate().map(|(g, z)| self.statistic_at(g, z)).collect()
    }

    /// Maximum over the grid; ties resolve to the smaller angle.
    pub fn scan(&self, e: &SufficientStatistic<T>) -> Result<GlrtResult<T>> {
        let mut best: Option<(usize, T)> = None;
        for (g, stat) in self.statistics(e).into_iter().enumerate() {
            if let Some(s) = stat {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((g, s));
                }
            }
        }
        let (g, statistic) = best.ok_or(Error::DegenerateTrial)?;
        let decision = if statistic > self.threshold { Hypothesis::H1 } else { Hypothesis::H0 };
        Ok(GlrtResult { statistic, angle: self.angles[g], decision, threshold: self.threshold, degenerate: false })
    }

    /// Like [`scan`](Self::scan), but a grid without usable directions yields a
    /// forced H₀ flagged as degenerate.
    pub fn scan_or_miss(&self, e: &SufficientStatistic<T>) -> GlrtResult<T> {
        self.scan(e).unwrap_or(GlrtResult {
            statistic: T::zero(),
            angle: self.angles[0],
            decision: Hypothesis::H0,
            threshold: self.threshold,
            degenerate: true,
        })
    }
}

/// Grid-search GLRT: maximizes the calibrated statistic over `cfg.grid()` and
/// compares it with the χ²₂ threshold.
pub fn glrt_scan<T: Real>(
    e: &SufficientStatistic<T>,
    r: &CMatrix<T>,
    geom: &ArrayGeometry<T>,
    cfg: &DetectorConfig<T>,
) -> Result<GlrtResult<T>> {
    Ok(GlrtScanner::new(geom, r, cfg)?.scan_or_miss(e))
}

fn check_noise<T: Real>(noise_variance: T) -> Result<()> {
    if noise_variance > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("noise variance must be positive, got {noise_variance}")))
    }
}

/// `M² |α|² / σ²_n`.
pub fn noncentrality_orthogonal<T: Real>(antennas: usize, alpha_sq: T, noise_variance: T) -> Result<T> {
    check_noise(noise_variance)?;
    let m = T::from_usize(antennas).unwrap();
    Ok(m * m * alpha_sq / noise_variance)
}

/// `|α|² / σ²_n · |a^H R̆ᵀ a|²`.
pub fn noncentrality_nsp<T: Real>(a: &SteeringVector<T>, r: &CMatrix<T>, alpha_sq: T, noise_variance: T) -> Result<T> {
    check_noise(noise_variance)?;
    let g2 = a.quadratic_form(&r.transpose()).norm_sqr();
    Ok(alpha_sq / noise_variance * g2)
}

/// `2 |α|² M a^H Rᵀ a / σ²_n`: the noncentrality of the calibrated statistic
/// evaluated at the true angle.
pub fn calibrated_noncentrality<T: Real>(
    a: &SteeringVector<T>,
    r: &CMatrix<T>,
    alpha_sq: T,
    noise_variance: T,
) -> Result<T> {
    check_noise(noise_variance)?;
    let m = T::from_usize(a.len()).unwrap();
    Ok(T::lit(2.0) * alpha_sq * m * beam_gain(a, r).max(T::zero()) / noise_variance)
}

/// `P_D = 1 − F_{χ²₂(ρ)}(F⁻¹_{χ²₂}(1 − P_FA))`.
pub fn theoretical_pd<T: Real>(rho: T, pfa: T) -> Result<T> {
    if !(pfa > T::zero() && pfa < T::one()) {
        return Err(Error::Domain(format!("P_FA must lie in (0, 1), got {pfa}")));
    }
    chi2_noncentral_sf(chi2_central_inv(T::one() - pfa)?, rho)
}

/// Side-by-side theory for one waveform at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPoint<T: Real> {
    pub rho_paper: T,
    pub rho_calibrated: T,
    pub threshold: T,
    pub pd_paper: T,
    pub pd_calibrated: T,
}

/// Theory for waveform correlation `r`. `orthogonal` selects the `M²|α|²/σ²`
/// form of the uncalibrated noncentrality.
pub fn theory_point<T: Real>(
    a: &SteeringVector<T>,
    r: &CMatrix<T>,
    orthogonal: bool,
    alpha_sq: T,
    noise_variance: T,
    pfa: T,
) -> Result<TheoryPoint<T>> {
    let rho_paper = if orthogonal {
        noncentrality_orthogonal(a.len(), alpha_sq, noise_variance)?
    } else {
        noncentrality_nsp(a, r, alpha_sq, noise_variance)?
    };
    let rho_calibrated = calibrated_noncentrality(a, r, alpha_sq, noise_variance)?;
    Ok(TheoryPoint {
        rho_paper,
        rho_calibrated,
        threshold: chi2_central_inv(T::one() - pfa)?,
        pd_paper: theoretical_pd(rho_paper, pfa)?,
        pd_calibrated: theoretical_pd(rho_calibrated, pfa)?,
    })
}
