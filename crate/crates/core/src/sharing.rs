//! Spectrum sharing: interference channels, null-space projectors, minimum
//! degradation channel selection and waveform projection.

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::numerics::{frobenius, numerical_rank, svd, CMatrix, RngStream};
use crate::radar::WaveformSet;
use crate::scalar::Real;

/// Relative singular-value threshold, in units of machine epsilon, below which
/// a direction counts as part of the null space.
pub const RANK_TOL_EPS_MULTIPLE: f64 = 100.0;

pub fn default_rank_tol<T: Real>() -> T {
    T::lit(RANK_TOL_EPS_MULTIPLE) * T::eps()
}

/// Channel from the radar's `M` antennas to base station `bs_id` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceChannel<T: Real> {
    pub bs_id: usize,
    pub h: CMatrix<T>,
}

/// Orthogonal projector onto the null space of one interference channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix<T: Real> {
    pub bs_id: usize,
    pub p: CMatrix<T>,
    pub nullity: usize,
}

impl<T: Real> ProjectionMatrix<T> {
    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// No null space: every waveform is projected to zero.
    pub fn is_degenerate(&self) -> bool {
        self.nullity == 0
    }

    pub fn hermitian_defect(&self) -> T {
        frobenius(&(&self.p - self.p.adjoint()))
    }

    pub fn idempotent_defect(&self) -> T {
        frobenius(&(&self.p * &self.p - &self.p))
    }

    /// `‖H P‖_F / max(1, ‖H‖_F)`.
    pub fn leakage(&self, channel: &InterferenceChannel<T>) -> T {
        frobenius(&(&channel.h * &self.p)) / frobenius(&channel.h).max(T::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSelection<T: Real> {
    /// 1-based id of the selected base station.
    pub bs_id: usize,
    /// Position of the selection in the projector list.
    pub index: usize,
    /// `‖P_i X − X‖_F` for every candidate, in list order.
    pub degradation: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedWaveform<T: Real> {
    waveform: WaveformSet<T>,
    correlation: CMatrix<T>,
}

impl<T: Real> ProjectedWaveform<T> {
    pub fn waveform(&self) -> &WaveformSet<T> {
        &self.waveform
    }

    pub fn samples(&self) -> &CMatrix<T> {
        self.waveform.samples()
    }

    pub fn correlation(&self) -> &CMatrix<T> {
        &self.correlation
    }
}

/// `count` channels of i.i.d. `CN(0, 1)` entries, ids `1..=count`.
pub fn draw_channels<T: Real>(
    count: usize,
    bs_antennas: usize,
    radar_antennas: usize,
    rng: &mut RngStream,
) -> Result<Vec<InterferenceChannel<T>>> {
    if count == 0 || bs_antennas == 0 || radar_antennas == 0 {
        return Err(Error::Config(format!(
            "channel draw needs K, N_BS, M >= 1 (got {count}, {bs_antennas}, {radar_antennas})"
        )));
    }
    Ok((1..=count)
        .map(|bs_id| InterferenceChannel {
            bs_id,
            h: rng.complex_gaussian_matrix(bs_antennas, radar_antennas, T::one()),
        })
        .collect())
}

/// `P = V Σ' V^H` where `Σ'` keeps the right-singular directions beyond the
/// numerical rank of `H`.
pub fn projection_matrix<T: Real>(ch: &InterferenceChannel<T>, rank_tol: T) -> Result<ProjectionMatrix<T>> {
    let m = ch.h.ncols();
    let dec = svd(&ch.h)?;
    let rank = numerical_rank(&dec.singular_values, ch.h.shape(), rank_tol);
    let selector = DVector::from_fn(m, |u, _| {
        if u < rank {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        }
    });
    let p = &dec.v * CMatrix::from_diagonal(&selector) * dec.v.adjoint();
    Ok(ProjectionMatrix { bs_id: ch.bs_id, p, nullity: m - rank })
}

/// Picks the projector that removes the least waveform energy; ties go to the
/// earliest candidate.
pub fn select_channel<T: Real>(
    projs: &[ProjectionMatrix<T>],
    waveform: &WaveformSet<T>,
) -> Result<ChannelSelection<T>> {
    if projs.is_empty() {
        return Err(Error::Config("channel selection needs at least one projector".into()));
    }
    let x = waveform.samples();
    let mut degradation = Vec::with_capacity(projs.len());
    for proj in projs {
        if proj.dim() != x.nrows() {
            return Err(Error::Config(format!(
                "projector for BS {} is {}x{} but the waveform has {} antennas",
                proj.bs_id,
                proj.dim(),
                proj.dim(),
                x.nrows()
            )));
        }
        degradation.push(frobenius(&(&proj.p * x - x)));
    }
    let mut index = 0;
    for (i, d) in degradation.iter().enumerate().skip(1) {
        if *d < degradation[index] {
            index = i;
        }
    }
    Ok(ChannelSelection { bs_id: projs[index].bs_id, index, degradation })
}

/// `X̆ = P X` together with its correlation `Σₙ x̆[n] x̆[n]^H`.
pub fn project_waveform<T: Real>(proj: &ProjectionMatrix<T>, waveform: &WaveformSet<T>) -> ProjectedWaveform<T> {
    let samples = &proj.p * waveform.samples();
    let projected = WaveformSet::from_samples(samples);
    let correlation = projected.correlation();
    ProjectedWaveform { waveform: projected, correlation }
}

/// `‖H X̆‖_F / max(1, ‖H‖_F ‖X̆‖_F)`.
pub fn residual_interference<T: Real>(ch: &InterferenceChannel<T>, projected: &ProjectedWaveform<T>) -> Result<T> {
    let x = projected.samples();
    if ch.h.ncols() != x.nrows() {
        return Err(Error::Config(format!(
            "channel has {} columns but the waveform has {} rows",
            ch.h.ncols(),
            x.nrows()
        )));
    }
    let scale = (frobenius(&ch.h) * frobenius(x)).max(T::one());
    Ok(frobenius(&(&ch.h * x)) / scale)
}
