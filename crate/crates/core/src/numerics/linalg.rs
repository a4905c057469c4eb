use faer::{c64, Mat, MatRef, Side};
use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix used for channels, projectors, waveforms and statistics.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Singular value decomposition `H = U diag(σ) V^H`.
///
/// `u` is `rows × p` and `singular_values` has length `p = min(rows, cols)`.
/// `v` is always the full `cols × cols` unitary matrix: its first `p` columns
/// pair with the singular values and the trailing `cols − p` columns complete
/// the basis (they span part of the null space of `H`).
#[derive(Debug, Clone)]
pub struct Svd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: CMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn rank_count(&self) -> usize {
        self.singular_values.len()
    }

    /// `U diag(σ) V_p^H` using the first `p` columns of `V`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let p = self.rank_count();
        let mut scaled = self.u.clone();
        for (k, s) in self.singular_values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(*s);
        }
        scaled * self.v.columns(0, p).adjoint()
    }
}

pub fn is_finite<T: Real>(m: &CMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter()
        .fold(T::zero(), |acc, z| acc + z.re * z.re + z.im * z.im)
        .sqrt()
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diagonal().iter().fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + *z)
}

fn to_faer<T: Real>(m: &CMatrix<T>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        c64::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    })
}

fn from_faer<T: Real>(m: MatRef<'_, c64>) -> CMatrix<T> {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(T::lit(z.re), T::lit(z.im))
    })
}

/// Singular value decomposition with descending singular values and a full `V`.
///
/// The factorization runs in double precision regardless of `T`.
pub fn svd<T: Real>(h: &CMatrix<T>) -> Result<Svd<T>> {
    let (rows, cols) = h.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::Domain(format!("cannot decompose a {rows}x{cols} matrix")));
    }
    if !is_finite(h) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let dec = to_faer(h).svd().map_err(|_| Error::NumericFailure { rows, cols })?;
    let p = rows.min(cols);
    let singular_values = dec.S().column_vector().iter().take(p).map(|s| T::lit(s.re)).collect();
    let u = from_faer(dec.U().subcols(0, p));
    let v = from_faer(dec.V());
    Ok(Svd { u, singular_values, v })
}

/// Number of singular values above `rel_tol · σ_max · max(rows, cols)`.
pub fn numerical_rank<T: Real>(singular_values: &[T], shape: (usize, usize), rel_tol: T) -> usize {
    let sigma_max = singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if sigma_max <= T::zero() {
        return 0;
    }
    let dim = T::from_usize(shape.0.max(shape.1)).unwrap();
    let cutoff = rel_tol * sigma_max * dim;
    singular_values.iter().filter(|s| **s > cutoff).count()
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let herm = (m + m.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let vals = to_faer(&herm)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigenvalue iteration converges for finite input");
    vals.into_iter().map(T::lit).collect()
}
