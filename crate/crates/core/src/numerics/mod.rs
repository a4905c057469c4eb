//! Numerical substrate: complex linear algebra, two-degree-of-freedom
//! chi-squared statistics and deterministic random substreams.

mod chi2;
mod linalg;
mod rng;

pub use chi2::{
    chi2_central_cdf, chi2_central_inv, chi2_central_sf, chi2_noncentral_sf, marcum_q1, Chi2Pair,
};
pub use linalg::{
    frobenius, hermitian_eigenvalues, is_finite, numerical_rank, svd, trace, CMatrix, Svd,
};
pub use rng::{rng_substream, RngStream};
