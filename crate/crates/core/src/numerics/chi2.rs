//! Chi-squared laws with two degrees of freedom.
//!
//! The central law is exponential with mean 2, so its CDF, survival function
//! and quantile are closed forms. The noncentral survival function is the
//! first-order Marcum Q function, evaluated as a Poisson mixture:
//!
//! ```text
//! P(χ²₂(ρ) > x) = Σ_j Pois(j; ρ/2) · P(Pois(x/2) ≤ j)
//! ```
//!
//! Both Poisson weights are generated by recurrence from a log-space anchor
//! inside a window around their means, so large noncentralities do not
//! underflow.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Half-width of the Poisson summation window in standard deviations.
const WINDOW_SIGMAS: f64 = 12.0;
/// Relative tail bound at which the series is truncated.
const SERIES_TRUNCATION: f64 = 1e-14;

/// Chi-squared distribution with two degrees of freedom and noncentrality `ρ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi2Pair<T: Real> {
    noncentrality: T,
}

impl<T: Real> Chi2Pair<T> {
    pub const DOF: u32 = 2;

    pub fn central() -> Self {
        Self { noncentrality: T::zero() }
    }

    pub fn new(noncentrality: T) -> Result<Self> {
        if !(noncentrality >= T::zero()) || !noncentrality.is_finite() {
            return Err(Error::Domain(format!(
                "noncentrality must be finite and non-negative, got {noncentrality}"
            )));
        }
        Ok(Self { noncentrality })
    }

    pub fn noncentrality(&self) -> T {
        self.noncentrality
    }

    pub fn is_central(&self) -> bool {
        self.noncentrality == T::zero()
    }

    pub fn sf(&self, x: T) -> Result<T> {
        chi2_noncentral_sf(x, self.noncentrality)
    }

    pub fn cdf(&self, x: T) -> Result<T> {
        if self.is_central() {
            chi2_central_cdf(x)
        } else {
            Ok(T::one() - self.sf(x)?)
        }
    }
}

fn check_non_negative<T: Real>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and non-negative, got {v}")))
    }
}

/// `F(x) = 1 − exp(−x/2)`.
pub fn chi2_central_cdf<T: Real>(x: T) -> Result<T> {
    check_non_negative("x", x)?;
    Ok(-(-x * T::lit(0.5)).exp_m1())
}

/// `1 − F(x) = exp(−x/2)`, without cancellation in the upper tail.
pub fn chi2_central_sf<T: Real>(x: T) -> Result<T> {
    check_non_negative("x", x)?;
    Ok((-x * T::lit(0.5)).exp())
}

/// Quantile of the central law: the threshold `δ` with `F(δ) = p`.
pub fn chi2_central_inv<T: Real>(p: T) -> Result<T> {
    if !(p >= T::zero() && p < T::one()) {
        return Err(Error::Domain(format!("probability must lie in [0, 1), got {p}")));
    }
    Ok(-T::lit(2.0) * (-p).ln_1p())
}

/// `1 − F_{χ²₂(ρ)}(x)`.
pub fn chi2_noncentral_sf<T: Real>(x: T, rho: T) -> Result<T> {
    check_non_negative("x", x)?;
    check_non_negative("noncentrality", rho)?;
    if x == T::zero() {
        return Ok(T::one());
    }
    let mu = x * T::lit(0.5);
    let lambda = rho * T::lit(0.5);
    if lambda == T::zero() {
        return Ok((-mu).exp());
    }

    let (x_lo, x_hi) = poisson_window(mu);
    let (j_lo, j_hi) = poisson_window(lambda);

    // Poisson(μ) CDF at j_lo, restricted to the window where its mass lives.
    let mut cdf = T::zero();
    let mut px = poisson_pmf_log_anchor(x_lo, mu);
    let mut i = x_lo;
    while i <= j_lo.min(x_hi) {
        cdf += px;
        px *= mu / T::from_u64(i + 1).unwrap();
        i += 1;
    }

    let mut pj = poisson_pmf_log_anchor(j_lo, lambda);
    let mut sum = T::zero();
    let mut j = j_lo;
    loop {
        sum += pj * cdf.min(T::one());
        let next = T::from_u64(j + 1).unwrap();
        let ratio = lambda / next;
        pj *= ratio;
        j += 1;
        if i == j && i <= x_hi {
            cdf += px;
            px *= mu / T::from_u64(i + 1).unwrap();
            i += 1;
        }
        if T::from_u64(j).unwrap() > lambda && ratio < T::one() {
            // Remaining mass is bounded by a geometric tail.
            let tail = pj / (T::one() - ratio);
            if tail <= T::lit(SERIES_TRUNCATION) * sum {
                break;
            }
        }
        if j > j_hi {
            break;
        }
    }
    Ok(sum.min(T::one()).max(T::zero()))
}

/// First-order Marcum Q function `Q₁(a, b) = P(χ²₂(a²) > b²)`.
pub fn marcum_q1<T: Real>(a: T, b: T) -> Result<T> {
    check_non_negative("a", a)?;
    check_non_negative("b", b)?;
    chi2_noncentral_sf(b * b, a * a)
}

fn poisson_window<T: Real>(mean: T) -> (u64, u64) {
    let m = mean.to_f64_lossy();
    let spread = WINDOW_SIGMAS * m.sqrt() + WINDOW_SIGMAS;
    let lo = (m - spread).floor().max(0.0) as u64;
    let hi = (m + spread + WINDOW_SIGMAS * WINDOW_SIGMAS).ceil() as u64;
    (lo, hi)
}

/// `exp(−m + k ln m − ln k!)`.
fn poisson_pmf_log_anchor<T: Real>(k: u64, mean: T) -> T {
    let kf = T::from_u64(k).unwrap();
    let log_p = if k == 0 { -mean } else { -mean + kf * mean.ln() - ln_factorial::<T>(k) };
    log_p.exp()
}

pub(crate) fn ln_factorial<T: Real>(n: u64) -> T {
    if n < 16 {
        return (2..=n).fold(T::zero(), |acc, k| acc + T::from_u64(k).unwrap().ln());
    }
    // Stirling series; the first omitted term is below 1e-16 for n ≥ 16.
    let x = T::from_u64(n).unwrap();
    let half_ln_two_pi = T::lit(0.918_938_533_204_672_8);
    let inv = T::one() / x;
    let inv2 = inv * inv;
    let series = inv
        * (T::lit(1.0 / 12.0)
            - inv2 * (T::lit(1.0 / 360.0) - inv2 * (T::lit(1.0 / 1260.0) - inv2 * T::lit(1.0 / 1680.0))));
    x * x.ln() - x + T::lit(0.5) * x.ln() + half_ln_two_pi + series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_cdf_edges() {
        assert_eq!(chi2_central_cdf(0.0_f64).unwrap(), 0.0);
        assert!((chi2_central_cdf(100.0_f64).unwrap() - 1.0).abs() < 1e-12);
        assert!(chi2_central_cdf(-1.0_f64).is_err());
    }

    #[test]
    fn central_inverse_edges() {
        assert_eq!(chi2_central_inv(0.0_f64).unwrap(), 0.0);
        assert!(chi2_central_inv(1.0_f64).is_err());
        assert!(chi2_central_inv(-0.1_f64).is_err());
        assert!(chi2_central_inv(f64::NAN).is_err());
    }

    #[test]
    fn noncentral_sf_edges() {
        assert_eq!(chi2_noncentral_sf(0.0_f64, 16.0).unwrap(), 1.0);
        let delta = chi2_central_inv(1.0 - 1e-7_f64).unwrap();
        let sf = chi2_noncentral_sf(delta, 0.0).unwrap();
        assert!((sf - 1e-7).abs() < 1e-15);
        assert!(chi2_noncentral_sf(-1.0_f64, 1.0).is_err());
        assert!(chi2_noncentral_sf(1.0_f64, -1.0).is_err());
    }

    #[test]
    fn large_noncentrality_does_not_underflow() {
        // ρ far above the range where exp(−ρ/2) is representable
        let sf = chi2_noncentral_sf(32.0_f64, 4000.0).unwrap();
        assert!((sf - 1.0).abs() < 1e-12);
        let sf = chi2_noncentral_sf(4000.0_f64, 3000.0).unwrap();
        assert!(sf > 0.0 && sf < 1e-10);
    }

    #[test]
    fn marcum_matches_sf() {
        let q = marcum_q1(4.0_f64, 4.60517_f64.sqrt()).unwrap();
        let s = chi2_noncentral_sf(4.60517, 16.0).unwrap();
        assert_eq!(q, s);
    }

    #[test]
    fn ln_factorial_matches_direct_sum() {
        for n in [0_u64, 1, 5, 15, 16, 17, 40, 170] {
            let direct: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
            let got: f64 = ln_factorial(n);
            assert!((got - direct).abs() < 1e-12 * direct.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn pair_type_validation() {
        assert!(Chi2Pair::new(-1.0_f64).is_err());
        let c = Chi2Pair::<f64>::central();
        assert!(c.is_central());
        assert!((c.cdf(4.0).unwrap() - (1.0 - (-2.0_f64).exp())).abs() < 1e-15);
        let nc = Chi2Pair::new(3.0_f64).unwrap();
        assert!((nc.cdf(2.0).unwrap() + nc.sf(2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision() {
        let d: f32 = chi2_central_inv(0.9).unwrap();
        assert!((d - 4.60517).abs() < 1e-4);
        let s: f32 = chi2_noncentral_sf(d, 16.0).unwrap();
        assert!((s - 0.978_601_6).abs() < 1e-5, "{s}");
    }
}
