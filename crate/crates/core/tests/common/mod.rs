//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite 20-point Gauss-Legendre over `[a, b]` with `panels` panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let part: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum();
        total += 0.5 * h * part;
    }
    total
}

/// `e^{-z} I₀(z)` from the power series (small z) or the Hankel expansion.
pub fn bessel_i0_scaled(z: f64) -> f64 {
    if z < 30.0 {
        let q = 0.25 * z * z;
        let (mut term, mut sum, mut k) = (1.0, 1.0, 1.0);
        while term > 1e-18 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-z).exp()
    } else {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..30 {
            let odd = (2 * k - 1) as f64;
            let next = term * odd * odd / (k as f64 * 8.0 * z);
            if next > term {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * z).sqrt()
    }
}

/// Density of the noncentral χ²₂(ρ) law.
pub fn ncx2_density(t: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        return 0.5 * (-0.5 * t).exp();
    }
    let z = (rho * t).sqrt();
    let d = t.sqrt() - rho.sqrt();
    0.5 * (-0.5 * d * d).exp() * bessel_i0_scaled(z)
}

/// `P(χ²₂(ρ) > x)` by quadrature of the density.
pub fn ncx2_sf_quadrature(x: f64, rho: f64) -> f64 {
    let hi = (rho.sqrt() + 40.0).powi(2) + x;
    // integrate the lighter side to keep the absolute error small
    let right = integrate(|t| ncx2_density(t, rho), x, hi, 4000);
    right.clamp(0.0, 1.0)
}

/// Central χ²₂ quantile at probability `p` by bisection on the quadrature
/// survival function.
pub fn chi2_inv_bisection(p: f64) -> f64 {
    let target = 1.0 - p;
    let (mut lo, mut hi) = (0.0f64, 200.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let sf = integrate(|t| 0.5 * (-0.5 * t).exp(), mid, mid + 200.0, 200);
        if sf > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `f(x) = target` for increasing `f` on `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// The 50-point P_FA grid used by the quantile oracle: log-spaced from 1e-7
/// to 0.9.
pub fn pfa_grid() -> Vec<f64> {
    (0..50).map(|i| 10f64.powf(-7.0 + i as f64 * (0.9f64.log10() + 7.0) / 49.0)).collect()
}

/// 50 `(x, ρ)` points: thresholds for P_FA ∈ {0.5, 1e-1, 1e-3, 1e-5, 1e-7}
/// crossed with ten noncentralities.
pub fn sf_grid() -> Vec<(f64, f64)> {
    let rhos = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0, 160.0];
    let pfas: [f64; 5] = [0.5, 1e-1, 1e-3, 1e-5, 1e-7];
    let mut pts = Vec::new();
    for &p in &pfas {
        let x = -2.0 * p.ln();
        for &r in &rhos {
            pts.push((x, r));
        }
    }
    pts
}
