use serde::Serialize;

use super::curve::{CurvePoint, DetectionCurve};
use super::plan::CurveKey;

/// Which column of a detection curve the gap is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveSource {
    Empirical,
    TheoryPaper,
    TheoryCalibrated,
}

impl CurveSource {
    fn value(self, p: &CurvePoint) -> f64 {
        match self {
            CurveSource::Empirical => p.pd_emp,
            CurveSource::TheoryPaper => p.pd_theory_paper,
            CurveSource::TheoryCalibrated => p.pd_theory_calibrated,
        }
    }
}

/// Where a curve crosses the target probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "snr_db")]
pub enum Crossing {
    At(f64),
    /// Already at or above the target at the first grid point.
    BelowGrid,
    /// Never reaches the target on the grid.
    Unreached,
}

impl Crossing {
    pub fn snr_db(&self) -> Option<f64> {
        match self {
            Crossing::At(s) => Some(*s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapEntry {
    pub curve: String,
    #[serde(skip)]
    pub key: CurveKey,
    pub crossing: Crossing,
    /// SNR at target minus the orthogonal SNR at target, in dB.
    pub gap_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrGapReport {
    pub target_pd: f64,
    pub pfa: f64,
    pub source: CurveSource,
    pub entries: Vec<GapEntry>,
}

impl SnrGapReport {
    pub fn gap(&self, key: CurveKey) -> Option<f64> {
        self.entries.iter().find(|e| e.key == key).and_then(|e| e.gap_db)
    }

    pub fn per_bs_gaps(&self) -> Vec<Option<f64>> {
        self.entries.iter().filter(|e| matches!(e.key, CurveKey::PerBs(_))).map(|e| e.gap_db).collect()
    }
}

/// Pool-adjacent-violators fit: the nondecreasing sequence closest to `y` in
/// least squares with equal weights.
pub fn isotonic_nondecreasing(y: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            blocks.push(((m1 * n1 as f64 + m2 * n2 as f64) / (n1 + n2) as f64, n1 + n2));
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat_n(m, n)).collect()
}

fn crossing(snr: &[f64], pd: &[f64], target: f64) -> Crossing {
    let smooth = isotonic_nondecreasing(pd);
    match smooth.iter().position(|&v| v >= target) {
        None => Crossing::Unreached,
        Some(0) => Crossing::BelowGrid,
        Some(i) => {
            let (x0, x1, y0, y1) = (snr[i - 1], snr[i], smooth[i - 1], smooth[i]);
            Crossing::At(x0 + (target - y0) / (y1 - y0) * (x1 - x0))
        }
    }
}

/// SNR needed by each curve to reach `target_pd` at P_FA index `pfa`, and its
/// gap to the orthogonal curve. Curves are isotonically smoothed before linear
/// interpolation; without an orthogonal curve every gap is `None`.
pub fn snr_gap(curves: &[DetectionCurve], pfa: usize, target_pd: f64, source: CurveSource) -> SnrGapReport {
    let mut entries: Vec<GapEntry> = curves
        .iter()
        .map(|c| {
            let (snr, pd): (Vec<f64>, Vec<f64>) = c.at_pfa(pfa).map(|p| (p.snr_db, source.value(p))).unzip();
            GapEntry { curve: c.key.to_string(), key: c.key, crossing: crossing(&snr, &pd, target_pd), gap_db: None }
        })
        .collect();
    let reference = entries.iter().find(|e| e.key == CurveKey::Orthogonal).and_then(|e| e.crossing.snr_db());
    if let Some(r) = reference {
        for e in &mut entries {
            e.gap_db = e.crossing.snr_db().map(|s| s - r);
        }
    }
    let pfa_value = curves.first().map_or(f64::NAN, |c| c.point(0, pfa).pfa);
    SnrGapReport { target_pd, pfa: pfa_value, source, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(key: CurveKey, snr: &[f64], pd: &[f64]) -> DetectionCurve {
        let points = snr
            .iter()
            .zip(pd)
            .map(|(&snr_db, &p)| CurvePoint {
                snr_db,
                pfa: 0.01,
                trials: 100,
                detections: (p * 100.0) as u64,
                pd_emp: p,
                ci_lo: p,
                ci_hi: p,
                rho_paper: 0.0,
                rho_calibrated: 0.0,
                pd_theory_paper: p,
                pd_theory_calibrated: p,
            })
            .collect();
        DetectionCurve { key, points, pfa_count: 1, degenerate_trials: 0, mean_target_gain: 0.0, mean_target_gain_sq: 0.0 }
    }

    #[test]
    fn pava_examples() {
        assert_eq!(isotonic_nondecreasing(&[1.0, 3.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(isotonic_nondecreasing(&[3.0, 2.0, 1.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(isotonic_nondecreasing(&[]), Vec::<f64>::new());
    }

    #[test]
    fn identical_curves_have_zero_gap() {
        let snr = [0.0, 1.0, 2.0, 3.0];
        let pd = [0.1, 0.5, 0.95, 1.0];
        let curves = vec![curve(CurveKey::Orthogonal, &snr, &pd), curve(CurveKey::PerBs(1), &snr, &pd)];
        let rep = snr_gap(&curves, 0, 0.9, CurveSource::Empirical);
        assert_eq!(rep.gap(CurveKey::Orthogonal), Some(0.0));
        assert_eq!(rep.gap(CurveKey::PerBs(1)), Some(0.0));
        assert!((rep.entries[0].crossing.snr_db().unwrap() - (1.0 + 0.4 / 0.45)).abs() < 1e-12);
    }

    #[test]
    fn shifted_curve_and_markers() {
        let snr = [0.0, 1.0, 2.0, 3.0, 4.0];
        let curves = vec![
            curve(CurveKey::Orthogonal, &snr, &[0.2, 0.9, 1.0, 1.0, 1.0]),
            curve(CurveKey::PerBs(1), &snr, &[0.0, 0.0, 0.2, 0.9, 1.0]),
            curve(CurveKey::PerBs(2), &snr, &[0.0, 0.1, 0.2, 0.3, 0.4]),
            curve(CurveKey::Selected, &snr, &[0.95, 1.0, 1.0, 1.0, 1.0]),
        ];
        let rep = snr_gap(&curves, 0, 0.9, CurveSource::Empirical);
        assert!((rep.gap(CurveKey::PerBs(1)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(rep.entries[2].crossing, Crossing::Unreached);
        assert_eq!(rep.entries[3].crossing, Crossing::BelowGrid);
        assert_eq!(rep.gap(CurveKey::PerBs(2)), None);
    }

    #[test]
    fn jitter_is_smoothed_before_interpolation() {
        let snr = [0.0, 1.0, 2.0, 3.0];
        let curves = vec![curve(CurveKey::Orthogonal, &snr, &[0.5, 0.92, 0.88, 1.0])];
        let rep = snr_gap(&curves, 0, 0.9, CurveSource::Empirical);
        // smoothed: 0.5, 0.9, 0.9, 1.0 → crosses exactly at 1 dB
        assert!((rep.entries[0].crossing.snr_db().unwrap() - 1.0).abs() < 1e-12);
    }
}
