use rayon::prelude::*;
use serde::Serialize;

use super::plan::{CurveKey, ExperimentPlan};
use super::trial::{Experiment, TrialOutcome};
use crate::detection::{noncentrality_orthogonal, theoretical_pd};
use crate::error::{Error, Result};
use crate::numerics::chi2_central_inv;

/// Two-sided 95% standard normal quantile.
const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Trials evaluated in parallel before each ordered reduction step.
const CHUNK: u64 = 1024;

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub pfa: f64,
    pub trials: u64,
    pub detections: u64,
    pub pd_emp: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub rho_paper: f64,
    pub rho_calibrated: f64,
    pub pd_theory_paper: f64,
    pub pd_theory_calibrated: f64,
}

impl CurvePoint {
    pub fn ci_width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCurve {
    pub key: CurveKey,
    /// Points in SNR-major, P_FA-minor order.
    pub points: Vec<CurvePoint>,
    pub pfa_count: usize,
    /// Trials in which the waveform left no usable direction; scored as misses.
    pub degenerate_trials: u64,
    /// Trial mean of `Re(a₀^H Rᵀ a₀)`.
    pub mean_target_gain: f64,
    /// Trial mean of `|a₀^H Rᵀ a₀|²`.
    pub mean_target_gain_sq: f64,
}

impl DetectionCurve {
    pub fn point(&self, snr: usize, pfa: usize) -> &CurvePoint {
        &self.points[snr * self.pfa_count + pfa]
    }

    /// The points at one P_FA, in SNR order.
    pub fn at_pfa(&self, pfa: usize) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().skip(pfa).step_by(self.pfa_count)
    }

    pub fn mode_label(&self) -> &'static str {
        self.key.mode_label()
    }

    pub fn bs_label(&self) -> String {
        self.key.bs_label()
    }
}

/// Empirical false-alarm rate of one curve's detector at one P_FA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalseAlarmPoint {
    pub curve: String,
    pub pfa: f64,
    pub threshold: f64,
    pub trials: u64,
    pub false_alarms: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Largest deviation of the empirical curve from each theory variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryMatch {
    pub curve: String,
    pub max_dev_paper: f64,
    pub max_dev_calibrated: f64,
    /// `"calibrated"` or `"paper"`, whichever lies closer.
    pub closer: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub plan: ExperimentPlan,
    pub curves: Vec<DetectionCurve>,
    pub false_alarms: Vec<FalseAlarmPoint>,
    /// How often each base station was selected, indexed by `bs_id - 1`.
    pub selection_counts: Vec<u64>,
}

impl ExperimentOutput {
    pub fn curve(&self, key: CurveKey) -> Option<&DetectionCurve> {
        self.curves.iter().find(|c| c.key == key)
    }

    pub fn theory_match(&self) -> Vec<TheoryMatch> {
        self.curves
            .iter()
            .map(|c| {
                let dev = |f: fn(&CurvePoint) -> f64| {
                    c.points.iter().map(|p| (p.pd_emp - f(p)).abs()).fold(0.0, f64::max)
                };
                let max_dev_paper = dev(|p| p.pd_theory_paper);
                let max_dev_calibrated = dev(|p| p.pd_theory_calibrated);
                TheoryMatch {
                    curve: c.key.to_string(),
                    max_dev_paper,
                    max_dev_calibrated,
                    closer: if max_dev_calibrated <= max_dev_paper { "calibrated" } else { "paper" },
                }
            })
            .collect()
    }
}

struct Tally {
    detections: Vec<u64>,
    false_alarms: Vec<u64>,
    degenerate: u64,
    gain_sum: f64,
    gain_sq_sum: f64,
}

/// Runs every trial of `plan` and aggregates per-curve detection counts,
/// Wilson intervals and both theory variants. Output is identical for any
/// worker count.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentOutput> {
    let exp = Experiment::new(plan.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    let thresholds =
        plan.pfa.iter().map(|&p| chi2_central_inv(1.0 - p)).collect::<Result<Vec<_>>>()?;
    let (n_snr, n_pfa) = (plan.snr_db.len(), plan.pfa.len());
    let mut tallies: Vec<Tally> = exp
        .curve_keys()
        .iter()
        .map(|_| Tally {
            detections: vec![0; n_snr * n_pfa],
            false_alarms: vec![0; n_pfa],
            degenerate: 0,
            gain_sum: 0.0,
            gain_sq_sum: 0.0,
        })
        .collect();
    let mut selection_counts = vec![0u64; if plan.needs_channels() { plan.base_stations } else { 0 }];

    let total = plan.trials_per_point as u64;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        let outcomes: Vec<Result<TrialOutcome>> =
            pool.install(|| (start..end).into_par_iter().map(|t| exp.run_trial(t)).collect());
        for outcome in outcomes {
            let outcome = outcome?;
            if let Some(bs) = outcome.selected_bs {
                selection_counts[bs - 1] += 1;
            }
            for (c, tally) in tallies.iter_mut().enumerate() {
                let co = &outcome.curves[c];
                tally.degenerate += u64::from(co.degenerate);
                tally.gain_sum += co.target_gain.re.max(0.0);
                tally.gain_sq_sum += co.target_gain.norm_sqr();
                for (p, &delta) in thresholds.iter().enumerate() {
                    tally.false_alarms[p] += u64::from(outcome.false_alarm(c, delta));
                    for s in 0..n_snr {
                        tally.detections[s * n_pfa + p] += u64::from(outcome.detected(c, s, delta));
                    }
                }
            }
        }
        start = end;
    }

    let n = total as f64;
    let m = plan.antennas as f64;
    let mut curves = Vec::with_capacity(tallies.len());
    let mut false_alarms = Vec::new();
    for (&key, tally) in exp.curve_keys().iter().zip(&tallies) {
        let mean_gain = tally.gain_sum / n;
        let mean_gain_sq = tally.gain_sq_sum / n;
        let mut points = Vec::with_capacity(n_snr * n_pfa);
        for &snr_db in &plan.snr_db {
            let alpha_sq = 10f64.powf(snr_db / 10.0);
            let rho_paper = match key {
                CurveKey::Orthogonal => noncentrality_orthogonal(plan.antennas, alpha_sq, 1.0)?,
                _ => alpha_sq * mean_gain_sq,
            };
            let rho_calibrated = 2.0 * alpha_sq * m * mean_gain;
            for (p, &pfa) in plan.pfa.iter().enumerate() {
                let detections = tally.detections[points.len() / n_pfa * n_pfa + p];
                let (ci_lo, ci_hi) = wilson_interval(detections, total);
                points.push(CurvePoint {
                    snr_db,
                    pfa,
                    trials: total,
                    detections,
                    pd_emp: detections as f64 / n,
                    ci_lo,
                    ci_hi,
                    rho_paper,
                    rho_calibrated,
                    pd_theory_paper: theoretical_pd(rho_paper, pfa)?,
                    pd_theory_calibrated: theoretical_pd(rho_calibrated, pfa)?,
                });
            }
        }
        for (p, &pfa) in plan.pfa.iter().enumerate() {
            let count = tally.false_alarms[p];
            let (ci_lo, ci_hi) = wilson_interval(count, total);
            false_alarms.push(FalseAlarmPoint {
                curve: key.to_string(),
                pfa,
                threshold: thresholds[p],
                trials: total,
                false_alarms: count,
                rate: count as f64 / n,
                ci_lo,
                ci_hi,
            });
        }
        curves.push(DetectionCurve {
            key,
            points,
            pfa_count: n_pfa,
            degenerate_trials: tally.degenerate,
            mean_target_gain: mean_gain,
            mean_target_gain_sq: mean_gain_sq,
        });
    }
    Ok(ExperimentOutput { plan: plan.clone(), curves, false_alarms, selection_counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::theory_point;
    use crate::montecarlo::plan::{ChannelMode, DetectorMode, WaveformMode};

    fn quick_plan() -> ExperimentPlan {
        ExperimentPlan {
            antennas: 4,
            samples: 16,
            base_stations: 3,
            snr_db: vec![-10.0, 0.0, 10.0],
            pfa: vec![0.1, 0.01],
            trials_per_point: 200,
            grid_step_deg: 2.0,
            ..Default::default()
        }
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532_799_862_889_3).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403_831_530_365_995_6).abs() < 1e-12, "{lo}");
        assert!((hi - 0.596_168_469_634_004_4).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(10, 10);
        assert_eq!(hi, 1.0);
        assert!(lo < 1.0);
    }

    #[test]
    fn single_trial_single_point() {
        let plan = ExperimentPlan {
            snr_db: vec![0.0],
            pfa: vec![0.1],
            trials_per_point: 1,
            ..quick_plan()
        };
        let out = run_experiment(&plan).unwrap();
        assert_eq!(out.curves.len(), 5);
        for c in &out.curves {
            assert_eq!(c.points.len(), 1);
            assert!(c.points[0].detections <= 1);
            assert_eq!(c.points[0].trials, 1);
        }
    }

    #[test]
    fn counts_and_intervals_are_consistent() {
        let out = run_experiment(&quick_plan()).unwrap();
        for c in &out.curves {
            for p in &c.points {
                assert!(p.detections <= p.trials);
                assert_eq!(p.pd_emp, p.detections as f64 / p.trials as f64);
                assert!(0.0 <= p.ci_lo && p.ci_lo <= p.pd_emp && p.pd_emp <= p.ci_hi && p.ci_hi <= 1.0);
            }
        }
        assert_eq!(out.selection_counts.iter().sum::<u64>(), 200);
        assert_eq!(out.false_alarms.len(), 5 * 2);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let one = run_experiment(&quick_plan()).unwrap();
        let four = run_experiment(&ExperimentPlan { workers: 4, ..quick_plan() }).unwrap();
        assert_eq!(one.curves, four.curves);
        assert_eq!(one.false_alarms, four.false_alarms);
    }

    #[test]
    fn fixed_channel_theory_matches_theory_point() {
        let plan = ExperimentPlan { trials_per_point: 3, ..quick_plan() };
        let out = run_experiment(&plan).unwrap();
        let exp = Experiment::new(plan.clone()).unwrap();
        let state = exp.fixed_state().unwrap();
        let a0 = exp.target_steering();
        for curve in &out.curves {
            let mode = exp.mode_waveform(curve.key, Some(state));
            for (s, &snr) in plan.snr_db.iter().enumerate() {
                for (p, &pfa) in plan.pfa.iter().enumerate() {
                    let tp = theory_point(a0, &mode.correlation, !curve.key.is_nsp(), 10f64.powf(snr / 10.0), 1.0, pfa)
                        .unwrap();
                    let pt = curve.point(s, p);
                    assert!((pt.rho_paper - tp.rho_paper).abs() <= 1e-12 * tp.rho_paper.max(1.0));
                    assert!((pt.rho_calibrated - tp.rho_calibrated).abs() <= 1e-12 * tp.rho_calibrated.max(1.0));
                    assert!((pt.pd_theory_calibrated - tp.pd_calibrated).abs() < 1e-12);
                    assert!((pt.pd_theory_paper - tp.pd_paper).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn redrawn_theory_averages_the_noncentrality() {
        let plan = ExperimentPlan {
            channel_mode: ChannelMode::RedrawnPerTrial,
            waveform_modes: vec![WaveformMode::NspSelected],
            trials_per_point: 8,
            ..quick_plan()
        };
        let out = run_experiment(&plan).unwrap();
        let exp = Experiment::new(plan.clone()).unwrap();
        let mean = (0..8)
            .map(|t| exp.channel_state(t).unwrap().unwrap().selected().target_gain.re)
            .sum::<f64>()
            / 8.0;
        let curve = &out.curves[0];
        assert!((curve.mean_target_gain - mean).abs() < 1e-12);
        let pt = curve.point(1, 0);
        assert!((pt.rho_calibrated - 2.0 * 4.0 * mean).abs() < 1e-10);
    }

    #[test]
    fn false_alarm_rate_at_true_angle() {
        let plan = ExperimentPlan {
            waveform_modes: vec![WaveformMode::Orthogonal],
            detector: DetectorMode::TrueAngle,
            snr_db: vec![0.0],
            pfa: vec![0.1],
            trials_per_point: 10_000,
            ..quick_plan()
        };
        let out = run_experiment(&plan).unwrap();
        let fa = &out.false_alarms[0];
        let se = (0.1f64 * 0.9 / 1e4).sqrt();
        assert!((fa.rate - 0.1).abs() < 3.0 * se, "{}", fa.rate);
    }
}
