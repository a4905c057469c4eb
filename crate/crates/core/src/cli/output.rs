use std::fmt::Write as _;

use serde::Serialize;

use super::config::RunConfig;
use crate::montecarlo::{
    DetectionCurve, ExperimentOutput, ExperimentPlan, FalseAlarmPoint, SnrGapReport, TheoryMatch,
};

pub const CSV_HEADER: &str =
    "mode,bs_id,snr_db,pfa,trials,detections,pd_emp,ci_lo,ci_hi,pd_theory_paper,pd_theory_calibrated";

/// One row per (curve, SNR, P_FA). Floats use Rust's shortest round-trip
/// formatting, which is locale independent.
pub fn results_csv(curves: &[DetectionCurve]) -> String {
    let mut out = String::with_capacity(128 * curves.iter().map(|c| c.points.len()).sum::<usize>());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in curves {
        let (mode, bs) = (c.mode_label(), c.bs_label());
        for p in &c.points {
            writeln!(
                out,
                "{mode},{bs},{},{},{},{},{},{},{},{},{}",
                p.snr_db,
                p.pfa,
                p.trials,
                p.detections,
                p.pd_emp,
                p.ci_lo,
                p.ci_hi,
                p.pd_theory_paper,
                p.pd_theory_calibrated
            )
            .expect("writing to a String");
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelInfo {
    pub bs_id: usize,
    pub nullity: usize,
    /// `‖P X − X‖_F`.
    pub degradation: f64,
    /// `Re(a₀^H R̆ᵀ a₀)`.
    pub target_gain: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegenerateCount {
    pub curve: String,
    pub trials: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub version: &'static str,
    pub master_seed: u64,
    pub config: &'a RunConfig,
    pub plan: &'a ExperimentPlan,
    pub wall_time_s: f64,
    pub degenerate_trials: Vec<DegenerateCount>,
    pub selection_counts: &'a [u64],
    /// The experiment-wide channels in fixed mode.
    pub channels: Option<Vec<ChannelInfo>>,
    pub false_alarms: &'a [FalseAlarmPoint],
    pub theory_match: Vec<TheoryMatch>,
    /// Theory variant with the smaller worst-case deviation over all curves.
    pub theory_verdict: &'static str,
    pub gap_reports: &'a [SnrGapReport],
}

impl<'a> Summary<'a> {
    pub fn new(
        config: &'a RunConfig,
        output: &'a ExperimentOutput,
        gap_reports: &'a [SnrGapReport],
        channels: Option<Vec<ChannelInfo>>,
        wall_time_s: f64,
    ) -> Self {
        let theory_match = output.theory_match();
        let worst = |f: fn(&TheoryMatch) -> f64| theory_match.iter().map(f).fold(0.0, f64::max);
        let theory_verdict =
            if worst(|m| m.max_dev_calibrated) <= worst(|m| m.max_dev_paper) { "calibrated" } else { "paper" };
        Self {
            version: env!("CARGO_PKG_VERSION"),
            master_seed: output.plan.master_seed,
            config,
            plan: &output.plan,
            wall_time_s,
            degenerate_trials: output
                .curves
                .iter()
                .map(|c| DegenerateCount { curve: c.key.to_string(), trials: c.degenerate_trials })
                .collect(),
            selection_counts: &output.selection_counts,
            channels,
            false_alarms: &output.false_alarms,
            theory_match,
            theory_verdict,
            gap_reports,
        }
    }
}

fn panel_layout(n: usize) -> (usize, usize) {
    match n {
        1 => (1, 1),
        2 => (1, 2),
        3 | 4 => (2, 2),
        _ => (n.div_ceil(3), 3),
    }
}

/// Gnuplot script drawing one P_D-versus-SNR panel per P_FA from `csv_name`.
/// Empirical curves are points, calibrated theory is dashed.
pub fn plot_script(curves: &[DetectionCurve], pfa: &[f64], csv_name: &str) -> String {
    let (rows, cols) = panel_layout(pfa.len());
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size {},{}", 640 * cols, 480 * rows);
    let _ = writeln!(s, "set output 'pd_vs_snr.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel 'SNR (dB)'");
    let _ = writeln!(s, "set ylabel 'P_D'");
    let _ = writeln!(s, "set yrange [0:1]");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set key bottom right");
    let _ = writeln!(s, "set multiplot layout {rows},{cols}");
    for &p in pfa {
        let _ = writeln!(s, "set title 'P_{{FA}} = {p:e}'");
        let mut series = Vec::new();
        for (i, c) in curves.iter().enumerate() {
            let filter = format!("(strcol(2) eq '{}' && $4 == {p})", c.bs_label());
            series.push(format!(
                "'{csv_name}' every ::1 using ({filter} ? $3 : 1/0):7 with points lc {lc} pt 7 ps 0.5 title '{key}'",
                lc = i + 1,
                key = c.key
            ));
            series.push(format!(
                "'{csv_name}' every ::1 using ({filter} ? $3 : 1/0):11 with lines lc {lc} dt 2 notitle",
                lc = i + 1
            ));
        }
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}
