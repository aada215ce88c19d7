//! Picard and window-schedule reports in JSON and key-value text form.

use serde::Serialize;
use std::fmt::Write as _;

use crate::io::fmt_real;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    pub iterations: usize,
    /// `d_k = |u^{k+1} - u^k|` in discrete `L^2(window; X)`.
    pub diffs: Vec<f64>,
    /// `r_k = d_k / d_{k-1}`
    pub ratios: Vec<f64>,
    /// Largest tail ratio (see [`super::tail_ratio`]), the empirical contraction factor.
    pub mu_hat: f64,
    /// `mu_hat^2 / T1`, the measured stand-in for the theoretical constant sum.
    pub c5_plus_c6_hat: f64,
    pub window: [f64; 2],
    pub accepted: bool,
    pub dt: f64,
    /// `max_k sup_t |u^k_x(t)|_H^2` over the seed and all iterates.
    pub k_set_m: f64,
    /// `|gamma(u) - u|` for the returned `u`.
    pub fixed_point_residual: f64,
    pub warnings: Vec<String>,
}

/// The machine-readable subset.
#[derive(Serialize)]
struct PicardJson<'a> {
    iterations: usize,
    diffs: &'a [f64],
    ratios: &'a [f64],
    mu_hat: f64,
    c5_plus_c6_hat: f64,
    window: [f64; 2],
    accepted: bool,
}

impl PicardReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PicardJson {
            iterations: self.iterations,
            diffs: &self.diffs,
            ratios: &self.ratios,
            mu_hat: self.mu_hat,
            c5_plus_c6_hat: self.c5_plus_c6_hat,
            window: self.window,
            accepted: self.accepted,
        })
        .expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    /// `key = value` lines, floats with 17 significant digits.
    pub fn to_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| fmt_real(*x)).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(
            s,
            "window = {} {}",
            fmt_real(self.window[0]),
            fmt_real(self.window[1])
        );
        let _ = writeln!(s, "dt = {}", fmt_real(self.dt));
        let _ = writeln!(s, "accepted = {}", self.accepted);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "diffs = {}", list(&self.diffs));
        let _ = writeln!(s, "ratios = {}", list(&self.ratios));
        let _ = writeln!(s, "mu_hat = {}", fmt_real(self.mu_hat));
        let _ = writeln!(s, "c5_plus_c6_hat = {}", fmt_real(self.c5_plus_c6_hat));
        let _ = writeln!(s, "k_set_m = {}", fmt_real(self.k_set_m));
        let _ = writeln!(
            s,
            "fixed_point_residual = {}",
            fmt_real(self.fixed_point_residual)
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning = {w}");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub t_start: f64,
    pub t_end: f64,
    pub report: PicardReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSchedule {
    pub horizon: f64,
    pub entries: Vec<ScheduleEntry>,
    pub halvings: usize,
    /// `(t_start, t_end, reason)` of every attempt that was shrunk.
    pub rejections: Vec<(f64, f64, String)>,
}

impl WindowSchedule {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            entries: Vec::new(),
            halvings: 0,
            rejections: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: ScheduleEntry) {
        self.entries.push(entry);
    }

    pub fn record_rejection(&mut self, t_start: f64, t_end: f64, error: &Error) {
        self.rejections.push((t_start, t_end, error.to_string()));
    }

    pub fn max_mu_hat(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.report.mu_hat)
            .fold(0.0, f64::max)
    }

    pub fn all_accepted(&self) -> bool {
        self.entries.iter().all(|e| e.report.accepted)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("schedule serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "horizon": self.horizon,
            "halvings": self.halvings,
            "rejections": self.rejections.iter().map(|(a, b, r)| serde_json::json!({
                "window": [a, b],
                "reason": r,
            })).collect::<Vec<_>>(),
            "windows": self.entries.iter().map(|e| e.report.to_json_value()).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "horizon = {}\nwindows = {}\nhalvings = {}\n",
            fmt_real(self.horizon),
            self.entries.len(),
            self.halvings
        );
        for (a, b, reason) in &self.rejections {
            let _ = writeln!(s, "rejected = {} {} {reason}", fmt_real(*a), fmt_real(*b));
        }
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(s, "\n[window {i}]");
            s.push_str(&e.report.to_text());
        }
        s
    }
}
