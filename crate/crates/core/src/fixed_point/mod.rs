//! Picard iteration for the coupled problem and its window continuation.
//!
//! `gamma` maps a frozen trajectory `u~` to the solution of the auxiliary
//! problem. The theory guarantees that `gamma` contracts on short enough
//! windows, with a factor that is not computable in practice; the driver
//! measures successive difference ratios instead and halves the window
//! whenever they stay above the threshold `theta`.

mod contraction;
mod report;

pub use contraction::{estimate_contraction, random_pair, ContractionStats};
pub use report::{PicardReport, ScheduleEntry, WindowSchedule};

use crate::ap_solver::{solve_ap, ApConfig, ApSolution, MassLedger, TimeWindow, Trajectory};
use crate::constitutive::ConstitutiveModel;
use crate::grid::GridFunction;
use crate::pressure::PressureField;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig<T> {
    /// Stop once `|u^{k+1} - u^k|` in discrete `L^2(window; X)` drops below this.
    pub picard_tol: T,
    pub picard_max_iter: usize,
    /// `theta`: ratios at or above it count as non-contracting.
    pub contraction_threshold: T,
    pub window_min: T,
    pub initial_window: T,
}

impl<T: Real> Default for PicardConfig<T> {
    fn default() -> Self {
        Self {
            picard_tol: T::lit(1e-8),
            picard_max_iter: 60,
            contraction_threshold: T::lit(0.5),
            window_min: T::lit(1e-4),
            initial_window: T::one(),
        }
    }
}

impl<T: Real> PicardConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let theta = self.contraction_threshold;
        if !(self.picard_tol > T::zero()) || self.picard_max_iter == 0 {
            return Err(Error::Config(
                "picard_tol must be positive and picard_max_iter nonzero".into(),
            ));
        }
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::Config(format!(
                "contraction_threshold {theta} must lie in (0, 1)"
            )));
        }
        if !(self.window_min > T::zero()
            && self.window_min <= self.initial_window
            && self.initial_window.is_finite())
        {
            return Err(Error::Config(format!(
                "need 0 < window_min <= initial_window (got {}, {})",
                self.window_min, self.initial_window
            )));
        }
        Ok(())
    }
}

/// Consecutive ratios at or above `theta` after which a window is declared too large.
pub const PERSISTENT_RATIOS: usize = 3;
/// Growth of the difference norm beyond this factor of the first one aborts the window.
pub const DIVERGENCE_FACTOR: f64 = 1e3;
/// Slack of the a-priori envelope check.
pub const ENVELOPE_SLACK: f64 = 1.05;

/// Largest ratio after the first one (or the only one). The first ratio
/// compares against the seed, which is not an image of `gamma` and often
/// sits far from the iterates.
pub fn tail_ratio(ratios: &[f64]) -> f64 {
    let tail = if ratios.len() >= 2 {
        &ratios[1..]
    } else {
        ratios
    };
    tail.iter().copied().fold(0.0, f64::max)
}

/// The solution operator: `u~ -> u` of the auxiliary problem.
pub fn gamma<T: Real>(
    u_tilde: &Trajectory<T>,
    u0: &GridFunction<T>,
    window: &TimeWindow<T>,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    ap: &ApConfig<T>,
) -> Result<Trajectory<T>> {
    Ok(solve_ap(u0, u_tilde, window, model, pressure, ap)?.u)
}

/// The two a-priori quantities of one iterate,
/// `max_t |u|_H^2 + int_0^t |u_x|_H^2` and `max_t |u_x|_H^2 + int_0^t |u_t|_H^2`.
fn a_priori_quantities<T: Real>(u: &Trajectory<T>) -> [T; 2] {
    let (mut int_ux, mut int_ut) = (T::zero(), T::zero());
    let f0 = u.frame(0);
    let (mut q1, mut q2) = (f0.norm_h_sq(), f0.seminorm_x_sq());
    for n in 1..u.frames().len() {
        let dt = u.times()[n] - u.times()[n - 1];
        let (cur, prev) = (u.frame(n), u.frame(n - 1));
        int_ux = int_ux + dt * cur.seminorm_x_sq();
        let rate = cur
            .zip_map(prev, |a, b| (a - b) / dt)
            .expect("frames share a grid");
        int_ut = int_ut + dt * rate.norm_h_sq();
        q1 = q1.max(cur.norm_h_sq() + int_ux);
        q2 = q2.max(cur.seminorm_x_sq() + int_ut);
    }
    [q1, q2]
}

/// `int |u~_x|_H^2 dt` over the window.
fn gradient_energy<T: Real>(u: &Trajectory<T>) -> T {
    u.times()
        .windows(2)
        .zip(&u.frames()[1..])
        .map(|(w, f)| (w[1] - w[0]) * f.seminorm_x_sq())
        .sum()
}

/// Affine envelope `a + b int |u~_x|^2` of the a-priori quantities,
/// least-squares fitted over all iterates of a window; iterates more than
/// [`ENVELOPE_SLACK`] above it are reported.
#[derive(Debug, Default)]
struct AprioriMonitor {
    /// `(int |u~_x|^2, [q1, q2])` per iterate.
    points: Vec<(f64, [f64; 2])>,
}

impl AprioriMonitor {
    fn observe<T: Real>(&mut self, input: &Trajectory<T>, output: &Trajectory<T>) {
        let x = gradient_energy(input).as_f64();
        self.points
            .push((x, a_priori_quantities(output).map(|v| v.as_f64())));
    }

    fn warnings(&self) -> Vec<String> {
        let n = self.points.len() as f64;
        let mut out = Vec::new();
        if self.points.is_empty() {
            return out;
        }
        let mean_x = self.points.iter().map(|p| p.0).sum::<f64>() / n;
        let sxx: f64 = self.points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        for (j, name) in ["|u|_H^2 + int|u_x|^2", "|u_x|_H^2 + int|u_t|^2"]
            .iter()
            .enumerate()
        {
            let mean_q = self.points.iter().map(|p| p.1[j]).sum::<f64>() / n;
            let sxq: f64 = self
                .points
                .iter()
                .map(|p| (p.0 - mean_x) * (p.1[j] - mean_q))
                .sum();
            let slope = if sxx > 1e-300 { sxq / sxx } else { 0.0 };
            for (k, &(x, q)) in self.points.iter().enumerate() {
                let envelope = mean_q + slope * (x - mean_x);
                if !(q[j] <= ENVELOPE_SLACK * envelope) {
                    out.push(format!(
                        "WARN a-priori envelope: iterate {k} has {name} = {:.6e} above 1.05 x {:.6e}",
                        q[j], envelope
                    ));
                }
            }
        }
        out
    }
}

/// An accepted Picard window: the last iterate with its Kirchhoff
/// variable and mass ledger, and the iteration report.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution<T> {
    pub u: Trajectory<T>,
    pub v: Trajectory<T>,
    pub ledger: MassLedger<T>,
    pub report: PicardReport,
}

/// Result of [`march_windows`]: the concatenated solution over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchSolution<T> {
    pub u: Trajectory<T>,
    pub v: Trajectory<T>,
    pub ledger: MassLedger<T>,
    pub schedule: WindowSchedule,
}

/// Picard iteration from the constant-in-time extension of `u0`.
pub fn picard_solve<T: Real>(
    u0: &GridFunction<T>,
    window: &TimeWindow<T>,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    ap: &ApConfig<T>,
    picard: &PicardConfig<T>,
) -> Result<PicardSolution<T>> {
    let seed = Trajectory::constant_extension(u0, window);
    picard_solve_from(seed, u0, window, model, pressure, ap, picard)
}

/// Picard iteration from an arbitrary initial guess covering `window`.
pub fn picard_solve_from<T: Real>(
    initial_guess: Trajectory<T>,
    u0: &GridFunction<T>,
    window: &TimeWindow<T>,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    ap: &ApConfig<T>,
    picard: &PicardConfig<T>,
) -> Result<PicardSolution<T>> {
    picard.validate()?;
    let theta = picard.contraction_threshold.as_f64();
    let (t_start, t_end) = (window.t0.as_f64(), window.t_end().as_f64());
    let mut u_tilde = initial_guess;
    let mut diffs: Vec<f64> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut k_set_m = u_tilde.sup_gradient_sq().as_f64();
    let mut monitor = AprioriMonitor::default();

    for _ in 0..picard.picard_max_iter {
        let solution = solve_ap(u0, &u_tilde, window, model, pressure, ap)?;
        let next = &solution.u;
        monitor.observe(&u_tilde, next);
        k_set_m = k_set_m.max(next.sup_gradient_sq().as_f64());
        let d = next.l2x_distance(&u_tilde)?.as_f64();
        if let Some(&prev) = diffs.last() {
            ratios.push(if prev > 0.0 { d / prev } else { 0.0 });
        }
        diffs.push(d);

        let too_large = || Error::WindowTooLarge {
            t_start,
            t_end,
            ratios: ratios.clone(),
        };
        if !d.is_finite() || d > DIVERGENCE_FACTOR * diffs[0].max(f64::MIN_POSITIVE) {
            return Err(too_large());
        }
        let persistent = ratios.len() >= PERSISTENT_RATIOS
            && ratios[ratios.len() - PERSISTENT_RATIOS..]
                .iter()
                .all(|&r| r >= theta);
        if persistent {
            return Err(too_large());
        }
        if d < picard.picard_tol.as_f64() {
            let mu_hat = tail_ratio(&ratios);
            if mu_hat >= 1.0 {
                return Err(too_large());
            }
            let check = gamma(next, u0, window, model, pressure, ap)?;
            let residual = check.l2x_distance(next)?.as_f64();
            let report = PicardReport {
                iterations: diffs.len(),
                diffs,
                ratios,
                mu_hat,
                c5_plus_c6_hat: mu_hat * mu_hat / (t_end - t_start),
                window: [t_start, t_end],
                accepted: true,
                dt: window.dt.as_f64(),
                k_set_m,
                fixed_point_residual: residual,
                warnings: monitor.warnings(),
            };
            let ApSolution { u, v, ledger, .. } = solution;
            return Ok(PicardSolution {
                u,
                v,
                ledger,
                report,
            });
        }
        u_tilde = solution.u;
    }
    Err(Error::PicardCap {
        iterations: picard.picard_max_iter,
        last_diff: diffs.last().copied().unwrap_or(f64::NAN),
    })
}

/// Marches `[0, horizon]` window by window, halving the window whenever the
/// Picard iteration does not contract (or a time step fails) and keeping the
/// current length once a window is accepted.
#[allow(clippy::too_many_arguments)]
pub fn march_windows<T: Real>(
    u0: &GridFunction<T>,
    horizon: T,
    dt: T,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    ap: &ApConfig<T>,
    picard: &PicardConfig<T>,
) -> Result<MarchSolution<T>> {
    picard.validate()?;
    ap.validate()?;
    if !(horizon > T::zero() && horizon.is_finite()) || !(dt > T::zero()) {
        return Err(Error::Config(format!(
            "need horizon > 0 and dt > 0 (got {horizon}, {dt})"
        )));
    }
    let eight = T::lit(8.0);
    let end_tol = T::lit(1e-9) * horizon;
    let mut schedule = WindowSchedule::new(horizon.as_f64());
    let mut full_u = Trajectory::uniform(T::zero(), dt, vec![u0.clone()])?;
    let mut full_v = Trajectory::uniform(T::zero(), dt, vec![u0.map(|u| model.kirchhoff(u))])?;
    let mut ledger = MassLedger::new(T::zero(), crate::ap_solver::total_mass(model, u0));
    let mut current = u0.clone();
    let mut t = T::zero();
    let mut length = picard.initial_window.min(horizon);

    while horizon - t > end_tol {
        let remaining = horizon - t;
        let span = if remaining - length <= end_tol {
            remaining
        } else {
            length
        };
        let window = TimeWindow::covering(t, span, dt.min(span / eight))?;
        match picard_solve(&current, &window, model, pressure, ap, picard) {
            Ok(solution) => {
                current = solution.u.last().clone();
                full_u.append(solution.u)?;
                full_v.append(solution.v)?;
                ledger.extend(solution.ledger);
                schedule.push(ScheduleEntry {
                    t_start: t.as_f64(),
                    t_end: window.t_end().as_f64(),
                    report: solution.report,
                });
                t = window.t_end();
            }
            Err(
                e @ (Error::WindowTooLarge { .. } | Error::PicardCap { .. } | Error::Step { .. }),
            ) => {
                schedule.record_rejection(t.as_f64(), (t + span).as_f64(), &e);
                length = span * T::lit(0.5);
                schedule.halvings += 1;
                if length < picard.window_min {
                    return Err(Error::WindowExhausted {
                        t: t.as_f64(),
                        window_min: picard.window_min.as_f64(),
                        reason: e.to_string(),
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(MarchSolution {
        u: full_u,
        v: full_v,
        ledger,
        schedule,
    })
}

#[cfg(test)]
mod tests;
