//! The auxiliary problem with frozen coupling coefficient.
//!
//! For a given trajectory `u~`, solves
//!
//! ```text
//!   d/dt b(v) = v_xx + d/dx( lambda(u~) p_x ) + S,    v_x + p_x = 0 at x = 0, 1
//! ```
//!
//! in the Kirchhoff variable `v` with backward Euler in time and cell-centered
//! finite volumes in space. The boundary condition is substituted into the
//! boundary fluxes, so the total flux through `x = 0` and `x = 1` is
//! `(lambda(u~) - 1) p_x`, and the scheme conserves `sum psi(u_i) dx` up to
//! those fluxes and the Newton tolerance.

mod ledger;
mod newton;

pub use ledger::{total_mass, LedgerEntry, MassLedger};
pub use newton::{newton_solve, NewtonOutcome, NewtonSettings, NonlinearSystem, MAX_HALVINGS};

use std::fmt;
use std::sync::Arc;

use crate::constitutive::ConstitutiveModel;
use crate::grid::{Grid1D, GridFunction};
use crate::io::{csv_row, fmt_real};
use crate::numerics::tridiag::Tridiagonal;
use crate::pressure::PressureField;
use crate::{Error, Real, Result};

/// Frames of a field at increasing times, all on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    grid: Grid1D<T>,
    times: Vec<T>,
    frames: Vec<GridFunction<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(times: Vec<T>, frames: Vec<GridFunction<T>>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::Domain("trajectory needs at least one frame".into()))?;
        if times.len() != frames.len() {
            return Err(Error::Domain(format!(
                "{} times for {} frames",
                times.len(),
                frames.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "trajectory times must be finite and increasing".into(),
            ));
        }
        for f in &frames {
            first.same_grid(f)?;
        }
        Ok(Self {
            grid: *first.grid(),
            times,
            frames,
        })
    }

    /// Frames at `t0 + n dt`, `n = 0..frames.len()`.
    pub fn uniform(t0: T, dt: T, frames: Vec<GridFunction<T>>) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::Domain(format!("time step {dt} must be positive")));
        }
        let times = (0..frames.len())
            .map(|n| t0 + dt * T::from_usize_lossy(n))
            .collect();
        Self::new(times, frames)
    }

    /// `u0` repeated on every time level of `window`.
    pub fn constant_extension(u0: &GridFunction<T>, window: &TimeWindow<T>) -> Self {
        Self {
            grid: *u0.grid(),
            times: window.times(),
            frames: vec![u0.clone(); window.steps + 1],
        }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn frames(&self) -> &[GridFunction<T>] {
        &self.frames
    }

    pub fn frame(&self, n: usize) -> &GridFunction<T> {
        &self.frames[n]
    }

    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn t0(&self) -> T {
        self.times[0]
    }

    pub fn t_end(&self) -> T {
        self.times[self.times.len() - 1]
    }

    pub fn last(&self) -> &GridFunction<T> {
        &self.frames[self.frames.len() - 1]
    }

    /// Discrete `L^2(t0, t_end; X)` norm squared: `sum_{n >= 1} (t_n - t_{n-1}) |f_n|_X^2`.
    /// Frame 0 is left out because every iterate of a window shares it.
    pub fn l2x_norm_sq(&self) -> T {
        self.times
            .windows(2)
            .zip(&self.frames[1..])
            .map(|(w, f)| (w[1] - w[0]) * f.norm_x_sq())
            .sum()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.times != other.times {
            return Err(Error::GridMismatch(
                "trajectories differ in grid or time levels".into(),
            ));
        }
        Ok(())
    }

    /// Frame-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let frames = self
            .frames
            .iter()
            .zip(&other.frames)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid: self.grid,
            times: self.times.clone(),
            frames,
        })
    }

    pub fn l2x_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.l2x_norm_sq().sqrt())
    }

    /// `max_n |self_n - other_n|_H`
    pub fn linf_h_distance(&self, other: &Self) -> Result<T> {
        Ok(self
            .sub(other)?
            .frames
            .iter()
            .fold(T::zero(), |m, f| m.max(f.norm_h())))
    }

    /// `max_n |d/dx f_n|_H^2`
    pub fn sup_gradient_sq(&self) -> T {
        self.frames
            .iter()
            .fold(T::zero(), |m, f| m.max(f.seminorm_x_sq()))
    }

    /// Appends a trajectory whose first frame continues this one's last.
    pub fn append(&mut self, next: Trajectory<T>) -> Result<()> {
        if next.grid != self.grid {
            return Err(Error::GridMismatch(
                "appended trajectory is on another grid".into(),
            ));
        }
        let gap = (next.t0() - self.t_end()).abs();
        if gap > T::lit(1e-12) * self.t_end().abs().max(T::one()) {
            return Err(Error::Domain(format!(
                "appended trajectory starts at {} but this one ends at {}",
                next.t0(),
                self.t_end()
            )));
        }
        self.times.extend(next.times.into_iter().skip(1));
        self.frames.extend(next.frames.into_iter().skip(1));
        Ok(())
    }

    /// Keeps every frame whose time matches one of `times` (within `tol`).
    pub fn sample_at(&self, times: &[T], tol: T) -> Result<Self> {
        let mut frames = Vec::with_capacity(times.len());
        let mut j = 0;
        for &t in times {
            while j < self.times.len() && self.times[j] < t - tol {
                j += 1;
            }
            if j == self.times.len() || (self.times[j] - t).abs() > tol {
                return Err(Error::Domain(format!("no frame at t = {t}")));
            }
            frames.push(self.frames[j].clone());
        }
        Self::new(times.to_vec(), frames)
    }
}

/// Uniform time levels `t0 + n dt`, `n = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow<T> {
    pub t0: T,
    pub dt: T,
    pub steps: usize,
}

impl<T: Real> TimeWindow<T> {
    pub fn new(t0: T, dt: T, steps: usize) -> Result<Self> {
        if !(dt > T::zero()) || !t0.is_finite() || !dt.is_finite() {
            return Err(Error::Domain(format!(
                "invalid window t0 = {t0}, dt = {dt}"
            )));
        }
        Ok(Self { t0, dt, steps })
    }

    /// Covers `[t0, t0 + length]` with the largest step `<= dt_max` that divides it evenly.
    pub fn covering(t0: T, length: T, dt_max: T) -> Result<Self> {
        if !(length > T::zero()) {
            return Err(Error::Domain(format!(
                "window length {length} must be positive"
            )));
        }
        let steps = (length / dt_max - T::lit(1e-9)).ceil().max(T::one());
        let steps = steps
            .to_usize()
            .ok_or_else(|| Error::Domain("too many time steps".into()))?;
        Self::new(t0, length / T::from_usize_lossy(steps), steps)
    }

    pub fn time(&self, n: usize) -> T {
        self.t0 + self.dt * T::from_usize_lossy(n)
    }

    pub fn t_end(&self) -> T {
        self.time(self.steps)
    }

    pub fn length(&self) -> T {
        self.dt * T::from_usize_lossy(self.steps)
    }

    pub fn times(&self) -> Vec<T> {
        (0..=self.steps).map(|n| self.time(n)).collect()
    }
}

/// `S(t, x)` added to the right-hand side; used by manufactured solutions.
pub type SourceTerm<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct ApConfig<T> {
    pub newton_tol: T,
    pub newton_max_iter: usize,
    pub line_search: bool,
    pub source: Option<SourceTerm<T>>,
}

impl<T: Real> Default for ApConfig<T> {
    fn default() -> Self {
        Self {
            newton_tol: T::lit(1e-10),
            newton_max_iter: 50,
            line_search: true,
            source: None,
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ApConfig<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApConfig")
            .field("newton_tol", &self.newton_tol)
            .field("newton_max_iter", &self.newton_max_iter)
            .field("line_search", &self.line_search)
            .field("source", &self.source.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl<T: Real> ApConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > T::zero()) || self.newton_max_iter == 0 {
            return Err(Error::Config(format!(
                "newton_tol must be positive and newton_max_iter nonzero (got {}, {})",
                self.newton_tol, self.newton_max_iter
            )));
        }
        Ok(())
    }

    fn newton(&self) -> NewtonSettings<T> {
        NewtonSettings {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
            line_search: self.line_search,
        }
    }
}

/// Everything one implicit step produces.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<T> {
    pub v: GridFunction<T>,
    pub u: GridFunction<T>,
    pub flux_left: T,
    pub flux_right: T,
    /// `dx * sum_i S(t_next, x_i)`
    pub source_integral: T,
    pub newton_iterations: usize,
}

/// Residual of one backward Euler step, scaled by `dx`:
/// `(psi(u_i) - psi(u_old_i)) dx / dt - (F_{i+1/2} - F_{i-1/2}) - dx S_i`.
struct StepSystem<'a, T> {
    model: &'a ConstitutiveModel<T>,
    u_old: &'a [T],
    dx: T,
    dt: T,
    /// Total fluxes `F_{k}` at faces `k = 0..=n` with the `v` part left out.
    face_flux: Vec<T>,
    cell_source: Vec<T>,
}

impl<T: Real> StepSystem<'_, T> {
    fn invert(&self, v: &[T]) -> Result<Vec<T>> {
        v.iter()
            .map(|&vi| self.model.kirchhoff_inverse(vi))
            .collect()
    }
}

impl<T: Real> NonlinearSystem<T> for StepSystem<'_, T> {
    fn dim(&self) -> usize {
        self.u_old.len()
    }

    fn evaluate(
        &self,
        v: &[T],
        residual: &mut [T],
        jacobian: Option<&mut Tridiagonal<T>>,
    ) -> Result<()> {
        let n = v.len();
        let u = self.invert(v)?;
        let storage = self.dx / self.dt;
        let inv_dx = self.dx.recip();
        let flux = |k: usize| {
            if k == 0 || k == n {
                self.face_flux[k]
            } else {
                (v[k] - v[k - 1]) * inv_dx + self.face_flux[k]
            }
        };
        let mut left = flux(0);
        for i in 0..n {
            let right = flux(i + 1);
            residual[i] = self.model.psi_difference(u[i], self.u_old[i]) * storage
                - (right - left)
                - self.cell_source[i];
            left = right;
        }
        if let Some(jac) = jacobian {
            for i in 0..n {
                let b_prime = self.model.psi_prime(u[i]) / self.model.lambda(u[i]);
                let faces = usize::from(i > 0) + usize::from(i + 1 < n);
                jac.diag[i] = b_prime * storage + T::from_usize_lossy(faces) * inv_dx;
                jac.lower[i] = if i > 0 { -inv_dx } else { T::zero() };
                jac.upper[i] = if i + 1 < n { -inv_dx } else { T::zero() };
            }
        }
        Ok(())
    }
}

fn frozen_fluxes<T: Real>(
    u_tilde: &GridFunction<T>,
    t: T,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
) -> Vec<T> {
    let grid = u_tilde.grid();
    let ut = u_tilde.values();
    let n = grid.n_cells();
    let half = T::lit(0.5);
    let (trace0, trace1) = u_tilde.boundary_trace();
    let mut flux = Vec::with_capacity(n + 1);
    flux.push((model.lambda(trace0) - T::one()) * pressure.p_x(t, T::zero()));
    for k in 1..n {
        let face_value = (ut[k - 1] + ut[k]) * half;
        flux.push(model.lambda(face_value) * pressure.p_x(t, grid.face(k)));
    }
    flux.push((model.lambda(trace1) - T::one()) * pressure.p_x(t, T::one()));
    flux
}

#[allow(clippy::too_many_arguments)]
fn advance<T: Real>(
    u_n: &GridFunction<T>,
    v_n: &GridFunction<T>,
    u_tilde_frame: &GridFunction<T>,
    t_next: T,
    dt: T,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    config: &ApConfig<T>,
) -> Result<StepOutcome<T>> {
    v_n.same_grid(u_tilde_frame)?;
    if !(dt > T::zero()) {
        return Err(Error::Domain(format!("time step {dt} must be positive")));
    }
    let grid = *v_n.grid();
    let dx = grid.dx();
    let face_flux = frozen_fluxes(u_tilde_frame, t_next, model, pressure);
    let cell_source: Vec<T> = match &config.source {
        Some(s) => grid.centers().map(|x| dx * s(t_next, x)).collect(),
        None => vec![T::zero(); grid.n_cells()],
    };
    let system = StepSystem {
        model,
        u_old: u_n.values(),
        dx,
        dt,
        face_flux,
        cell_source,
    };
    let outcome = newton_solve(&system, v_n.values().to_vec(), &config.newton())?;
    let u = system.invert(&outcome.solution)?;
    let n = grid.n_cells();
    Ok(StepOutcome {
        v: GridFunction::new(grid, outcome.solution)?,
        u: GridFunction::new(grid, u)?,
        flux_left: system.face_flux[0],
        flux_right: system.face_flux[n],
        source_integral: system.cell_source.iter().copied().sum(),
        newton_iterations: outcome.iterations,
    })
}

/// One backward Euler step from `v_n` to `t_next = t_n + dt`.
pub fn step_ap<T: Real>(
    v_n: &GridFunction<T>,
    u_tilde_frame: &GridFunction<T>,
    t_next: T,
    dt: T,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    config: &ApConfig<T>,
) -> Result<StepOutcome<T>> {
    let u_n = v_n.try_map(|v| model.kirchhoff_inverse(v))?;
    advance(
        &u_n,
        v_n,
        u_tilde_frame,
        t_next,
        dt,
        model,
        pressure,
        config,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApSolution<T> {
    pub u: Trajectory<T>,
    pub v: Trajectory<T>,
    pub ledger: MassLedger<T>,
    pub newton_iterations: Vec<usize>,
}

fn check_covers<T: Real>(u_tilde: &Trajectory<T>, window: &TimeWindow<T>) -> Result<()> {
    let times = u_tilde.times();
    let tol = T::lit(1e-9) * window.t_end().abs().max(T::one());
    if times.len() < window.steps + 1
        || (0..=window.steps).any(|n| (times[n] - window.time(n)).abs() > tol)
    {
        return Err(Error::Domain(format!(
            "u~ does not provide the {} time levels of the window starting at {}",
            window.steps + 1,
            window.t0
        )));
    }
    Ok(())
}

/// Solves the auxiliary problem for the frozen trajectory `u_tilde` on `window`.
pub fn solve_ap<T: Real>(
    u0: &GridFunction<T>,
    u_tilde: &Trajectory<T>,
    window: &TimeWindow<T>,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    config: &ApConfig<T>,
) -> Result<ApSolution<T>> {
    config.validate()?;
    if !u0.is_finite() {
        return Err(Error::Domain("initial condition is not finite".into()));
    }
    u0.same_grid(u_tilde.frame(0))?;
    check_covers(u_tilde, window)?;

    let v0 = u0.map(|u| model.kirchhoff(u));
    if !v0.is_finite() {
        return Err(Error::Domain(
            "kirchhoff transform of the initial condition is not finite".into(),
        ));
    }
    let mut ledger = MassLedger::new(window.t0, total_mass(model, u0));
    let mut u_frames = Vec::with_capacity(window.steps + 1);
    let mut v_frames = Vec::with_capacity(window.steps + 1);
    let mut iterations = Vec::with_capacity(window.steps);
    u_frames.push(u0.clone());
    v_frames.push(v0);
    for n in 1..=window.steps {
        let t = window.time(n);
        let step = advance(
            &u_frames[n - 1],
            &v_frames[n - 1],
            u_tilde.frame(n),
            t,
            window.dt,
            model,
            pressure,
            config,
        )
        .map_err(|e| Error::Step {
            step: n,
            t: t.as_f64(),
            source: Box::new(e),
        })?;
        ledger.record(
            t,
            window.dt,
            total_mass(model, &step.u),
            step.flux_left,
            step.flux_right,
            window.dt * step.source_integral,
        );
        iterations.push(step.newton_iterations);
        u_frames.push(step.u);
        v_frames.push(step.v);
    }
    let times = window.times();
    Ok(ApSolution {
        u: Trajectory::new(times.clone(), u_frames)?,
        v: Trajectory::new(times, v_frames)?,
        ledger,
        newton_iterations: iterations,
    })
}

/// CSV `t,x,u,v,psi_u`, one row per cell per frame.
pub fn trajectory_csv<T: Real>(
    u: &Trajectory<T>,
    v: &Trajectory<T>,
    model: &ConstitutiveModel<T>,
) -> Result<String> {
    u.check_compatible(v)?;
    let mut out = String::from("t,x,u,v,psi_u\n");
    for ((t, uf), vf) in u.times().iter().zip(u.frames()).zip(v.frames()) {
        for ((x, &ui), &vi) in u.grid().centers().zip(uf.values()).zip(vf.values()) {
            out.push_str(&csv_row([
                fmt_real(t.as_f64()),
                fmt_real(x.as_f64()),
                fmt_real(ui.as_f64()),
                fmt_real(vi.as_f64()),
                fmt_real(model.psi(ui).as_f64()),
            ]));
        }
    }
    Ok(out)
}
