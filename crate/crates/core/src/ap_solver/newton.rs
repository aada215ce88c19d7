//! Damped Newton iteration for systems with a tridiagonal Jacobian.

use crate::numerics::tridiag::Tridiagonal;
use crate::{Error, Real, Result};

pub const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings<T> {
    /// Target for the max-norm of the residual.
    pub tol: T,
    pub max_iter: usize,
    /// Halve the update (up to [`MAX_HALVINGS`] times) until the residual norm decreases.
    pub line_search: bool,
}

/// A square system `F(x) = 0` whose Jacobian is tridiagonal.
pub trait NonlinearSystem<T> {
    fn dim(&self) -> usize;

    /// Writes `F(x)` into `residual` and, when requested, `F'(x)` into `jacobian`.
    fn evaluate(
        &self,
        x: &[T],
        residual: &mut [T],
        jacobian: Option<&mut Tridiagonal<T>>,
    ) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// Max-norm residual before each update and after the last one.
    pub history: Vec<f64>,
}

fn max_norm<T: Real>(r: &[T]) -> T {
    r.iter().fold(T::zero(), |m, v| {
        if v.is_nan() {
            T::nan()
        } else {
            m.max(v.abs())
        }
    })
}

pub fn newton_solve<T: Real, S: NonlinearSystem<T>>(
    system: &S,
    initial: Vec<T>,
    settings: &NewtonSettings<T>,
) -> Result<NewtonOutcome<T>> {
    let n = system.dim();
    assert_eq!(initial.len(), n, "initial guess has wrong dimension");
    let mut x = initial;
    let mut residual = vec![T::zero(); n];
    let mut jac = Tridiagonal::zeros(n);
    let mut trial = vec![T::zero(); n];
    let mut trial_residual = vec![T::zero(); n];
    let mut history = Vec::new();
    let fail = |reason: String, iterations: usize, history: &[f64]| Error::Newton {
        reason,
        iterations,
        history: history.to_vec(),
    };

    system.evaluate(&x, &mut residual, Some(&mut jac))?;
    let mut norm = max_norm(&residual);
    history.push(norm.as_f64());
    let mut iterations = 0;
    loop {
        if !norm.is_finite() {
            return Err(fail("residual is not finite".into(), iterations, &history));
        }
        if norm <= settings.tol {
            return Ok(NewtonOutcome {
                solution: x,
                iterations,
                history,
            });
        }
        if iterations >= settings.max_iter {
            return Err(fail("iteration cap reached".into(), iterations, &history));
        }
        let rhs: Vec<T> = residual.iter().map(|&r| -r).collect();
        let delta = jac
            .solve(&rhs)
            .ok_or_else(|| fail("singular jacobian".into(), iterations, &history))?;
        iterations += 1;

        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            for ((t, &xi), &di) in trial.iter_mut().zip(&x).zip(&delta) {
                *t = xi + alpha * di;
            }
            let evaluated = system.evaluate(&trial, &mut trial_residual, None);
            if !settings.line_search {
                evaluated
                    .map_err(|e| fail(format!("full step failed: {e}"), iterations, &history))?;
                accepted = true;
                break;
            }
            if evaluated.is_ok() && max_norm(&trial_residual) < norm {
                accepted = true;
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            return Err(fail(
                "line search could not reduce the residual".into(),
                iterations,
                &history,
            ));
        }
        std::mem::swap(&mut x, &mut trial);
        system.evaluate(&x, &mut residual, Some(&mut jac))?;
        norm = max_norm(&residual);
        history.push(norm.as_f64());
    }
}
