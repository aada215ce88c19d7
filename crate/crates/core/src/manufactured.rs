//! Manufactured solution `u*(t, x) = exp(-t) cos(pi x)` for order studies.
//!
//! `u*_x` vanishes at both ends, so `u*` satisfies the boundary condition for
//! any pressure whose `p_x` vanishes there (`zero`, `separable_sin`). The
//! source is chosen so that `u*` solves the coupled equation with `u~ = u*`,
//! which also makes `u*` the fixed point of the solution operator.

use std::sync::Arc;

use crate::ap_solver::{SourceTerm, Trajectory};
use crate::constitutive::ConstitutiveModel;
use crate::grid::{Grid1D, GridFunction};
use crate::pressure::PressureField;
use crate::{Error, Real, Result};

/// `[u, u_t, u_x, u_xx]` of the manufactured solution.
pub fn exact<T: Real>(t: T, x: T) -> [T; 4] {
    let pi = T::PI();
    let decay = (-t).exp();
    let (s, c) = (pi * x).sin_cos();
    let u = decay * c;
    [u, -u, -pi * decay * s, -pi * pi * u]
}

pub fn exact_frame<T: Real>(grid: Grid1D<T>, t: T) -> GridFunction<T> {
    GridFunction::from_fn(grid, |x| exact(t, x)[0])
}

pub fn exact_trajectory<T: Real>(grid: Grid1D<T>, times: &[T]) -> Result<Trajectory<T>> {
    Trajectory::new(
        times.to_vec(),
        times.iter().map(|&t| exact_frame(grid, t)).collect(),
    )
}

/// `S = psi'(u) u_t - [lambda'(u) u_x (u_x + p_x) + lambda(u) (u_xx + p_xx)]` at `u = u*`.
pub fn source_value<T: Real>(
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    t: T,
    x: T,
) -> T {
    let [u, ut, ux, uxx] = exact(t, x);
    let [_, px, pxx] = pressure.eval(t, x);
    model.psi_prime(u) * ut
        - (model.lambda_prime(u) * ux * (ux + px) + model.lambda(u) * (uxx + pxx))
}

/// Packages [`source_value`] for [`crate::ap_solver::ApConfig::source`].
pub fn source_term<T: Real>(
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
) -> Result<SourceTerm<T>> {
    let (a, b) = pressure.boundary_gradient(T::zero());
    let h = pressure.horizon();
    let (c, d) = pressure.boundary_gradient(h * T::lit(0.37));
    let scale = pressure.sup_px().max(T::one());
    let tol = T::lit(1e-12) * scale;
    if [a, b, c, d].iter().any(|g| g.abs() > tol) {
        return Err(Error::Config(format!(
            "manufactured solution needs p_x = 0 at both ends; pressure is {}",
            pressure.describe()
        )));
    }
    let model = model.clone();
    let pressure = pressure.clone();
    Ok(Arc::new(move |t, x| source_value(&model, &pressure, t, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::synthetic_a;
    use crate::pressure::AnalyticParams;

    /// Evaluates `d/dt psi(u*) - d/dx(lambda(u*) d/dx(u* + p))` with nested
    /// central differences of the closed forms, independent of the symbolic source.
    fn fd_operator(model: &ConstitutiveModel<f64>, p: &PressureField<f64>, t: f64, x: f64) -> f64 {
        let h = 1e-4;
        let u = |t: f64, x: f64| exact::<f64>(t, x)[0];
        let dpsi_dt = (model.psi(u(t + h, x)) - model.psi(u(t - h, x))) / (2.0 * h);
        let flux = |x: f64| {
            let dw = (u(t, x + h) + p.p(t, x + h) - u(t, x - h) - p.p(t, x - h)) / (2.0 * h);
            model.lambda(u(t, x)) * dw
        };
        let dflux = (flux(x + h) - flux(x - h)) / (2.0 * h);
        dpsi_dt - dflux
    }

    #[test]
    fn closed_form_derivatives() {
        let h = 1e-6;
        for (t, x) in [(0.1, 0.2), (0.7, 0.55), (1.3, 0.9)] {
            let [u, ut, ux, uxx] = exact::<f64>(t, x);
            assert!(
                (ut - (exact::<f64>(t + h, x)[0] - exact(t - h, x)[0]) / (2.0 * h)).abs() < 1e-8
            );
            assert!((ux - (exact(t, x + h)[0] - exact(t, x - h)[0]) / (2.0 * h)).abs() < 1e-8);
            assert!((uxx - (exact(t, x + h)[2] - exact(t, x - h)[2]) / (2.0 * h)).abs() < 1e-7);
            assert!(u.is_finite());
        }
        assert_eq!(exact::<f64>(0.3, 0.0)[2], 0.0);
        assert!(exact::<f64>(0.3, 1.0)[2].abs() < 1e-15);
    }

    #[test]
    fn source_matches_finite_difference_operator() {
        let model = synthetic_a::<f64>().model;
        for name in ["zero", "separable_sin", "linear_in_x"] {
            let p = PressureField::analytic(name, AnalyticParams::default(), 1.0).unwrap();
            for (t, x) in [(0.05, 0.1), (0.4, 0.5), (0.9, 0.83), (0.2, 0.31)] {
                let s = source_value(&model, &p, t, x);
                let fd = fd_operator(&model, &p, t, x);
                assert!(
                    (s - fd).abs() < 1e-6 * s.abs().max(1.0),
                    "{name} ({t},{x}): {s} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn incompatible_pressure_is_rejected() {
        let model = synthetic_a::<f64>().model;
        let p = PressureField::analytic("linear_in_x", AnalyticParams::default(), 1.0).unwrap();
        assert!(matches!(source_term(&model, &p), Err(Error::Config(_))));
        let p = PressureField::analytic("separable_sin", AnalyticParams::default(), 1.0).unwrap();
        assert!(source_term(&model, &p).is_ok());
    }
}
