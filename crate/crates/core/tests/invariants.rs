//! Structural invariants of the solver exercised through the public API.

use moisture_core::ap_solver::{solve_ap, total_mass, ApConfig, TimeWindow, Trajectory};
use moisture_core::constitutive::synthetic_a;
use moisture_core::fixed_point::{picard_solve, PicardConfig};
use moisture_core::grid::{Grid1D, GridFunction};
use moisture_core::pressure::{AnalyticParams, PressureField};
use moisture_core::{Field, Grid, Model};
use proptest::prelude::*;

fn model() -> Model {
    synthetic_a().model
}

/// `c0 + sum_k a_k cos(k pi x)`
fn cosine_series(grid: Grid, c0: f64, coeffs: &[f64]) -> Field {
    GridFunction::from_fn(grid, |x| {
        c0 + coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * x).cos())
            .sum::<f64>()
    })
}

fn bounds(f: &Field) -> (f64, f64) {
    f.values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pure_diffusion_conserves_mass_and_range(
        c0 in -2.0..2.0f64,
        coeffs in prop::collection::vec(-1.0..1.0f64, 1..4),
        dt in 1e-3..5e-2f64,
    ) {
        let grid = Grid::new(32).unwrap();
        let u0 = cosine_series(grid, c0, &coeffs);
        let window = TimeWindow::new(0.0, dt, 10).unwrap();
        let frozen = Trajectory::constant_extension(&u0, &window);
        let m = model();
        let sol = solve_ap(&u0, &frozen, &window, &m, &PressureField::zero(1.0), &ApConfig::default()).unwrap();
        let (m0, m1) = (total_mass(&m, &u0), total_mass(&m, sol.u.last()));
        prop_assert!((m1 - m0).abs() <= 1e-10 * m0.abs());
        let (lo, hi) = bounds(&u0);
        for frame in sol.u.frames() {
            let (a, b) = bounds(frame);
            prop_assert!(a >= lo - 1e-9 && b <= hi + 1e-9);
        }
    }

    #[test]
    fn accepted_picard_windows_balance_their_ledger(
        amplitude in 0.0..5.0f64,
        coeffs in prop::collection::vec(-0.8..0.8f64, 1..3),
    ) {
        let grid = Grid::new(24).unwrap();
        let params = AnalyticParams { amplitude, ..Default::default() };
        let p = PressureField::analytic("separable_sin", params, 1.0).unwrap();
        let window = TimeWindow::new(0.0, 0.005, 8).unwrap();
        let ap = ApConfig::default();
        let sol = picard_solve(&cosine_series(grid, 0.4, &coeffs), &window, &model(), &p, &ap, &PicardConfig::default()).unwrap();
        prop_assert!(sol.report.accepted);
        prop_assert!(sol.report.mu_hat < 1.0);
        prop_assert!(sol.ledger.max_abs_residual() <= 10.0 * ap.newton_tol);
        prop_assert_eq!(sol.u.times(), sol.v.times());
    }

    #[test]
    fn kirchhoff_transform_inverts(u in -40.0..40.0f64) {
        let m = model();
        let v = m.kirchhoff(u);
        prop_assert!((m.kirchhoff_inverse(v).unwrap() - u).abs() <= 1e-9 * u.abs().max(1.0));
    }
}

#[test]
fn single_precision_instantiation_runs() {
    let m = synthetic_a::<f32>().model;
    let grid = Grid1D::<f32>::new(16).unwrap();
    let u0 = GridFunction::from_fn(grid, |x| 0.5 + 0.5 * (std::f32::consts::PI * x).cos());
    let window = TimeWindow::new(0.0f32, 0.01, 5).unwrap();
    let frozen = Trajectory::constant_extension(&u0, &window);
    let ap = ApConfig {
        newton_tol: 1e-4,
        ..ApConfig::default()
    };
    let sol = solve_ap(&u0, &frozen, &window, &m, &PressureField::zero(1.0), &ap).unwrap();
    let (m0, m1) = (total_mass(&m, &u0), total_mass(&m, sol.u.last()));
    assert!((m1 - m0).abs() <= 1e-4 * m0.abs());
}
