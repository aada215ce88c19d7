use super::*;
use crate::constitutive::synthetic_a;
use crate::grid::Grid1D;
use crate::manufactured;
use crate::pressure::AnalyticParams;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

fn model() -> ConstitutiveModel<f64> {
    synthetic_a::<f64>().model
}

fn sin_pressure(amplitude: f64, horizon: f64) -> PressureField<f64> {
    let params = AnalyticParams {
        amplitude,
        ..Default::default()
    };
    PressureField::analytic("separable_sin", params, horizon).unwrap()
}

fn initial(grid: Grid1D<f64>) -> GridFunction<f64> {
    GridFunction::from_fn(grid, |x| {
        0.5 + 0.8 * (std::f64::consts::PI * x).cos() - 0.3 * x * x
    })
}

fn picard() -> PicardConfig<f64> {
    PicardConfig {
        window_min: 1e-3,
        initial_window: 1.0,
        ..PicardConfig::default()
    }
}

fn stiff_pressure() -> PressureField<f64> {
    sin_pressure(100.0, 1.0)
}

#[test]
fn zero_pressure_converges_after_one_correction() {
    let grid = Grid1D::new(32).unwrap();
    let window = TimeWindow::new(0.0, 0.05, 20).unwrap();
    let p = PressureField::zero(1.0);
    let report = picard_solve(
        &initial(grid),
        &window,
        &model(),
        &p,
        &ApConfig::default(),
        &picard(),
    )
    .unwrap()
    .report;
    assert_eq!(report.iterations, 2);
    assert!(report.diffs[0] > 0.0);
    assert_eq!(report.diffs[1], 0.0);
    assert_eq!(report.mu_hat, 0.0);
    assert!(report.accepted);
}

#[test]
fn gamma_reproduces_manufactured_fixed_point() {
    let grid = Grid1D::new(128).unwrap();
    let m = model();
    let p = sin_pressure(1.0, 1.0);
    let ap = ApConfig {
        source: Some(manufactured::source_term(&m, &p).unwrap()),
        ..ApConfig::default()
    };
    let window = TimeWindow::new(0.0, 1e-3, 50).unwrap();
    let exact = manufactured::exact_trajectory(grid, &window.times()).unwrap();
    let image = gamma(&exact, exact.frame(0), &window, &m, &p, &ap).unwrap();
    // Discretisation error of the scheme at this resolution, not a Picard error.
    assert!(image.linf_h_distance(&exact).unwrap() < 2e-4);
}

#[test]
fn distinct_initial_guesses_reach_the_same_fixed_point() {
    let grid = Grid1D::new(48).unwrap();
    let u0 = initial(grid);
    let window = TimeWindow::new(0.0, 0.01, 20).unwrap();
    let p = sin_pressure(5.0, 1.0);
    let (ap, cfg) = (ApConfig::default(), picard());
    let PicardSolution {
        u: a, report: ra, ..
    } = picard_solve(&u0, &window, &model(), &p, &ap, &cfg).unwrap();
    let other =
        Trajectory::constant_extension(&GridFunction::from_fn(grid, |x| 3.0 * x - 1.0), &window);
    let PicardSolution {
        u: b, report: rb, ..
    } = picard_solve_from(other, &u0, &window, &model(), &p, &ap, &cfg).unwrap();
    assert!(a.l2x_distance(&b).unwrap() < 10.0 * cfg.picard_tol);
    for r in [&ra, &rb] {
        assert!(r.fixed_point_residual < 10.0 * cfg.picard_tol);
        assert!(r.mu_hat < 1.0 && r.accepted);
        assert!(r.diffs.last().unwrap() < &cfg.picard_tol);
    }
}

#[test]
fn stiff_full_window_is_rejected_before_the_cap() {
    let grid = Grid1D::new(64).unwrap();
    let window = TimeWindow::covering(0.0, 1.0, 1.0 / 160.0).unwrap();
    let result = picard_solve(
        &initial(grid),
        &window,
        &model(),
        &stiff_pressure(),
        &ApConfig::default(),
        &picard(),
    );
    match result {
        Err(Error::WindowTooLarge { ratios, .. }) => {
            assert!(ratios.len() < picard().picard_max_iter)
        }
        other => panic!("expected window-too-large, got {other:?}"),
    }
}

#[test]
fn stiff_case_with_window_min_at_horizon_is_fatal() {
    let grid = Grid1D::new(64).unwrap();
    let cfg = PicardConfig {
        window_min: 1.0,
        initial_window: 1.0,
        ..PicardConfig::default()
    };
    let result = march_windows(
        &initial(grid),
        1.0,
        1.0 / 160.0,
        &model(),
        &stiff_pressure(),
        &ApConfig::default(),
        &cfg,
    );
    assert!(
        matches!(result, Err(Error::WindowExhausted { .. })),
        "{result:?}"
    );
}

#[test]
fn zero_pressure_march_uses_one_window() {
    let grid = Grid1D::new(32).unwrap();
    let p = PressureField::zero(1.0);
    let MarchSolution {
        u: traj, schedule, ..
    } = march_windows(
        &initial(grid),
        1.0,
        0.05,
        &model(),
        &p,
        &ApConfig::default(),
        &picard(),
    )
    .unwrap();
    assert_eq!(schedule.entries.len(), 1);
    assert_eq!(schedule.halvings, 0);
    assert_eq!(traj.steps(), 20);
    assert!((traj.t_end() - 1.0).abs() < 1e-12);
}

#[test]
fn stiff_march_halves_and_partitions_the_horizon() {
    let grid = Grid1D::new(32).unwrap();
    let cfg = PicardConfig {
        window_min: 1e-5,
        ..picard()
    };
    let MarchSolution {
        u: traj, schedule, ..
    } = march_windows(
        &initial(grid),
        0.2,
        1.0 / 640.0,
        &model(),
        &stiff_pressure(),
        &ApConfig::default(),
        &cfg,
    )
    .unwrap();
    assert!(schedule.halvings > 0);
    assert_eq!(schedule.entries[0].t_start, 0.0);
    for w in schedule.entries.windows(2) {
        assert_eq!(w[0].t_end, w[1].t_start);
    }
    assert!((schedule.entries.last().unwrap().t_end - 0.2).abs() < 1e-12);
    assert!(schedule.all_accepted());
    assert!(schedule.entries.iter().all(|e| e.report.mu_hat < 1.0));
    assert!((traj.t_end() - 0.2).abs() < 1e-12);
}

#[test]
fn march_ledger_and_kirchhoff_frames_cover_the_horizon() {
    let grid = Grid1D::new(24).unwrap();
    let cfg = PicardConfig {
        initial_window: 0.25,
        ..picard()
    };
    let ap = ApConfig::default();
    let sol = march_windows(
        &initial(grid),
        1.0,
        0.025,
        &model(),
        &sin_pressure(2.0, 1.0),
        &ap,
        &cfg,
    )
    .unwrap();
    assert_eq!(sol.schedule.entries.len(), 4);
    assert_eq!(sol.u.steps(), 40);
    assert_eq!(sol.v.times(), sol.u.times());
    assert_eq!(sol.ledger.entries.len(), 40);
    assert_eq!(sol.ledger.entries.last().unwrap().step, 40);
    assert!(sol.ledger.max_abs_residual() <= 10.0 * ap.newton_tol);
    let mass = crate::ap_solver::total_mass(&model(), sol.u.last());
    assert_eq!(mass.to_bits(), sol.ledger.last_mass().to_bits());
}

#[test]
fn march_matches_tiny_window_reference() {
    let grid = Grid1D::new(32).unwrap();
    let dt = 1.0 / 320.0;
    let u0 = initial(grid);
    let p = sin_pressure(1.0, 1.0);
    let (ap, cfg) = (ApConfig::default(), picard());
    let MarchSolution {
        u: traj, schedule, ..
    } = march_windows(&u0, 1.0, dt, &model(), &p, &ap, &cfg).unwrap();
    assert!(schedule
        .entries
        .iter()
        .all(|e| e.report.mu_hat < cfg.contraction_threshold));
    let tiny = PicardConfig {
        initial_window: 8.0 * dt,
        window_min: 8.0 * dt,
        ..cfg
    };
    let MarchSolution {
        u: reference,
        schedule: ref_schedule,
        ..
    } = march_windows(&u0, 1.0, dt, &model(), &p, &ap, &tiny).unwrap();
    assert_eq!(ref_schedule.entries.len(), 40);
    let reference = reference.sample_at(traj.times(), 1e-9).unwrap();
    let traj = Trajectory::new(reference.times().to_vec(), traj.frames().to_vec()).unwrap();
    assert!(traj.linf_h_distance(&reference).unwrap() < 1e-5);
}

#[test]
fn picard_is_deterministic() {
    let grid = Grid1D::new(24).unwrap();
    let window = TimeWindow::new(0.0, 0.02, 10).unwrap();
    let p = sin_pressure(5.0, 1.0);
    let run = || {
        picard_solve(
            &initial(grid),
            &window,
            &model(),
            &p,
            &ApConfig::default(),
            &picard(),
        )
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a.report.to_json(), b.report.to_json());
}

#[test]
fn report_json_has_exactly_the_documented_fields() {
    let grid = Grid1D::new(16).unwrap();
    let window = TimeWindow::new(0.0, 0.02, 8).unwrap();
    let report = picard_solve(
        &initial(grid),
        &window,
        &model(),
        &sin_pressure(1.0, 1.0),
        &ApConfig::default(),
        &picard(),
    )
    .unwrap()
    .report;
    let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    let mut keys: Vec<_> = value.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "accepted",
            "c5_plus_c6_hat",
            "diffs",
            "iterations",
            "mu_hat",
            "ratios",
            "window"
        ]
    );
    assert!(report.to_text().contains("mu_hat = "));
}

#[test]
fn contraction_is_zero_without_pressure() {
    let grid = Grid1D::new(32).unwrap();
    let window = TimeWindow::new(0.0, 0.005, 10).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let p = PressureField::zero(1.0);
    let stats = estimate_contraction(
        &model(),
        &p,
        &window,
        &initial(grid),
        5,
        10.0,
        &ApConfig::default(),
        &mut rng,
    )
    .unwrap();
    assert!(stats.ratios.iter().all(|&r| r == 0.0));
    assert_eq!(stats.mu_hat, 0.0);
}

#[test]
fn contraction_shrinks_with_the_window() {
    let grid = Grid1D::new(48).unwrap();
    let u0 = initial(grid);
    let p = sin_pressure(20.0, 1.0);
    let mut previous = f64::INFINITY;
    for halving in 0..4 {
        let len = 0.05 / f64::from(1 << halving);
        let window = TimeWindow::covering(0.0, len, (1.0f64 / 320.0).min(len / 8.0)).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let stats = estimate_contraction(
            &model(),
            &p,
            &window,
            &u0,
            20,
            10.0,
            &ApConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(stats.mu_hat < 1.0);
        assert!(
            stats.mu_hat < previous,
            "window {len}: {} !< {previous}",
            stats.mu_hat
        );
        assert!(stats.median_ratio <= stats.max_ratio);
        previous = stats.mu_hat;
    }
}

#[test]
fn contraction_rejects_bad_arguments() {
    let grid = Grid1D::new(16).unwrap();
    let window = TimeWindow::new(0.0, 0.01, 8).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0);
    let p = sin_pressure(1.0, 1.0);
    let ap = ApConfig::default();
    assert!(estimate_contraction(
        &model(),
        &p,
        &window,
        &initial(grid),
        0,
        10.0,
        &ap,
        &mut rng
    )
    .is_err());
    assert!(estimate_contraction(
        &model(),
        &p,
        &window,
        &initial(grid),
        2,
        1e-3,
        &ap,
        &mut rng
    )
    .is_err());
}

#[test]
fn random_pairs_respect_the_gradient_bound() {
    let grid = Grid1D::new(64).unwrap();
    let u0 = initial(grid);
    let window = TimeWindow::new(0.0, 0.01, 12).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    for _ in 0..50 {
        let (a, b) = random_pair(&u0, &window, 6.0, &mut rng).unwrap();
        assert!(a.sup_gradient_sq() <= 6.0 && b.sup_gradient_sq() <= 6.0);
        assert!(a.l2x_distance(&b).unwrap() > 0.0);
    }
}

#[test]
fn config_validation() {
    let bad = [
        PicardConfig {
            contraction_threshold: 1.0,
            ..picard()
        },
        PicardConfig {
            picard_tol: 0.0,
            ..picard()
        },
        PicardConfig {
            window_min: 2.0,
            ..picard()
        },
    ];
    for cfg in bad {
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
    assert!(picard().validate().is_ok());
}
