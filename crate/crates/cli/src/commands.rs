use std::fmt::Write as _;

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde_json::json;

use moisture_core::ap_solver::{solve_ap, trajectory_csv, ApConfig, TimeWindow, Trajectory};
use moisture_core::constitutive::validate_assumptions;
use moisture_core::diagnostics::{energy_trace, lemma_property_suite};
use moisture_core::fixed_point::{estimate_contraction, march_windows, picard_solve};
use moisture_core::grid::{Grid1D, GridFunction};
use moisture_core::io::{csv_row, fmt_real};
use moisture_core::manufactured;
use moisture_core::pressure::PressureField;

use crate::config::{Setup, VerifySection};
use crate::{Artifact, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Verify,
    Contraction,
    Validate,
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub artifacts: Vec<Artifact>,
    /// Human-readable lines for stdout.
    pub summary: String,
    /// Whether the command's acceptance condition holds.
    pub passed: bool,
}

/// Slack allowed between the Picard tail ratio and the sampled contraction factor.
pub const TAIL_RATIO_SLACK: f64 = 0.05;

pub fn execute(command: Command, setup: &Setup) -> Result<CommandOutput, CliError> {
    match command {
        Command::Run => cmd_run(setup),
        Command::Verify => cmd_verify(setup),
        Command::Contraction => cmd_contraction(setup),
        Command::Validate => cmd_validate(setup),
    }
}

fn text_artifact(setup: &Setup, name: &str, body: &str) -> Artifact {
    Artifact {
        name: name.to_string(),
        contents: format!("{}{body}", setup.header_comment()),
    }
}

fn json_artifact(setup: &Setup, name: &str, mut value: serde_json::Value) -> Artifact {
    if let Some(map) = value.as_object_mut() {
        map.insert("config_sha256".into(), json!(setup.hash));
        map.insert("seed".into(), json!(setup.seed));
    }
    let mut contents = serde_json::to_string_pretty(&value).expect("json serializes");
    contents.push('\n');
    Artifact {
        name: name.to_string(),
        contents,
    }
}

pub fn cmd_run(setup: &Setup) -> Result<CommandOutput, CliError> {
    let sol = march_windows(
        &setup.u0,
        setup.horizon(),
        setup.dt(),
        &setup.model,
        &setup.pressure,
        &setup.ap,
        &setup.picard,
    )?;
    let energy = energy_trace(&sol.u, &setup.model, &setup.pressure);
    let max_residual = sol.ledger.max_abs_residual();
    let schedule = &sol.schedule;

    let mut report = schedule.to_text();
    let _ = writeln!(report, "\n[summary]");
    let _ = writeln!(report, "material = {}", setup.material_name);
    let _ = writeln!(report, "pressure = {}", setup.pressure.describe());
    let _ = writeln!(report, "frames = {}", sol.u.frames().len());
    let _ = writeln!(report, "max_ledger_residual = {}", fmt_real(max_residual));
    let _ = writeln!(report, "max_mu_hat = {}", fmt_real(schedule.max_mu_hat()));
    for w in &energy.warnings {
        let _ = writeln!(report, "warning = {w}");
    }

    let summary = format!(
        "run: {} windows ({} halvings), max mu_hat {:.4}, max ledger residual {:.3e}, {} monitor warnings\n",
        schedule.entries.len(),
        schedule.halvings,
        schedule.max_mu_hat(),
        max_residual,
        energy.warnings.len() + schedule.entries.iter().map(|e| e.report.warnings.len()).sum::<usize>(),
    );
    Ok(CommandOutput {
        artifacts: vec![
            text_artifact(
                setup,
                "trajectory.csv",
                &trajectory_csv(&sol.u, &sol.v, &setup.model)?,
            ),
            text_artifact(setup, "ledger.csv", &sol.ledger.to_csv()),
            text_artifact(setup, "energy.csv", &energy.to_csv()),
            json_artifact(setup, "schedule.json", schedule.to_json_value()),
            text_artifact(setup, "report.txt", &report),
        ],
        summary,
        passed: schedule.all_accepted(),
    })
}

/// `max_n |u_n - u*(t_n)|_H` for the manufactured case.
fn manufactured_error(
    setup: &Setup,
    n_cells: usize,
    dt: f64,
    horizon: f64,
) -> Result<f64, CliError> {
    let grid = Grid1D::new(n_cells)?;
    let ap = ApConfig {
        source: Some(manufactured::source_term(&setup.model, &setup.pressure)?),
        ..setup.ap.clone()
    };
    let window = TimeWindow::covering(0.0, horizon, dt)?;
    let exact = manufactured::exact_trajectory(grid, &window.times())?;
    let sol = solve_ap(
        exact.frame(0),
        &exact,
        &window,
        &setup.model,
        &setup.pressure,
        &ap,
    )?;
    Ok(sol.u.linf_h_distance(&exact)?)
}

/// Observed orders between consecutive levels with refinement ratios `ratios`.
fn pairwise_orders(errors: &[f64], ratios: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .zip(ratios)
        .map(|(e, r)| (e[0] / e[1]).ln() / r.ln())
        .collect()
}

/// Largest deviation from a constant state kept without pressure or source.
fn constant_state_drift(setup: &Setup, n_cells: usize) -> Result<f64, CliError> {
    let grid = Grid1D::new(n_cells)?;
    let c = 0.5;
    let u0 = GridFunction::constant(grid, c);
    let window = TimeWindow::covering(0.0, setup.horizon(), setup.dt())?;
    let frozen = Trajectory::constant_extension(&u0, &window);
    let zero = PressureField::zero(setup.horizon());
    let sol = solve_ap(&u0, &frozen, &window, &setup.model, &zero, &setup.ap)?;
    Ok(sol
        .u
        .frames()
        .iter()
        .flat_map(|f| f.values().iter().map(|&u| (u - c).abs()))
        .fold(0.0, f64::max))
}

pub fn cmd_verify(setup: &Setup) -> Result<CommandOutput, CliError> {
    let v: &VerifySection = setup.raw.verify.as_ref().ok_or_else(|| {
        CliError::Config("verify needs a [verify] section naming a manufactured case".into())
    })?;
    // Rejects pressures whose p_x does not vanish at the ends before any solve.
    manufactured::source_term(&setup.model, &setup.pressure)?;

    let spatial: Vec<f64> = v
        .spatial_cells
        .iter()
        .map(|&n| manufactured_error(setup, n, v.spatial_dt, v.spatial_horizon))
        .collect::<Result<_, _>>()?;
    let temporal: Vec<f64> = v
        .temporal_dts
        .iter()
        .map(|&dt| manufactured_error(setup, v.temporal_cells, dt, v.temporal_horizon))
        .collect::<Result<_, _>>()?;
    let space_ratios: Vec<f64> = v
        .spatial_cells
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect();
    let time_ratios: Vec<f64> = v.temporal_dts.windows(2).map(|w| w[0] / w[1]).collect();
    let space_orders = pairwise_orders(&spatial, &space_ratios);
    let time_orders = pairwise_orders(&temporal, &time_ratios);
    let space_order = space_orders.iter().copied().fold(f64::INFINITY, f64::min);
    let time_order = time_orders.iter().copied().fold(f64::INFINITY, f64::min);
    let monotone = |e: &[f64]| e.windows(2).all(|w| w[1] < w[0]);
    let (space_monotone, time_monotone) = (monotone(&spatial), monotone(&temporal));
    let drift = constant_state_drift(setup, v.spatial_cells[0])?;
    let drift_ok = drift <= 10.0 * setup.ap.newton_tol;

    let mut csv = String::from("study,n_cells,dt,error_linf_h,order\n");
    for (i, (&n, &e)) in v.spatial_cells.iter().zip(&spatial).enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            fmt_real(space_orders[i - 1])
        };
        csv.push_str(&csv_row([
            "space".into(),
            n.to_string(),
            fmt_real(v.spatial_dt),
            fmt_real(e),
            order,
        ]));
    }
    for (i, (&dt, &e)) in v.temporal_dts.iter().zip(&temporal).enumerate() {
        let order = if i == 0 {
            String::new()
        } else {
            fmt_real(time_orders[i - 1])
        };
        csv.push_str(&csv_row([
            "time".into(),
            v.temporal_cells.to_string(),
            fmt_real(dt),
            fmt_real(e),
            order,
        ]));
    }

    let space_ok = space_order >= v.min_spatial_order && space_monotone;
    let time_ok = time_order >= v.min_temporal_order && time_monotone;
    let passed = space_ok && time_ok && drift_ok;
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut report = String::new();
    let _ = writeln!(report, "case = {}", v.case);
    let _ = writeln!(report, "spatial_order = {}", fmt_real(space_order));
    let _ = writeln!(report, "spatial_monotone = {space_monotone}");
    let _ = writeln!(report, "temporal_order = {}", fmt_real(time_order));
    let _ = writeln!(report, "temporal_monotone = {time_monotone}");
    let _ = writeln!(report, "constant_state_drift = {}", fmt_real(drift));
    let _ = writeln!(report, "passed = {passed}");
    let summary = format!(
        "verify: {} spatial order {:.4} (min {}), {} temporal order {:.4} (min {}), {} constant-state drift {:.3e}\n",
        mark(space_ok),
        space_order,
        v.min_spatial_order,
        mark(time_ok),
        time_order,
        v.min_temporal_order,
        mark(drift_ok),
        drift
    );
    Ok(CommandOutput {
        artifacts: vec![
            text_artifact(setup, "convergence.csv", &csv),
            text_artifact(setup, "verify.txt", &report),
        ],
        summary,
        passed,
    })
}

pub fn cmd_contraction(setup: &Setup) -> Result<CommandOutput, CliError> {
    let c = &setup.raw.contraction;
    let m = c.m.unwrap_or(2.0 * setup.u0.seminorm_x_sq() + 1.0);
    let mut levels = Vec::with_capacity(c.halvings + 1);
    for level in 0..=c.halvings {
        let length = c.window / f64::from(1u32 << level.min(31));
        let window = TimeWindow::covering(0.0, length, setup.dt().min(length / 8.0))?;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(setup.seed);
        levels.push(estimate_contraction(
            &setup.model,
            &setup.pressure,
            &window,
            &setup.u0,
            c.n_pairs,
            m,
            &setup.ap,
            &mut rng,
        )?);
    }
    let mu_hat = levels[0].mu_hat;
    let monotone = levels
        .windows(2)
        .all(|w| w[1].mu_hat < w[0].mu_hat || w[0].mu_hat == 0.0);

    let base = TimeWindow::covering(0.0, c.window, setup.dt().min(c.window / 8.0))?;
    let picard = picard_solve(
        &setup.u0,
        &base,
        &setup.model,
        &setup.pressure,
        &setup.ap,
        &setup.picard,
    );
    let (picard_json, tail_ok) = match &picard {
        Ok(sol) => (
            sol.report.to_json_value(),
            sol.report.mu_hat <= mu_hat + TAIL_RATIO_SLACK,
        ),
        Err(e) => (json!({ "error": e.to_string() }), false),
    };

    let value = json!({
        "m": m,
        "mu_hat": mu_hat,
        "c5_plus_c6_hat": levels[0].c5_plus_c6_hat,
        "monotone_under_halving": monotone,
        "levels": levels,
        "picard": picard_json,
        "picard_tail_within_slack": tail_ok,
    });
    let mut lines = String::new();
    for s in &levels {
        let _ = writeln!(
            lines,
            "contraction: window {:.6} max ratio {:.6} median {:.6}",
            s.window[1] - s.window[0],
            s.max_ratio,
            s.median_ratio
        );
    }
    let tail = picard.as_ref().map(|s| s.report.mu_hat).unwrap_or(f64::NAN);
    let _ = writeln!(
        lines,
        "contraction: mu_hat {mu_hat:.6} (< 1: {}), monotone under halving: {monotone}, picard tail ratio {tail:.6}",
        mu_hat < 1.0
    );
    Ok(CommandOutput {
        artifacts: vec![json_artifact(setup, "contraction.json", value)],
        summary: lines,
        passed: mu_hat < 1.0,
    })
}

pub fn cmd_validate(setup: &Setup) -> Result<CommandOutput, CliError> {
    let v = &setup.raw.validate;
    let assumptions = validate_assumptions(&setup.model, setup.model.working_range, v.n_samples)?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(setup.seed);
    let lemmas = lemma_property_suite(&setup.model, Grid1D::new(v.n_cells)?, v.n_random, &mut rng)?;
    let passed = assumptions.passed && lemmas.passed();

    let mut text = format!("material = {}\n", setup.material_name);
    for check in &assumptions.checks {
        let _ = writeln!(
            text,
            "{} {} bound = {} worst = {} at u = {} margin = {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            fmt_real(check.bound),
            fmt_real(check.worst_value),
            fmt_real(check.worst_at),
            fmt_real(check.margin)
        );
    }
    for d in &assumptions.derivatives {
        let _ = writeln!(
            text,
            "{} {} worst_relative_error = {} at u = {}",
            if d.passed { "PASS" } else { "FAIL" },
            d.name,
            fmt_real(d.worst_relative_error),
            fmt_real(d.worst_at)
        );
    }
    text.push_str(&lemmas.to_text());
    let _ = writeln!(text, "passed = {passed}");

    let failed: Vec<String> = assumptions
        .failures()
        .map(str::to_string)
        .chain(lemmas.failures().map(|p| p.name.clone()))
        .collect();
    let summary = if passed {
        format!(
            "validate: PASS {} assumption checks, {} lemma predicates over {} random inputs\n",
            assumptions.checks.len() + assumptions.derivatives.len(),
            lemmas.predicates.len(),
            lemmas.n_random
        )
    } else {
        format!("validate: FAIL {}\n", failed.join("; "))
    };
    Ok(CommandOutput {
        artifacts: vec![
            text_artifact(setup, "validate.txt", &text),
            json_artifact(
                setup,
                "validate.json",
                json!({ "assumptions": assumptions, "lemmas": lemmas, "passed": passed }),
            ),
        ],
        summary,
        passed,
    })
}
