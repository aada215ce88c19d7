//! Randomized checks of the structural inequalities:
//!
//! * embedding: `|f(x)|^2 <= |f|_H^2 + 2 |f|_H |f_x|_H` and its `L4` form,
//! * Kirchhoff bounds: `delta_lambda |u| <= |kirchhoff(u)| <= C_lambda |u|`,
//! * `B = b^-1`: `C0 |Bz - Bz1|_H^2 <= (Bz - Bz1, z - z1)_H`,
//!   `C0' |z - z1|_H <= |Bz - Bz1|_H` and `|Bz - Bz1|_H <= (C_lambda / delta_psi) |z - z1|_H`
//!   with `C0 = delta_psi / C_lambda`, `C0' = delta_lambda / C_psi`,
//! * `rho_hat`: `(2 C_psi / delta_psi^2) rho_hat(psi(u)) >= u^2` and
//!   `rho_hat(psi(u)) <= (C_psi / 2)(u^2 + 1)`.

use rand::Rng;
use serde::Serialize;
use std::fmt::Write as _;

use crate::constitutive::ConstitutiveModel;
use crate::grid::{check_sobolev_inequality, Grid1D, GridFunction};
use crate::io::fmt_real;
use crate::{Error, Real, Result};

/// Relative tolerance for round-off in pointwise inequalities.
const ROUNDOFF: f64 = 1e-10;
/// Extra slack on the Lipschitz constant of `B`.
const LIPSCHITZ_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateResult {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    /// Smallest `(rhs - lhs) / max(1, |rhs|)` seen; negative means violated.
    pub worst_margin: f64,
}

impl PredicateResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            samples: 0,
            failures: 0,
            worst_margin: f64::INFINITY,
        }
    }

    /// Records `lhs <= rhs` up to round-off.
    fn record(&mut self, lhs: f64, rhs: f64) {
        let scale = rhs.abs().max(lhs.abs()).max(1.0);
        let margin = (rhs - lhs) / scale;
        self.samples += 1;
        if !(margin >= -ROUNDOFF) {
            self.failures += 1;
        }
        self.worst_margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.worst_margin.min(margin)
        };
    }

    fn record_margin(&mut self, passed: bool, margin: f64) {
        self.samples += 1;
        if !passed {
            self.failures += 1;
        }
        self.worst_margin = self.worst_margin.min(margin);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n_random: usize,
    pub n_cells: usize,
    pub predicates: Vec<PredicateResult>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.predicates.iter().all(PredicateResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PredicateResult> {
        self.predicates.iter().filter(|p| !p.passed())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n_random = {}\nn_cells = {}\n", self.n_random, self.n_cells);
        for p in &self.predicates {
            let _ = writeln!(
                s,
                "{} {} samples = {} failures = {} worst_margin = {}",
                if p.passed() { "PASS" } else { "FAIL" },
                p.name,
                p.samples,
                p.failures,
                fmt_real(p.worst_margin)
            );
        }
        s
    }
}

/// A random grid function: a few Fourier modes, or (one time in four) white noise.
fn random_field<T: Real, R: Rng>(grid: Grid1D<T>, amplitude: f64, rng: &mut R) -> GridFunction<T> {
    if rng.gen_range(0..4) == 0 {
        let values = (0..grid.n_cells())
            .map(|_| T::lit(amplitude * rng.gen_range(-1.0..1.0)))
            .collect();
        return GridFunction::new(grid, values).expect("finite random values");
    }
    let modes = rng.gen_range(1..=8);
    let terms: Vec<(f64, f64, f64)> = (0..=modes)
        .map(|k| {
            (
                k as f64,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let norm: f64 = terms
        .iter()
        .map(|t| t.1.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    GridFunction::from_fn(grid, |x| {
        let x = x.as_f64();
        let s: f64 = terms
            .iter()
            .map(|&(k, a, phase)| a * (std::f64::consts::PI * k * x + phase).cos())
            .sum();
        T::lit(amplitude * s / norm)
    })
}

/// Random potential values inside the model's working range, as a grid function.
fn random_potential<T: Real, R: Rng>(
    model: &ConstitutiveModel<T>,
    grid: Grid1D<T>,
    rng: &mut R,
) -> GridFunction<T> {
    let (lo, hi) = (
        model.working_range.0.as_f64(),
        model.working_range.1.as_f64(),
    );
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let centre = mid + half * rng.gen_range(-0.5..0.5);
    let spread = half - (centre - mid).abs();
    random_field(grid, spread * rng.gen_range(0.0..1.0), rng).map(|u| u + T::lit(centre))
}

fn inner<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> T {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| x * y)
        .sum::<T>()
        * a.grid().dx()
}

/// Runs every predicate on `n_random` random inputs drawn from `rng`.
pub fn lemma_property_suite<T: Real, R: Rng>(
    model: &ConstitutiveModel<T>,
    grid: Grid1D<T>,
    n_random: usize,
    rng: &mut R,
) -> Result<LemmaReport> {
    if n_random == 0 {
        return Err(Error::Config(
            "lemma suite needs at least one random input".into(),
        ));
    }
    let b = model.bounds;
    let (dpsi, cpsi, dlam, clam) = (
        b.delta_psi.as_f64(),
        b.c_psi.as_f64(),
        b.delta_lambda.as_f64(),
        b.c_lambda.as_f64(),
    );
    let (lo, hi) = (
        model.working_range.0.as_f64(),
        model.working_range.1.as_f64(),
    );

    let mut sup = PredicateResult::new("embedding sup |f|^2 <= |f|_H^2 + 2|f|_H|f_x|_H");
    let mut l4 = PredicateResult::new("embedding |f|_L4^4 <= (|f|_H^2 + 2|f|_H|f_x|_H)^2");
    let mut kir_lo = PredicateResult::new("kirchhoff delta_lambda |u| <= |kirchhoff(u)|");
    let mut kir_hi = PredicateResult::new("kirchhoff |kirchhoff(u)| <= C_lambda |u|");
    let mut b_mono = PredicateResult::new("B monotone C0 |Bz - Bz1|^2 <= (Bz - Bz1, z - z1)");
    let mut b_lower = PredicateResult::new("B lower C0' |z - z1| <= |Bz - Bz1|");
    let mut b_lip = PredicateResult::new("B Lipschitz |Bz - Bz1| <= C_lambda / delta_psi |z - z1|");
    let mut rho_lo = PredicateResult::new("rho_hat u^2 <= 2 C_psi / delta_psi^2 rho_hat(psi(u))");
    let mut rho_hi = PredicateResult::new("rho_hat rho_hat(psi(u)) <= C_psi / 2 (u^2 + 1)");

    let c0 = dpsi / clam;
    let c0_prime = dlam / cpsi;
    let lipschitz = clam / dpsi + LIPSCHITZ_SLACK;

    for _ in 0..n_random {
        let amplitude = 10f64.powf(rng.gen_range(-3.0..2.0));
        let f = random_field(grid, amplitude, rng);
        let m = check_sobolev_inequality(&f)?;
        sup.record_margin(m.sup_margin >= 0.0, m.sup_margin / m.sup_bound.max(1.0));
        l4.record_margin(m.l4_margin >= 0.0, m.l4_margin / m.l4_bound.max(1.0));

        let u: f64 = rng.gen_range(lo..hi);
        let k = model.kirchhoff(T::lit(u)).as_f64().abs();
        kir_lo.record(dlam * u.abs(), k);
        kir_hi.record(k, clam * u.abs());

        let r = model.rho_hat_of_potential(T::lit(u))?.as_f64();
        rho_lo.record(u * u, 2.0 * cpsi / (dpsi * dpsi) * r);
        rho_hi.record(r, 0.5 * cpsi * (u * u + 1.0));

        let z = random_potential(model, grid, rng).map(|u| model.psi(u));
        let z1 = random_potential(model, grid, rng).map(|u| model.psi(u));
        let bz = z.try_map(|x| model.big_b(x))?;
        let bz1 = z1.try_map(|x| model.big_b(x))?;
        let db = bz.sub(&bz1)?;
        let dz = z.sub(&z1)?;
        let (db_norm, dz_norm) = (db.norm_h().as_f64(), dz.norm_h().as_f64());
        b_mono.record(c0 * db_norm * db_norm, inner(&db, &dz).as_f64());
        b_lower.record(c0_prime * dz_norm, db_norm);
        b_lip.record(db_norm, lipschitz * dz_norm);
    }

    Ok(LemmaReport {
        n_random,
        n_cells: grid.n_cells(),
        predicates: vec![
            sup, l4, kir_lo, kir_hi, b_mono, b_lower, b_lip, rho_lo, rho_hi,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{paper_regularized, synthetic_a, Bounds, LambdaCurve, PsiCurve};
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn rng() -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(2024)
    }

    #[test]
    fn synthetic_model_passes_everything() {
        let model = synthetic_a::<f64>().model;
        let report =
            lemma_property_suite(&model, Grid1D::new(512).unwrap(), 1000, &mut rng()).unwrap();
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.predicates.iter().all(|p| p.samples == 1000));
    }

    #[test]
    fn paper_model_passes_with_its_documented_bounds() {
        let model = paper_regularized::<f64>().model;
        let report =
            lemma_property_suite(&model, Grid1D::new(128).unwrap(), 200, &mut rng()).unwrap();
        assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn degenerate_conductivity_fails_the_kirchhoff_lower_bound() {
        let pi = std::f64::consts::PI;
        let model = ConstitutiveModel::new(
            PsiCurve::AffineTanh {
                offset: 10.0,
                slope: 1.0,
                amplitude: 0.0,
            },
            LambdaCurve::Sine {
                base: 1.0,
                amplitude: 1.0,
            },
            Bounds {
                delta_psi: 1.0,
                c_psi: 1.0,
                delta_lambda: 0.5,
                c_lambda: 2.0,
            },
            (-2.0 * pi, 2.0 * pi),
        )
        .unwrap();
        let report =
            lemma_property_suite(&model, Grid1D::new(64).unwrap(), 300, &mut rng()).unwrap();
        let failed: Vec<_> = report.failures().map(|p| p.name.as_str()).collect();
        assert!(
            failed.contains(&"kirchhoff delta_lambda |u| <= |kirchhoff(u)|"),
            "{failed:?}"
        );
        assert!(!report.passed());
    }

    #[test]
    fn zero_samples_is_an_error() {
        let model = synthetic_a::<f64>().model;
        let result = lemma_property_suite(&model, Grid1D::new(16).unwrap(), 0, &mut rng());
        assert!(matches!(result, Err(Error::Config(_))));
    }
}
