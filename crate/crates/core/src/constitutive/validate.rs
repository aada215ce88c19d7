use super::ConstitutiveModel;
use crate::{Error, Real, Result};
use serde::Serialize;

const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-6;

/// One sampled bound. `margin` is the worst slack over all samples
/// (negative when violated).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub bound: f64,
    pub worst_value: f64,
    pub worst_at: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Analytic derivative against a central difference of the next-lower derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub name: &'static str,
    pub worst_relative_error: f64,
    pub worst_at: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub range: (f64, f64),
    pub n_samples: usize,
    pub checks: Vec<BoundCheck>,
    pub derivatives: Vec<DerivativeCheck>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .chain(
                self.derivatives
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name),
            )
    }
}

#[derive(Clone, Copy)]
enum Side {
    Lower,
    Upper,
}

struct Tracker {
    name: &'static str,
    bound: f64,
    side: Side,
    worst: Option<(f64, f64, f64)>,
}

impl Tracker {
    fn new(name: &'static str, bound: f64, side: Side) -> Self {
        Self {
            name,
            bound,
            side,
            worst: None,
        }
    }

    fn push(&mut self, at: f64, value: f64) {
        let margin = match self.side {
            Side::Lower => value - self.bound,
            Side::Upper => self.bound - value,
        };
        let margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            margin
        };
        if self.worst.is_none_or(|(m, _, _)| margin < m) {
            self.worst = Some((margin, value, at));
        }
    }

    fn finish(self) -> BoundCheck {
        let (margin, worst_value, worst_at) = self.worst.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        BoundCheck {
            name: self.name,
            bound: self.bound,
            worst_value,
            worst_at,
            margin,
            passed: margin >= 0.0,
        }
    }
}

/// Samples the structural assumptions on `n_samples` equispaced points of `range`.
pub fn validate_assumptions<T: Real>(
    model: &ConstitutiveModel<T>,
    range: (T, T),
    n_samples: usize,
) -> Result<ValidationReport> {
    if n_samples < 2 {
        return Err(Error::Config(format!(
            "validation needs at least 2 samples, got {n_samples}"
        )));
    }
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "empty validation range [{lo}, {hi}]"
        )));
    }
    let b = model.bounds;
    let (dp, cp, dl, cl) = (
        b.delta_psi.as_f64(),
        b.c_psi.as_f64(),
        b.delta_lambda.as_f64(),
        b.c_lambda.as_f64(),
    );
    let mut trackers = [
        Tracker::new("psi positive", 0.0, Side::Lower),
        Tracker::new("psi' >= delta_psi", dp, Side::Lower),
        Tracker::new("psi' <= C_psi", cp, Side::Upper),
        Tracker::new("|psi''| <= C_psi", cp, Side::Upper),
        Tracker::new("lambda >= delta_lambda", dl, Side::Lower),
        Tracker::new("lambda <= C_lambda", cl, Side::Upper),
        Tracker::new("|lambda'| <= C_lambda", cl, Side::Upper),
        Tracker::new("|lambda''| <= C_lambda", cl, Side::Upper),
    ];
    let names = ["psi'", "psi''", "lambda'", "lambda''"];
    let mut deriv_worst = [(0.0f64, f64::NAN); 4];

    let h = T::lit(FD_STEP);
    let two_h = h + h;
    let denom = T::from_usize_lossy(n_samples - 1);
    for j in 0..n_samples {
        let u = lo + (hi - lo) * T::from_usize_lossy(j) / denom;
        let uf = u.as_f64();
        let p = model.psi.eval(u);
        let l = model.lambda.eval(u);
        let values = [
            p[0],
            p[1],
            p[1],
            p[2].abs(),
            l[0],
            l[0],
            l[1].abs(),
            l[2].abs(),
        ];
        for (t, v) in trackers.iter_mut().zip(values) {
            t.push(uf, v.as_f64());
        }

        let (pp, pm) = (model.psi.eval(u + h), model.psi.eval(u - h));
        let (lp, lm) = (model.lambda.eval(u + h), model.lambda.eval(u - h));
        let pairs = [
            (p[1], (pp[0] - pm[0]) / two_h),
            (p[2], (pp[1] - pm[1]) / two_h),
            (l[1], (lp[0] - lm[0]) / two_h),
            (l[2], (lp[1] - lm[1]) / two_h),
        ];
        for (slot, (analytic, fd)) in deriv_worst.iter_mut().zip(pairs) {
            let (a, f) = (analytic.as_f64(), fd.as_f64());
            let rel = (a - f).abs() / a.abs().max(1.0);
            let rel = if rel.is_nan() { f64::INFINITY } else { rel };
            if rel > slot.0 || slot.1.is_nan() {
                *slot = (rel.max(slot.0), uf);
            }
        }
    }

    let checks: Vec<BoundCheck> = trackers.into_iter().map(Tracker::finish).collect();
    let derivatives: Vec<DerivativeCheck> = names
        .iter()
        .zip(deriv_worst)
        .map(|(&name, (rel, at))| DerivativeCheck {
            name,
            worst_relative_error: rel,
            worst_at: at,
            passed: rel <= FD_REL_TOL,
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed) && derivatives.iter().all(|d| d.passed);
    Ok(ValidationReport {
        range: (lo.as_f64(), hi.as_f64()),
        n_samples,
        checks,
        derivatives,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{paper_regularized, synthetic_a, Bounds, LambdaCurve, PsiCurve};
    use super::*;

    #[test]
    fn synthetic_a_passes_dense_sampling() {
        let m = synthetic_a::<f64>().model;
        let r = validate_assumptions(&m, (-10.0, 10.0), 10_000).unwrap();
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.checks.len(), 8);
        let r = validate_assumptions(&m, m.working_range, 10_000).unwrap();
        assert!(r.passed, "{r:#?}");
    }

    #[test]
    fn paper_regularized_passes_with_documented_constants() {
        let m = paper_regularized::<f64>().model;
        let r = validate_assumptions(&m, m.working_range, 10_000).unwrap();
        assert!(r.passed, "{r:#?}");
    }

    #[test]
    fn raised_delta_psi_fails_lower_slope_bound() {
        let m = paper_regularized::<f64>().model;
        let bounds = Bounds {
            delta_psi: 1e-2,
            ..m.bounds
        };
        let r =
            validate_assumptions(&m.with_bounds(bounds).unwrap(), m.working_range, 2_000).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures().collect::<Vec<_>>(), vec!["psi' >= delta_psi"]);
    }

    #[test]
    fn sine_conductivity_passes_with_analytic_bounds() {
        let m = ConstitutiveModel::new(
            PsiCurve::AffineTanh {
                offset: 100.0,
                slope: 1.0,
                amplitude: 0.0,
            },
            LambdaCurve::Sine {
                base: 2.0,
                amplitude: 1.0,
            },
            Bounds {
                delta_psi: 1.0,
                c_psi: 1.0,
                delta_lambda: 1.0,
                c_lambda: 3.0,
            },
            (-50.0, 50.0),
        )
        .unwrap();
        assert!(
            validate_assumptions(&m, (-50.0, 50.0), 5_000)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn too_few_samples_is_rejected() {
        let m = synthetic_a::<f64>().model;
        assert!(validate_assumptions(&m, (-1.0, 1.0), 1).is_err());
    }
}
