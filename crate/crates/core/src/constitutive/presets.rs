//! Named material presets.

use super::retention::{retention_envelope, DIFFUSIVITY_EXPONENT, DIFFUSIVITY_PREFACTOR};
use super::{Bounds, ConstitutiveModel, LambdaCurve, PsiCurve};
use crate::{Error, Real, Result};

pub const PRESET_NAMES: [&str; 2] = ["synthetic-A", "paper-regularized"];

#[derive(Debug, Clone)]
pub struct MaterialPreset<T> {
    pub name: String,
    pub model: ConstitutiveModel<T>,
    pub provenance: String,
}

pub fn preset<T: Real>(name: &str) -> Result<MaterialPreset<T>> {
    match name {
        "synthetic-A" => Ok(synthetic_a()),
        "paper-regularized" => Ok(paper_regularized()),
        other => Err(Error::Config(format!(
            "unknown material preset '{other}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// `psi(u) = 80 + 1.5 u + 0.5 tanh(u)`, `lambda(u) = 1.5 + 0.5 sin(u)`.
///
/// `psi' = 1.5 + 0.5 sech^2 in [1.5, 2]`, `|psi''| <= 0.385`,
/// `lambda in [1, 2]`, `|lambda'|, |lambda''| <= 0.5`; the offset keeps
/// `psi > 0` on the default range `[-50, 50]`.
pub fn synthetic_a<T: Real>() -> MaterialPreset<T> {
    let model = ConstitutiveModel::new(
        PsiCurve::AffineTanh {
            offset: T::lit(80.0),
            slope: T::lit(1.5),
            amplitude: T::lit(0.5),
        },
        LambdaCurve::Sine {
            base: T::lit(1.5),
            amplitude: T::lit(0.5),
        },
        Bounds {
            delta_psi: T::lit(1.5),
            c_psi: T::lit(2.0),
            delta_lambda: T::lit(1.0),
            c_lambda: T::lit(2.0),
        },
        (T::lit(-50.0), T::lit(50.0)),
    )
    .expect("synthetic-A preset is well formed");
    MaterialPreset {
        name: "synthetic-A".into(),
        model,
        provenance: "analytic test model: psi = 80 + 1.5u + 0.5tanh(u), lambda = 1.5 + 0.5sin(u)"
            .into(),
    }
}

pub const PAPER_DENSITY: f64 = 1000.0;
pub const PAPER_S_REF: f64 = 2.5;
pub const PAPER_PSI_SLOPE: f64 = 1e-3;
pub const PAPER_LAMBDA_SCALE: f64 = 1e4;
pub const PAPER_LAMBDA_FLOOR: f64 = 1e-3;

/// Brick retention and diffusivity curves in the log-potential variable
/// `u = s_ref - log10(-mu)`, with `psi` lifted by a slope `1e-3` and
/// `lambda` by a floor `1e-3`. The default range `u in [-5.5, 5.5]`
/// corresponds to `mu in [-1e8, -1e-3]`.
pub fn paper_regularized<T: Real>() -> MaterialPreset<T> {
    paper_regularized_with(
        PAPER_DENSITY,
        PAPER_S_REF,
        PAPER_PSI_SLOPE,
        PAPER_LAMBDA_SCALE,
        PAPER_LAMBDA_FLOOR,
    )
    .expect("paper-regularized preset is well formed")
}

pub fn paper_regularized_with<T: Real>(
    density: f64,
    s_ref: f64,
    slope: f64,
    scale: f64,
    floor: f64,
) -> Result<MaterialPreset<T>> {
    let [w_max, w1, w2, w3, k_max] = retention_envelope();
    let alpha = DIFFUSIVITY_EXPONENT;
    let d0 = DIFFUSIVITY_PREFACTOR * (alpha * w_max.powf(1.5)).exp();
    let d1 = d0 * 1.5 * alpha * w_max.sqrt();
    let d2_w3 = d0
        * ((1.5 * alpha).powi(2) * w_max * w1.powi(3)
            + 0.75 * alpha * k_max * w_max.sqrt() * w1 * w1);

    let c_psi = f64::max(density * w1 + slope, density * w2);
    let c_lambda = [
        scale * d0 * w1 + floor,
        scale * (d1 * w1 * w1 + d0 * w2),
        scale * (d2_w3 + 3.0 * d1 * w1 * w2 + d0 * w3),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let model = ConstitutiveModel::new(
        PsiCurve::Retention {
            density: T::lit(density),
            s_ref: T::lit(s_ref),
            slope: T::lit(slope),
        },
        LambdaCurve::Retention {
            scale: T::lit(scale),
            floor: T::lit(floor),
            s_ref: T::lit(s_ref),
        },
        Bounds {
            delta_psi: T::lit(slope),
            c_psi: T::lit(c_psi),
            delta_lambda: T::lit(floor),
            c_lambda: T::lit(c_lambda),
        },
        (T::lit(s_ref - 8.0), T::lit(s_ref + 3.0)),
    )?;
    Ok(MaterialPreset {
        name: "paper-regularized".into(),
        model,
        provenance: format!(
            "psi = {density}*psi_w(mu) + {slope}*u, lambda = {scale}*D(psi_w)*dpsi_w/du + {floor}, \
             log10(-mu) = {s_ref} - u; constants from the analytic envelope of the retention curve"
        ),
    })
}
