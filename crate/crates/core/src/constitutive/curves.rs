//! Closed-form curve families for the storage map `psi` and conductivity `lambda`.

use super::retention::{retention_log, DIFFUSIVITY_EXPONENT, DIFFUSIVITY_PREFACTOR};
use crate::Real;
use serde::{Deserialize, Serialize};

/// Storage map `psi(u)` (mass per unit volume as a function of the potential).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiCurve<T> {
    /// `offset + slope * u + amplitude * tanh(u)`
    AffineTanh { offset: T, slope: T, amplitude: T },
    /// `density * w(u) + slope * u` with `w(u)` the retention curve at
    /// `log10(-mu) = s_ref - u`.
    Retention { density: T, s_ref: T, slope: T },
}

/// Conductivity `lambda(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaCurve<T> {
    Constant {
        value: T,
    },
    /// `base + amplitude * sin(u)`
    Sine {
        base: T,
        amplitude: T,
    },
    /// `scale * D(w(u)) * w'(u) + floor`, the brick conductivity
    /// `D(psi_w) dpsi_w/dmu` in log-potential form, lifted by `floor`.
    Retention {
        scale: T,
        floor: T,
        s_ref: T,
    },
}

/// `w, w', w'', w'''` in the potential variable `u`.
#[inline]
fn retention_u<T: Real>(s_ref: T, u: T) -> [T; 4] {
    let d = retention_log(T::zero(), s_ref - u);
    [d[0], -d[1], d[2], -d[3]]
}

impl<T: Real> PsiCurve<T> {
    /// `[psi, psi', psi'']`
    pub fn eval(&self, u: T) -> [T; 3] {
        match *self {
            PsiCurve::AffineTanh {
                offset,
                slope,
                amplitude,
            } => {
                let th = u.tanh();
                let sech2 = T::one() - th * th;
                [
                    offset + slope * u + amplitude * th,
                    slope + amplitude * sech2,
                    -T::lit(2.0) * amplitude * sech2 * th,
                ]
            }
            PsiCurve::Retention {
                density,
                s_ref,
                slope,
            } => {
                let w = retention_u(s_ref, u);
                [
                    density * w[0] + slope * u,
                    density * w[1] + slope,
                    density * w[2],
                ]
            }
        }
    }

    /// `psi(u1) - psi(u0)` without passing through the constant part of `psi`.
    pub fn difference(&self, u1: T, u0: T) -> T {
        match *self {
            PsiCurve::AffineTanh {
                slope, amplitude, ..
            } => slope * (u1 - u0) + amplitude * (u1.tanh() - u0.tanh()),
            PsiCurve::Retention {
                density,
                s_ref,
                slope,
            } => {
                density * (retention_u(s_ref, u1)[0] - retention_u(s_ref, u0)[0])
                    + slope * (u1 - u0)
            }
        }
    }
}

impl<T: Real> LambdaCurve<T> {
    /// `[lambda, lambda', lambda'']`
    pub fn eval(&self, u: T) -> [T; 3] {
        match *self {
            LambdaCurve::Constant { value } => [value, T::zero(), T::zero()],
            LambdaCurve::Sine { base, amplitude } => {
                let (s, c) = u.sin_cos();
                [base + amplitude * s, amplitude * c, -amplitude * s]
            }
            LambdaCurve::Retention {
                scale,
                floor,
                s_ref,
            } => {
                let w = retention_u(s_ref, u);
                let alpha = T::lit(DIFFUSIVITY_EXPONENT);
                let ww = w[0].max(T::zero());
                let d0 = T::lit(DIFFUSIVITY_PREFACTOR) * (alpha * ww.powf(T::lit(1.5))).exp();
                let d1 = d0 * T::lit(1.5) * alpha * ww.sqrt();
                // D'' carries w^{-1/2}; its product with w'^3 vanishes as w -> 0.
                let d2_w3 = if w[1] == T::zero() || ww == T::zero() {
                    T::zero()
                } else {
                    let c = T::lit(1.5) * alpha;
                    d0 * (c * c * ww + T::lit(0.75) * alpha / ww.sqrt()) * w[1] * w[1] * w[1]
                };
                [
                    scale * d0 * w[1] + floor,
                    scale * (d1 * w[1] * w[1] + d0 * w[2]),
                    scale * (d2_w3 + T::lit(3.0) * d1 * w[1] * w[2] + d0 * w[3]),
                ]
            }
        }
    }

    /// `int_0^u lambda` when an elementary antiderivative exists.
    pub fn antiderivative(&self, u: T) -> Option<T> {
        match *self {
            LambdaCurve::Constant { value } => Some(value * u),
            LambdaCurve::Sine { base, amplitude } => {
                // 1 - cos(u) = 2 sin^2(u/2), exact near zero.
                let h = (u * T::lit(0.5)).sin();
                Some(base * u + amplitude * T::lit(2.0) * h * h)
            }
            LambdaCurve::Retention { .. } => None,
        }
    }
}
