//! Scalar nonlinearities of the model and the Kirchhoff-transform family
//! built on top of them.
//!
//! Besides `psi` and `lambda` the model provides
//!
//! * `kirchhoff(u) = int_0^u lambda` and its inverse,
//! * `b(v) = psi(kirchhoff^-1(v))` and `B = b^-1`,
//! * `rho = psi^-1` and `rho_hat(r) = int_O^r rho` with `O = psi(0)`.

mod curves;
mod presets;
pub mod retention;
mod validate;

pub use curves::{LambdaCurve, PsiCurve};
pub use presets::{paper_regularized, preset, synthetic_a, MaterialPreset, PRESET_NAMES};
pub use validate::{validate_assumptions, BoundCheck, DerivativeCheck, ValidationReport};

use crate::numerics::chebyshev::AntiderivativeTable;
use crate::numerics::{quadrature, roots};
use crate::{Error, Real, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The constants of the structural assumptions on `psi` and `lambda`:
/// `delta_psi <= psi' <= c_psi`, `|psi''| <= c_psi`,
/// `delta_lambda <= lambda <= c_lambda`, `|lambda'|, |lambda''| <= c_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds<T> {
    pub delta_psi: T,
    pub c_psi: T,
    pub delta_lambda: T,
    pub c_lambda: T,
}

impl<T: Real> Bounds<T> {
    fn check(&self) -> Result<()> {
        let all = [self.delta_psi, self.c_psi, self.delta_lambda, self.c_lambda];
        if all.iter().any(|c| !(*c > T::zero() && c.is_finite())) {
            return Err(Error::Config(format!(
                "assumption constants must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

const TABLE_PIECE_WIDTH: f64 = 0.5;
const TABLE_MAX_ERROR: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct ConstitutiveModel<T> {
    pub psi: PsiCurve<T>,
    pub lambda: LambdaCurve<T>,
    pub bounds: Bounds<T>,
    /// Sampling range used by validation and by the Kirchhoff table.
    pub working_range: (T, T),
    origin: T,
    table: Option<Arc<AntiderivativeTable<T>>>,
}

impl<T: Real> PartialEq for ConstitutiveModel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.psi == other.psi
            && self.lambda == other.lambda
            && self.bounds == other.bounds
            && self.working_range == other.working_range
    }
}

impl<T: Real> ConstitutiveModel<T> {
    pub fn new(
        psi: PsiCurve<T>,
        lambda: LambdaCurve<T>,
        bounds: Bounds<T>,
        working_range: (T, T),
    ) -> Result<Self> {
        bounds.check()?;
        let (lo, hi) = working_range;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Config(format!("invalid working range [{lo}, {hi}]")));
        }
        let table = if lambda.antiderivative(T::zero()).is_none() {
            let f = move |u: T| lambda.eval(u)[0];
            let lo = lo.min(T::zero());
            let hi = hi.max(T::zero());
            Some(Arc::new(AntiderivativeTable::build(
                f,
                lo,
                hi,
                T::lit(TABLE_PIECE_WIDTH),
                T::lit(TABLE_MAX_ERROR).max(T::epsilon() * T::lit(64.0)),
            )?))
        } else {
            None
        };
        let origin = psi.eval(T::zero())[0];
        Ok(Self {
            psi,
            lambda,
            bounds,
            working_range,
            origin,
            table,
        })
    }

    /// Same curves, different claimed constants.
    pub fn with_bounds(&self, bounds: Bounds<T>) -> Result<Self> {
        bounds.check()?;
        Ok(Self {
            bounds,
            ..self.clone()
        })
    }

    pub fn with_working_range(&self, working_range: (T, T)) -> Result<Self> {
        Self::new(self.psi, self.lambda, self.bounds, working_range)
    }

    /// `O = psi(0)`, the point where `rho` vanishes.
    pub fn origin(&self) -> T {
        self.origin
    }

    #[inline]
    pub fn psi(&self, u: T) -> T {
        self.psi.eval(u)[0]
    }

    #[inline]
    pub fn psi_prime(&self, u: T) -> T {
        self.psi.eval(u)[1]
    }

    #[inline]
    pub fn psi_second(&self, u: T) -> T {
        self.psi.eval(u)[2]
    }

    #[inline]
    pub fn psi_difference(&self, u1: T, u0: T) -> T {
        self.psi.difference(u1, u0)
    }

    #[inline]
    pub fn lambda(&self, u: T) -> T {
        self.lambda.eval(u)[0]
    }

    #[inline]
    pub fn lambda_prime(&self, u: T) -> T {
        self.lambda.eval(u)[1]
    }

    #[inline]
    pub fn lambda_second(&self, u: T) -> T {
        self.lambda.eval(u)[2]
    }

    /// `int_0^u lambda(r) dr`.
    pub fn kirchhoff(&self, u: T) -> T {
        if let Some(v) = self.lambda.antiderivative(u) {
            return v;
        }
        let table = self
            .table
            .as_ref()
            .expect("table exists for curves without antiderivative");
        if let Some(v) = table.eval(u) {
            return v;
        }
        let (lo, hi) = table.range();
        let edge = if u < lo { lo } else { hi };
        let base = table.eval(edge).unwrap_or(T::nan());
        let lambda = self.lambda;
        quadrature::integrate(|r| lambda.eval(r)[0], edge, u, T::lit(1e-13))
            .map(|tail| base + tail)
            .unwrap_or(T::nan())
    }

    /// `int_0^u lambda` by adaptive quadrature, bypassing closed forms and tables.
    pub fn kirchhoff_by_quadrature(&self, u: T) -> Result<T> {
        let lambda = self.lambda;
        quadrature::integrate(|r| lambda.eval(r)[0], T::zero(), u, T::lit(1e-13))
    }

    pub fn kirchhoff_inverse(&self, v: T) -> Result<T> {
        let a = v / self.bounds.c_lambda;
        let b = v / self.bounds.delta_lambda;
        roots::invert_increasing(
            "kirchhoff inverse",
            |u| self.kirchhoff(u),
            |u| self.lambda(u),
            v,
            a,
            b,
        )
    }

    /// `b(v) = psi(kirchhoff^-1(v))`.
    pub fn b(&self, v: T) -> Result<T> {
        Ok(self.psi(self.kirchhoff_inverse(v)?))
    }

    /// `b'(v) = psi'(u) / lambda(u)` at `u = kirchhoff^-1(v)`.
    pub fn b_prime(&self, v: T) -> Result<T> {
        let u = self.kirchhoff_inverse(v)?;
        Ok(self.psi_prime(u) / self.lambda(u))
    }

    /// `rho = psi^-1`.
    pub fn rho(&self, z: T) -> Result<T> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("rho: argument {z} is not finite")));
        }
        let d = z - self.origin;
        roots::invert_increasing(
            "psi inverse",
            |u| self.psi(u),
            |u| self.psi_prime(u),
            z,
            d / self.bounds.c_psi,
            d / self.bounds.delta_psi,
        )
    }

    /// `B = b^-1 = kirchhoff o rho`.
    pub fn big_b(&self, z: T) -> Result<T> {
        Ok(self.kirchhoff(self.rho(z)?))
    }

    /// `rho_hat(r) = int_O^r rho(s) ds`, computed as `int_0^{rho(r)} u psi'(u) du`.
    pub fn rho_hat(&self, r: T) -> Result<T> {
        self.rho_hat_of_potential(self.rho(r)?)
    }

    /// `rho_hat(psi(u)) = int_0^u s psi'(s) ds`, without inverting `psi`.
    pub fn rho_hat_of_potential(&self, u: T) -> Result<T> {
        let psi = self.psi;
        quadrature::integrate(|s| s * psi.eval(s)[1], T::zero(), u, T::lit(1e-13))
    }
}
