//! Solver for the 1D moisture transport equation
//!
//! ```text
//!   d/dt psi(u) = d/dx ( lambda(u) d/dx (u + p) )   on (0, T) x (0, 1)
//!   lambda(u) u_x + p_x = 0                          at x = 0, 1
//! ```
//!
//! with a given pressure field `p`. The nonlinear diffusion is removed by the
//! Kirchhoff transform `v = int_0^u lambda`, each frozen-coefficient auxiliary
//! problem is solved by backward Euler finite volumes with Newton iterations,
//! and the pressure coupling `lambda(u) p_x` is resolved by a Picard
//! fixed-point iteration over adaptively shrunk time windows.
//!
//! All numerical code is generic over [`Real`]; the aliases at the bottom of
//! this file fix the scalar to `f64`, which is what the command line tool uses.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Stencil loops read several arrays at neighbouring indices.
#![allow(clippy::needless_range_loop)]

pub mod ap_solver;
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod fixed_point;
pub mod grid;
pub mod io;
pub mod manufactured;
pub mod numerics;
pub mod pressure;

pub use error::{Error, Result};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

/// Floating point scalar used throughout the solver: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts a literal constant. Panics only if the constant is not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Grid = grid::Grid1D<f64>;
pub type Field = grid::GridFunction<f64>;
pub type Model = constitutive::ConstitutiveModel<f64>;
pub type Pressure = pressure::PressureField<f64>;
pub type Traj = ap_solver::Trajectory<f64>;
pub type Ap = ap_solver::ApConfig<f64>;
pub type Picard = fixed_point::PicardConfig<f64>;
