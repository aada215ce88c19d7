//! Numerical check of the time regularity of `p`: finite-difference estimates of
//! `int_0^T |p_t|_H^2`, `int_0^T |p_txx|_H^2` and `int_0^T |h_t(., i)|^2`
//! under successive refinement. Time is refined by 4x per level, so a square
//! integrable `p_t` gives level ratios near 1 while a jump makes them grow
//! like the refinement factor.

use super::PressureField;
use crate::Real;
use serde::Serialize;

pub const DIVERGENCE_RATIO: f64 = 2.0;
const TIME_REFINEMENT: usize = 4;
const LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityLevel {
    pub n_t: usize,
    pub n_x: usize,
    pub p_t_sq: f64,
    pub p_txx_sq: f64,
    pub h_t_sq: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub levels: Vec<RegularityLevel>,
    /// Largest ratio between successive levels over all four integrals.
    pub worst_ratio: f64,
    pub flagged: bool,
}

fn level<T: Real>(field: &PressureField<T>, horizon: T, n_t: usize, n_x: usize) -> RegularityLevel {
    let dt = horizon / T::from_usize_lossy(n_t);
    let dx = T::one() / T::from_usize_lossy(n_x);
    let xs: Vec<T> = (0..n_x)
        .map(|i| (T::from_usize_lossy(i) + T::lit(0.5)) * dx)
        .collect();
    let sample = |t: T| -> (Vec<[T; 3]>, [T; 2]) {
        (
            xs.iter().map(|&x| field.eval(t, x)).collect(),
            [field.p_x(t, T::zero()), field.p_x(t, T::one())],
        )
    };
    let (mut p_t, mut p_txx) = (T::zero(), T::zero());
    let mut h_t = [T::zero(); 2];
    let mut prev = sample(T::zero());
    for k in 1..=n_t {
        let next = sample(dt * T::from_usize_lossy(k));
        for (a, b) in prev.0.iter().zip(&next.0) {
            let d0 = (b[0] - a[0]) / dt;
            let d2 = (b[2] - a[2]) / dt;
            p_t = p_t + d0 * d0 * dx * dt;
            p_txx = p_txx + d2 * d2 * dx * dt;
        }
        for i in 0..2 {
            let d = (next.1[i] - prev.1[i]) / dt;
            h_t[i] = h_t[i] + d * d * dt;
        }
        prev = next;
    }
    RegularityLevel {
        n_t,
        n_x,
        p_t_sq: p_t.as_f64(),
        p_txx_sq: p_txx.as_f64(),
        h_t_sq: [h_t[0].as_f64(), h_t[1].as_f64()],
    }
}

/// Runs three levels starting from `(n_t, n_x)`; time is refined 4x and
/// space 2x per level.
pub fn regularity_report<T: Real>(
    field: &PressureField<T>,
    horizon: T,
    n_t: usize,
    n_x: usize,
) -> RegularityReport {
    let levels: Vec<_> = (0..LEVELS)
        .map(|l| {
            level(
                field,
                horizon,
                n_t * TIME_REFINEMENT.pow(l as u32),
                n_x << l,
            )
        })
        .collect();
    let mut worst_ratio: f64 = 0.0;
    for w in levels.windows(2) {
        let pairs = [
            (w[0].p_t_sq, w[1].p_t_sq),
            (w[0].p_txx_sq, w[1].p_txx_sq),
            (w[0].h_t_sq[0], w[1].h_t_sq[0]),
            (w[0].h_t_sq[1], w[1].h_t_sq[1]),
        ];
        for (coarse, fine) in pairs {
            // integrals at roundoff level carry no information
            if fine > 1e-20 && coarse > 1e-20 {
                worst_ratio = worst_ratio.max(fine / coarse);
            }
        }
    }
    RegularityReport {
        levels,
        worst_ratio,
        flagged: worst_ratio > DIVERGENCE_RATIO,
    }
}
