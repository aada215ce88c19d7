//! Inversion of strictly increasing scalar maps by safeguarded Newton.

use crate::{Error, Real, Result};

const MAX_ITER: usize = 200;
const MAX_GROWTH: usize = 200;

/// Solves `f(x) = target` for a strictly increasing `f` with derivative `df`.
///
/// `lo_hint..hi_hint` is a first guess for the bracket; it is grown
/// geometrically until it straddles the target. Newton steps that leave the
/// bracket are replaced by bisection. Iterates to full working precision,
/// then checks `|f(x) - target| <= max(1e-12, 1e-12 |target|)`, floored at a
/// few ulps of `target` for single precision.
pub fn invert_increasing<T, F, D>(
    what: &'static str,
    f: F,
    df: D,
    target: T,
    lo_hint: T,
    hi_hint: T,
) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
    D: Fn(T) -> T,
{
    if !target.is_finite() {
        return Err(Error::Domain(format!("{what}: non-finite target {target}")));
    }
    let (mut lo, mut hi) = if lo_hint <= hi_hint {
        (lo_hint, hi_hint)
    } else {
        (hi_hint, lo_hint)
    };
    let mut f_lo = f(lo) - target;
    let mut f_hi = f(hi) - target;
    let mut grown = 0;
    while f_lo > T::zero() || f_hi < T::zero() {
        let width = (hi - lo).max(T::one());
        if f_lo > T::zero() {
            hi = lo;
            f_hi = f_lo;
            lo = lo - width * T::lit(2.0);
            f_lo = f(lo) - target;
        } else {
            lo = hi;
            f_lo = f_hi;
            hi = hi + width * T::lit(2.0);
            f_hi = f(hi) - target;
        }
        grown += 1;
        if grown > MAX_GROWTH
            || !(lo.is_finite() && hi.is_finite())
            || f_lo.is_nan()
            || f_hi.is_nan()
        {
            return Err(Error::RootFind {
                what,
                target: target.as_f64(),
                residual: f64::NAN,
                iterations: grown,
            });
        }
    }
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }

    // Secant point of the bracket is a better start than the midpoint for
    // nearly linear maps.
    let mut x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if !(x > lo && x < hi) {
        x = (lo + hi) * T::lit(0.5);
    }
    let two = T::lit(2.0);
    let mut iterations = 0;
    let mut residual = f(x) - target;
    while iterations < MAX_ITER {
        iterations += 1;
        if residual == T::zero() {
            break;
        }
        if residual < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = df(x);
        let newton = x - residual / slope;
        let next = if slope > T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * T::lit(0.5)
        };
        let step = (next - x).abs();
        x = next;
        residual = f(x) - target;
        let scale = x.abs().max(T::min_positive_value());
        if step <= two * T::epsilon() * scale
            || hi - lo <= two * T::epsilon() * lo.abs().max(hi.abs())
        {
            break;
        }
    }
    let tol = T::lit(1e-12)
        .max(T::lit(1e-12) * target.abs())
        .max(T::lit(8.0) * T::epsilon() * target.abs().max(T::one()));
    if residual.abs() <= tol {
        Ok(x)
    } else {
        Err(Error::RootFind {
            what,
            target: target.as_f64(),
            residual: residual.as_f64(),
            iterations,
        })
    }
}
