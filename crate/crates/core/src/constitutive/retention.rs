//! Measured brick curves: moisture diffusivity `D(psi_w)` and the retention
//! curve `psi_w(mu)`, plus the same retention curve written in the
//! log-potential coordinate `s = log10(-mu)` where it is smooth on all of R.

use crate::{Error, Real, Result};

pub const DIFFUSIVITY_PREFACTOR: f64 = 30.332e-6;
pub const DIFFUSIVITY_EXPONENT: f64 = 79.8;

/// `(a, c, k, m)` of each retention term `a / (c + exp(k s - m))`.
pub const RETENTION_TERMS: [(f64, f64, f64, f64); 2] =
    [(0.0505, 8.0, 1.0, 2.0), (0.139, 1.1, 2.3, 4.6)];

/// `D(psi_w) = 30.332e-6 * exp(79.8 * psi_w^1.5)`.
pub fn moisture_diffusivity<T: Real>(psi_w: T) -> Result<T> {
    if !(psi_w >= T::zero()) {
        return Err(Error::Domain(format!(
            "water content must be non-negative, got {psi_w}"
        )));
    }
    Ok(T::lit(DIFFUSIVITY_PREFACTOR)
        * (T::lit(DIFFUSIVITY_EXPONENT) * psi_w.powf(T::lit(1.5))).exp())
}

/// Water content as a function of the (negative) chemical potential `mu`.
pub fn water_content<T: Real>(mu: T) -> Result<T> {
    if !(mu < T::zero()) || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "chemical potential must be negative and finite, got {mu}"
        )));
    }
    Ok(retention_log(T::zero(), (-mu).log10())[0])
}

/// Value and first three derivatives in `s = log10(-mu)` of the retention
/// curve, evaluated at `s - shift`.
pub fn retention_log<T: Real>(shift: T, s: T) -> [T; 4] {
    let s = s - shift;
    let mut out = [T::zero(); 4];
    for &(a, c, k, m) in RETENTION_TERMS.iter() {
        let (a, c, k, m) = (T::lit(a), T::lit(c), T::lit(k), T::lit(m));
        let z = k * s - m;
        // r = E/(c+E), q = c/(c+E) with E = exp(z), evaluated without overflow.
        let r = T::one() / (T::one() + c * (-z).exp());
        let q = T::one() / (T::one() + z.exp() / c);
        let rq = r * q;
        let ac = a / c;
        out[0] = out[0] + ac * q;
        out[1] = out[1] - ac * k * rq;
        out[2] = out[2] - ac * k * k * rq * (q - r);
        out[3] = out[3] - ac * k * k * k * rq * (q * q - T::lit(4.0) * q * r + r * r);
    }
    out
}

/// Analytic envelope of the log-coordinate retention curve:
/// `(sup w, sup |w'|, sup |w''|, sup |w'''|, max k)`.
pub(crate) fn retention_envelope() -> [f64; 5] {
    let mut env = [0.0; 5];
    for &(a, c, k, _) in RETENTION_TERMS.iter() {
        env[0] += a / c;
        env[1] += a * k / (4.0 * c);
        env[2] += a * k * k / c / (6.0 * 3f64.sqrt());
        env[3] += a * k * k * k / c / 8.0;
        env[4] = f64::max(env[4], k);
    }
    env
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diffusivity_at_zero() {
        assert_eq!(moisture_diffusivity(0.0f64).unwrap(), 30.332e-6);
        let near = moisture_diffusivity(1e-300f64).unwrap();
        assert!(((near - 30.332e-6) / 30.332e-6).abs() < 1e-9);
        assert!(moisture_diffusivity(-1e-3f64).is_err());
    }

    #[test]
    fn diffusivity_at_point_two() {
        // 50-digit evaluation: 79.8 * 0.2^1.5 = 7.1375289841793287109380823505902...,
        // D = 0.038167217480894654016160300755044777019197241869261
        let expected = 0.038_167_217_480_894_654_f64;
        let got = moisture_diffusivity(0.2f64).unwrap();
        assert!(
            ((got - expected) / expected).abs() < 1e-12,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn water_content_at_minus_hundred() {
        let expected = 0.0505 / 9.0 + 0.139 / 2.1;
        let got = water_content(-100.0f64).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(water_content(0.0f64).is_err());
        assert!(water_content(1.0f64).is_err());
    }

    #[test]
    fn water_content_decreases_and_stays_bounded() {
        assert!(water_content(-1e6f64).unwrap() < water_content(-100.0f64).unwrap());
        let mut prev = f64::INFINITY;
        for j in 0..=4000 {
            // mu from -1e-6 down to -1e12, log-uniform
            let e = -6.0 + 18.0 * j as f64 / 4000.0;
            let w = water_content(-(10f64.powf(e))).unwrap();
            assert!(w > 0.0 && w < 0.2, "w({e}) = {w}");
            assert!(w <= prev);
            prev = w;
        }
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let h = 1e-5;
        for j in 0..60 {
            let s = -6.0 + 0.25 * j as f64;
            let v = retention_log(0.0, s);
            let p = retention_log(0.0, s + h);
            let m = retention_log(0.0, s - h);
            for d in 0..3 {
                let fd = (p[d] - m[d]) / (2.0 * h);
                assert!(
                    (fd - v[d + 1]).abs() <= 1e-6 * v[d + 1].abs().max(1e-3),
                    "d{d} at s={s}"
                );
            }
        }
    }

    #[test]
    fn envelope_bounds_samples() {
        let env = retention_envelope();
        for j in 0..4000 {
            let s = -20.0 + 40.0 * j as f64 / 3999.0;
            let v = retention_log(0.0, s);
            for d in 0..4 {
                assert!(v[d].abs() <= env[d] * (1.0 + 1e-12));
            }
        }
    }
}
