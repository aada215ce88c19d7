//! Cubic spline through cell-center samples on a uniform grid.
//!
//! The end conditions are not-a-knot (continuous third derivative at the
//! second and second-to-last knots), so the interpolant reproduces cubics
//! and its derivative stays fourth-order accurate up to the boundary.
//! Points outside the knot range are evaluated on the continued end cubic.

use crate::grid::GridFunction;
use crate::numerics::tridiag::Tridiagonal;
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpline<T> {
    x0: T,
    h: T,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> CellSpline<T> {
    pub fn new(f: &GridFunction<T>) -> Result<Self> {
        let n = f.len();
        let h = f.grid().dx();
        let y = f.values();
        // unknowns M_1 .. M_{n-2}
        let m = n - 2;
        let mut sys = Tridiagonal::zeros(m);
        let mut rhs = vec![T::zero(); m];
        let six = T::lit(6.0);
        for r in 0..m {
            let i = r + 1;
            rhs[r] = six * (y[i + 1] - (y[i] + y[i]) + y[i - 1]) / (h * h);
            sys.lower[r] = T::one();
            sys.diag[r] = T::lit(4.0);
            sys.upper[r] = T::one();
        }
        // M_0 = 2 M_1 - M_2 and M_{n-1} = 2 M_{n-2} - M_{n-3} folded into the end rows
        sys.diag[0] = six;
        sys.upper[0] = T::zero();
        sys.diag[m - 1] = six;
        sys.lower[m - 1] = T::zero();
        let inner = sys
            .solve(&rhs)
            .ok_or_else(|| Error::Ingest("spline system is singular".into()))?;
        let mut second = Vec::with_capacity(n);
        second.push(inner[0] + inner[0] - inner[1]);
        second.extend_from_slice(&inner);
        second.push(inner[m - 1] + inner[m - 1] - inner[m - 2]);
        Ok(Self {
            x0: f.grid().x(0),
            h,
            values: y.to_vec(),
            second,
        })
    }

    /// `[s(x), s'(x), s''(x)]`
    pub fn eval(&self, x: T) -> [T; 3] {
        let n = self.values.len();
        let pos = (x - self.x0) / self.h;
        let j = pos.floor().to_isize().unwrap_or(0).clamp(0, n as isize - 2) as usize;
        let xj = self.x0 + self.h * T::from_usize_lossy(j);
        let b = (x - xj) / self.h;
        let a = T::one() - b;
        let (fj, fk) = (self.values[j], self.values[j + 1]);
        let (mj, mk) = (self.second[j], self.second[j + 1]);
        let h = self.h;
        let six = T::lit(6.0);
        let three = T::lit(3.0);
        let value = a * fj + b * fk + ((a * a * a - a) * mj + (b * b * b - b) * mk) * h * h / six;
        let slope = (fk - fj) / h - (three * a * a - T::one()) * h * mj / six
            + (three * b * b - T::one()) * h * mk / six;
        let curvature = a * mj + b * mk;
        [value, slope, curvature]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    #[test]
    fn reproduces_cubics_including_extrapolation() {
        let g = Grid1D::<f64>::new(9).unwrap();
        let f = GridFunction::from_fn(g, |x| 2.0 * x * x * x - x * x + 0.5 * x - 3.0);
        let s = CellSpline::new(&f).unwrap();
        for j in 0..=50 {
            let x = j as f64 / 50.0;
            let [v, d, dd] = s.eval(x);
            assert!((v - (2.0 * x * x * x - x * x + 0.5 * x - 3.0)).abs() < 1e-12);
            assert!((d - (6.0 * x * x - 2.0 * x + 0.5)).abs() < 1e-10);
            assert!((dd - (12.0 * x - 2.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn smallest_grid_is_a_single_cubic() {
        let g = Grid1D::<f64>::new(4).unwrap();
        let f = GridFunction::from_fn(g, |x| x * x * x);
        let s = CellSpline::new(&f).unwrap();
        assert!((s.eval(0.0)[1]).abs() < 1e-12);
        assert!((s.eval(1.0)[1] - 3.0).abs() < 1e-12);
    }
}
