//! Chebyshev interpolants and a piecewise antiderivative table built from them.

use super::quadrature;
use crate::{Error, Real, Result};

/// `f(x) ~ c0/2 + sum_{k>=1} c_k T_k(t)` with `t` the affine image of `x` in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries<T> {
    a: T,
    b: T,
    coeffs: Vec<T>,
}

impl<T: Real> ChebyshevSeries<T> {
    /// Interpolates `f` at `n` Chebyshev points of the first kind.
    pub fn fit<F: Fn(T) -> T>(f: F, a: T, b: T, n: usize) -> Self {
        assert!(n >= 2 && b > a);
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let nn = T::from_usize_lossy(n);
        let pi = T::PI();
        let samples: Vec<T> = (0..n)
            .map(|j| {
                let theta = pi * (T::from_usize_lossy(j) + T::lit(0.5)) / nn;
                f(mid + half * theta.cos())
            })
            .collect();
        let coeffs = (0..n)
            .map(|k| {
                let kk = T::from_usize_lossy(k);
                let s: T = samples
                    .iter()
                    .enumerate()
                    .map(|(j, &fj)| {
                        fj * (pi * kk * (T::from_usize_lossy(j) + T::lit(0.5)) / nn).cos()
                    })
                    .sum();
                s * T::lit(2.0) / nn
            })
            .collect();
        Self { a, b, coeffs }
    }

    pub fn domain(&self) -> (T, T) {
        (self.a, self.b)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: T) -> T {
        let t = (x * T::lit(2.0) - self.a - self.b) / (self.b - self.a);
        let two_t = t * T::lit(2.0);
        let mut b1 = T::zero();
        let mut b2 = T::zero();
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = two_t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0] * T::lit(0.5)
    }

    /// Antiderivative vanishing at the left end of the domain.
    pub fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        let scale = (self.b - self.a) * T::lit(0.5);
        let c = |k: usize| if k < n { self.coeffs[k] } else { T::zero() };
        let mut out = vec![T::zero(); n + 1];
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = scale * (c(k - 1) - c(k + 1)) / T::from_usize_lossy(2 * k);
        }
        let mut series = Self {
            a: self.a,
            b: self.b,
            coeffs: out,
        };
        let at_left = series.eval(self.a);
        series.coeffs[0] = -at_left * T::lit(2.0);
        series
    }
}

/// `F(x) = int_0^x f` tabulated on `[lo, hi]` by piecewise Chebyshev antiderivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiderivativeTable<T> {
    lo: T,
    width: T,
    pieces: Vec<(T, ChebyshevSeries<T>)>,
}

impl<T: Real> AntiderivativeTable<T> {
    /// Builds the table and verifies it against adaptive quadrature at the
    /// midpoints between interpolation nodes; the degree doubles until the
    /// worst deviation is below `max_error`.
    pub fn build<F: Fn(T) -> T + Copy>(
        f: F,
        lo: T,
        hi: T,
        max_width: T,
        max_error: T,
    ) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Domain(format!("empty table range [{lo}, {hi}]")));
        }
        let count = ((hi - lo) / max_width)
            .ceil()
            .to_usize()
            .unwrap_or(1)
            .max(1);
        let width = (hi - lo) / T::from_usize_lossy(count);
        let quad_tol = max_error * T::lit(1e-3);
        let mut pieces = Vec::with_capacity(count);
        for k in 0..count {
            let a = lo + width * T::from_usize_lossy(k);
            let b = if k + 1 == count { hi } else { a + width };
            let base = quadrature::integrate(f, T::zero(), a, quad_tol)?;
            let mut degree = 24;
            loop {
                let series = ChebyshevSeries::fit(f, a, b, degree).antiderivative();
                let mut worst = T::zero();
                for j in 0..=16 {
                    let x = a + (b - a) * (T::from_usize_lossy(j) + T::lit(0.37)) / T::lit(17.0);
                    let exact = quadrature::integrate(f, a, x, quad_tol)?;
                    worst = worst.max((series.eval(x) - exact).abs());
                }
                if worst <= max_error {
                    pieces.push((base, series));
                    break;
                }
                degree *= 2;
                if degree > 512 {
                    return Err(Error::Quadrature {
                        a: a.as_f64(),
                        b: b.as_f64(),
                        estimate: worst.as_f64(),
                    });
                }
            }
        }
        Ok(Self { lo, width, pieces })
    }

    pub fn range(&self) -> (T, T) {
        (
            self.lo,
            self.pieces
                .last()
                .map(|p| p.1.domain().1)
                .unwrap_or(self.lo),
        )
    }

    /// `None` outside the tabulated range.
    pub fn eval(&self, x: T) -> Option<T> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let k = ((x - lo) / self.width)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.pieces.len() - 1);
        let (base, series) = &self.pieces[k];
        Some(*base + series.eval(x))
    }
}
