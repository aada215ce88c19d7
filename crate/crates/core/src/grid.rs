//! Uniform cell-centered mesh on `(0, 1)`, fields on it, discrete `L2`/`H1`
//! norms and the one-dimensional embedding inequalities
//!
//! ```text
//!   |f(x)|^2        <= |f|_H^2 + 2 |f|_H |f_x|_H
//!   |f|_{L4}^4      <= (|f|_H^2 + 2 |f|_H |f_x|_H)^2
//! ```

use crate::io::{csv_row, fmt_real};
use crate::{Error, Real, Result};
use serde::Serialize;

pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    n_cells: usize,
    dx: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self {
            n_cells,
            dx: T::one() / T::from_usize_lossy(n_cells),
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    /// Cell center `(i + 1/2) dx`.
    #[inline]
    pub fn x(&self, i: usize) -> T {
        (T::from_usize_lossy(i) + T::lit(0.5)) * self.dx
    }

    /// Face `i` sits at `i dx`, `i = 0..=n_cells`.
    #[inline]
    pub fn face(&self, i: usize) -> T {
        T::from_usize_lossy(i) * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_cells).map(|i| self.x(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: Grid1D<T>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value {} in cell {i}",
                values[i]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: FnMut(T) -> T>(grid: Grid1D<T>, mut f: F) -> Self {
        let values = grid.centers().map(&mut f).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Grid1D<T>, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.n_cells],
        }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<F: FnMut(T) -> T>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn try_map<F: FnMut(T) -> Result<T>>(&self, f: F) -> Result<Self> {
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().copied().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{} cells vs {} cells",
                self.grid.n_cells, other.grid.n_cells
            )));
        }
        Ok(())
    }

    pub fn zip_map<F: FnMut(T, T) -> T>(&self, other: &Self, mut f: F) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// Cell gradient: centered in the interior, one-sided in the two end cells.
    pub fn gradient(&self) -> Self {
        let n = self.len();
        let dx = self.grid.dx;
        let f = &self.values;
        let values = (0..n)
            .map(|i| match i {
                0 => (f[1] - f[0]) / dx,
                i if i == n - 1 => (f[n - 1] - f[n - 2]) / dx,
                i => (f[i + 1] - f[i - 1]) / (dx + dx),
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Midpoint-rule integral over `(0, 1)`.
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.grid.dx
    }

    pub fn norm_h_sq(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>() * self.grid.dx
    }

    pub fn norm_h(&self) -> T {
        self.norm_h_sq().sqrt()
    }

    /// `|D f|_H^2`.
    pub fn seminorm_x_sq(&self) -> T {
        self.gradient().norm_h_sq()
    }

    pub fn norm_x_sq(&self) -> T {
        self.norm_h_sq() + self.seminorm_x_sq()
    }

    pub fn norm_x(&self) -> T {
        self.norm_x_sq().sqrt()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `(f(0), f(1))` by linear extrapolation from the two nearest cells.
    pub fn boundary_trace(&self) -> (T, T) {
        let f = &self.values;
        let n = f.len();
        let half = T::lit(0.5);
        (
            f[0] + (f[0] - f[1]) * half,
            f[n - 1] + (f[n - 1] - f[n - 2]) * half,
        )
    }

    /// CSV with header `x,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.centers().zip(&self.values) {
            out.push_str(&csv_row([fmt_real(x.as_f64()), fmt_real(v.as_f64())]));
        }
        out
    }
}

/// Worst slack of the discrete embedding inequalities for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevMargin {
    pub sup_sq: f64,
    pub sup_bound: f64,
    pub l4_pow4: f64,
    pub l4_bound: f64,
    /// `sup_bound + slack - sup_sq`
    pub sup_margin: f64,
    /// `l4_bound + slack - l4_pow4`
    pub l4_margin: f64,
    pub passed: bool,
}

/// Checks both embedding inequalities with an `O(dx)` quadrature slack
/// `10 dx |f|_X^2` (squared for the `L4` form).
pub fn check_sobolev_inequality<T: Real>(f: &GridFunction<T>) -> Result<SobolevMargin> {
    if f.len() < 8 {
        return Err(Error::Config(
            "embedding check needs at least 8 cells".into(),
        ));
    }
    let h = f.norm_h();
    let hx = f.gradient().norm_h();
    let bound = h * h + T::lit(2.0) * h * hx;
    let (t0, t1) = f.boundary_trace();
    let sup = f.sup_norm().max(t0.abs()).max(t1.abs());
    let sup_sq = sup * sup;
    let l4 = f.values.iter().map(|&v| v * v * v * v).sum::<T>() * f.grid.dx;
    let slack = T::lit(10.0) * f.grid.dx * f.norm_x_sq();
    let sup_margin = bound + slack - sup_sq;
    let l4_margin = bound * bound + slack * slack - l4;
    Ok(SobolevMargin {
        sup_sq: sup_sq.as_f64(),
        sup_bound: bound.as_f64(),
        l4_pow4: l4.as_f64(),
        l4_bound: (bound * bound).as_f64(),
        sup_margin: sup_margin.as_f64(),
        l4_margin: l4_margin.as_f64(),
        passed: sup_margin >= T::zero() && l4_margin >= T::zero(),
    })
}
