//! Pressure samples on a cell grid at a finite set of times: cubic splines
//! in `x`, linear interpolation in `t`, constant extension outside the sampled
//! time span.

use super::spline::CellSpline;
use crate::grid::{Grid1D, GridFunction};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPressure<T> {
    grid: Grid1D<T>,
    times: Vec<T>,
    splines: Vec<CellSpline<T>>,
}

impl<T: Real> TabulatedPressure<T> {
    pub fn new(samples: Vec<(T, GridFunction<T>)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Ingest(format!(
                "tabulated pressure needs at least 2 time samples, got {}",
                samples.len()
            )));
        }
        let grid = *samples[0].1.grid();
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Ingest(format!(
                    "sample times must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for (t, f) in &samples {
            if !t.is_finite() {
                return Err(Error::Ingest(format!("non-finite sample time {t}")));
            }
            if *f.grid() != grid {
                return Err(Error::Ingest(format!(
                    "sample at t = {t} has {} cells, expected {}",
                    f.len(),
                    grid.n_cells()
                )));
            }
        }
        let splines = samples
            .iter()
            .map(|(_, f)| CellSpline::new(f))
            .collect::<Result<_>>()?;
        Ok(Self {
            grid,
            times: samples.into_iter().map(|(t, _)| t).collect(),
            splines,
        })
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    /// `[p, p_x, p_xx]`
    pub fn eval(&self, t: T, x: T) -> [T; 3] {
        let last = self.times.len() - 1;
        if t <= self.times[0] {
            return self.splines[0].eval(x);
        }
        if t >= self.times[last] {
            return self.splines[last].eval(x);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let theta = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let a = self.splines[k].eval(x);
        let b = self.splines[k + 1].eval(x);
        [
            a[0] + theta * (b[0] - a[0]),
            a[1] + theta * (b[1] - a[1]),
            a[2] + theta * (b[2] - a[2]),
        ]
    }
}

/// Parses `t,x,p` rows (header required) into time-ordered cell samples.
///
/// Rows must be grouped by time with strictly increasing times; within a
/// time the `x` values must be the cell centers of one uniform grid, in any
/// order. Every number must parse and be finite.
pub fn parse_pressure_csv<T: Real>(text: &str) -> Result<Vec<(T, GridFunction<T>)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Ingest("empty pressure file".into()))?;
    let cols: Vec<_> = header.split(',').map(str::trim).collect();
    if cols != ["t", "x", "p"] {
        return Err(Error::Ingest(format!(
            "expected header 't,x,p', got '{header}'"
        )));
    }
    let mut blocks: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<_> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Ingest(format!(
                "line {}: expected 3 fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let mut nums = [0.0f64; 3];
        for (slot, s) in nums.iter_mut().zip(&fields) {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Ingest(format!("line {}: cannot parse '{s}'", lineno + 1)))?;
            if !v.is_finite() {
                return Err(Error::Ingest(format!(
                    "line {}: non-finite value '{s}'",
                    lineno + 1
                )));
            }
            *slot = v;
        }
        let [t, x, p] = nums;
        match blocks.last_mut() {
            Some((bt, rows)) if *bt == t => rows.push((x, p)),
            Some((bt, _)) if t < *bt => {
                return Err(Error::Ingest(format!(
                    "line {}: time {t} is out of order (previous block at {bt})",
                    lineno + 1
                )))
            }
            _ => blocks.push((t, vec![(x, p)])),
        }
    }
    blocks
        .into_iter()
        .map(|(t, mut rows)| {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            let n = rows.len();
            let grid = Grid1D::<T>::new(n).map_err(|e| Error::Ingest(format!("time {t}: {e}")))?;
            for (i, (x, _)) in rows.iter().enumerate() {
                let expect = (i as f64 + 0.5) / n as f64;
                if (x - expect).abs() > 1e-9 {
                    return Err(Error::Ingest(format!(
                        "time {t}: x = {x} is not cell center {i} of a {n}-cell grid"
                    )));
                }
            }
            let values = rows.into_iter().map(|(_, p)| T::lit(p)).collect();
            Ok((T::lit(t), GridFunction::new(grid, values)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pressure::{AnalyticParams, PressureField};

    #[test]
    fn identical_samples_are_time_constant() {
        let g = Grid1D::<f64>::new(16).unwrap();
        let f = GridFunction::from_fn(g, |x| x * x);
        let tab = TabulatedPressure::new(vec![(0.0, f.clone()), (1.0, f)]).unwrap();
        for t in [-1.0, 0.0, 0.3, 1.0, 4.0] {
            assert_eq!(tab.eval(t, 0.37), tab.eval(0.0, 0.37));
        }
    }

    #[test]
    fn rejects_bad_sample_sets() {
        let g = Grid1D::<f64>::new(8).unwrap();
        let f = GridFunction::constant(g, 1.0);
        assert!(TabulatedPressure::new(vec![(0.0, f.clone())]).is_err());
        assert!(TabulatedPressure::new(vec![(1.0, f.clone()), (0.5, f.clone())]).is_err());
        let other = GridFunction::constant(Grid1D::new(9).unwrap(), 1.0);
        assert!(TabulatedPressure::new(vec![(0.0, f), (1.0, other)]).is_err());
    }

    #[test]
    fn separable_samples_reproduce_gradient() {
        let exact = PressureField::<f64>::analytic("separable_sin", AnalyticParams::default(), 1.0)
            .unwrap();
        let g = Grid1D::<f64>::new(256).unwrap();
        let samples: Vec<_> = (0..=64)
            .map(|k| {
                let t = k as f64 / 64.0;
                (t, GridFunction::from_fn(g, |x| exact.p(t, x)))
            })
            .collect();
        let tab = PressureField::tabulated(samples, 1.0).unwrap();
        let sup_error = |times: &mut dyn Iterator<Item = f64>| {
            let mut worst: f64 = 0.0;
            for t in times {
                for j in 0..=200 {
                    let x = j as f64 / 200.0;
                    worst = worst.max((tab.p_x(t, x) - exact.p_x(t, x)).abs());
                }
            }
            worst
        };
        // spatial interpolant at the slices, boundary included
        let at_slices = sup_error(&mut (0..=64).map(|k| k as f64 / 64.0));
        assert!(at_slices < 1e-3, "sup error {at_slices}");
        // between slices the linear-in-time error dt^2/8 |p_xtt| dominates
        let pi = std::f64::consts::PI;
        let time_bound = (1.0f64 / 64.0).powi(2) / 8.0 * pi * (2.0 * pi).powi(2);
        let between = sup_error(&mut (0..640).map(|k| (k as f64 + 0.5) / 640.0));
        assert!(
            between <= time_bound + at_slices,
            "{between} vs {time_bound}"
        );
    }

    #[test]
    fn csv_round_trip_and_strictness() {
        let text = "t,x,p\n0,0.625,4\n0,0.125,1\n0,0.375,2\n0,0.875,3\n0.5,0.125,1\n0.5,0.375,1\n0.5,0.625,1\n0.5,0.875,1\n";
        let s = parse_pressure_csv::<f64>(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].1.values(), &[1.0, 2.0, 4.0, 3.0]);
        assert!(parse_pressure_csv::<f64>("t,x,q\n").is_err());
        assert!(parse_pressure_csv::<f64>(&text.replace(",4\n", ",NaN\n")).is_err());
        assert!(parse_pressure_csv::<f64>(&text.replace(",4\n", ",inf\n")).is_err());
        assert!(parse_pressure_csv::<f64>(&text.replace("0,0.625,4", "0,0.6,4")).is_err());
        let reordered = "t,x,p\n0.5,0.125,1\n0.5,0.375,1\n0.5,0.625,1\n0.5,0.875,1\n0,0.125,1\n0,0.375,2\n0,0.625,4\n0,0.875,3\n";
        assert!(parse_pressure_csv::<f64>(reordered).is_err());
    }
}
