//! Empirical Lipschitz constant of the solution operator on a window.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gamma;
use crate::ap_solver::{ApConfig, TimeWindow, Trajectory};
use crate::constitutive::ConstitutiveModel;
use crate::grid::GridFunction;
use crate::pressure::PressureField;
use crate::{Error, Real, Result};

/// Fourier modes in the random perturbations.
const MODES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionStats {
    pub n_pairs: usize,
    pub window: [f64; 2],
    pub dt: f64,
    /// Bound on `sup_t |u~_x(t)|_H^2` for the sampled trajectories.
    pub m: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub mu_hat: f64,
    pub c5_plus_c6_hat: f64,
}

impl ContractionStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// One random trajectory `u0(x) + sum_k (a_k + b_k s) cos(k pi x)`,
/// `s = (t - t0) / T1`, scaled so that `sup_t |u~_x|_H^2 <= m`.
fn random_trajectory<T: Real, R: Rng>(
    u0: &GridFunction<T>,
    window: &TimeWindow<T>,
    m: T,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    let budget = m.sqrt() - u0.seminorm_x_sq().sqrt();
    if !(budget > T::zero()) {
        return Err(Error::Config(format!(
            "gradient bound m = {m} does not exceed |u0_x|_H^2 = {}",
            u0.seminorm_x_sq()
        )));
    }
    let coeffs: Vec<(T, T)> = (0..MODES)
        .map(|_| {
            (
                T::lit(rng.gen_range(-1.0..1.0)),
                T::lit(rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    let fill = T::lit(rng.gen_range(0.25..1.0));
    let pi = T::PI();
    let length = window.length().max(T::min_positive_value());
    let perturbation: Vec<GridFunction<T>> = window
        .times()
        .into_iter()
        .map(|t| {
            let s = (t - window.t0) / length;
            GridFunction::from_fn(*u0.grid(), |x| {
                coeffs
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (k, &(a, b))| {
                        acc + (a + b * s) * (T::from_usize_lossy(k + 1) * pi * x).cos()
                    })
            })
        })
        .collect();
    let largest = perturbation
        .iter()
        .fold(T::zero(), |acc, g| acc.max(g.seminorm_x_sq().sqrt()));
    let scale = if largest > T::zero() {
        fill * budget / largest
    } else {
        T::zero()
    };
    let frames = perturbation
        .iter()
        .map(|g| u0.zip_map(g, |a, b| a + scale * b))
        .collect::<Result<_>>()?;
    Trajectory::new(window.times(), frames)
}

/// A pair of independent random trajectories in the gradient-bounded set.
pub fn random_pair<T: Real, R: Rng>(
    u0: &GridFunction<T>,
    window: &TimeWindow<T>,
    m: T,
    rng: &mut R,
) -> Result<(Trajectory<T>, Trajectory<T>)> {
    Ok((
        random_trajectory(u0, window, m, rng)?,
        random_trajectory(u0, window, m, rng)?,
    ))
}

/// Samples `n_pairs` pairs, evaluates them in parallel and reports
/// `|gamma u1 - gamma u2| / |u1 - u2|` in discrete `L^2(window; X)`.
/// Pairs are drawn sequentially from `rng`, so results are reproducible.
#[allow(clippy::too_many_arguments)]
pub fn estimate_contraction<T: Real, R: Rng>(
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
    window: &TimeWindow<T>,
    u0: &GridFunction<T>,
    n_pairs: usize,
    m: T,
    ap: &ApConfig<T>,
    rng: &mut R,
) -> Result<ContractionStats> {
    if n_pairs == 0 {
        return Err(Error::Config("n_pairs must be at least 1".into()));
    }
    let pairs = (0..n_pairs)
        .map(|_| random_pair(u0, window, m, rng))
        .collect::<Result<Vec<_>>>()?;
    let ratios = pairs
        .par_iter()
        .map(|(a, b)| {
            let ga = gamma(a, u0, window, model, pressure, ap)?;
            let gb = gamma(b, u0, window, model, pressure, ap)?;
            let denominator = a.l2x_distance(b)?;
            let numerator = ga.l2x_distance(&gb)?;
            Ok(if denominator > T::zero() {
                (numerator / denominator).as_f64()
            } else {
                0.0
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let max = sorted[sorted.len() - 1];
    let t1 = window.length().as_f64();
    Ok(ContractionStats {
        n_pairs,
        window: [window.t0.as_f64(), window.t_end().as_f64()],
        dt: window.dt.as_f64(),
        m: m.as_f64(),
        ratios,
        max_ratio: max,
        median_ratio: median,
        mu_hat: max,
        c5_plus_c6_hat: max * max / t1,
    })
}
