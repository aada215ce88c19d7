//! Per-step water balance of the finite-volume scheme.

use crate::constitutive::ConstitutiveModel;
use crate::grid::GridFunction;
use crate::io::{csv_row, fmt_real};
use crate::Real;

/// `sum_i psi(u_i) dx`. Shared by the ledger and the energy trace so both
/// report the same bits.
pub fn total_mass<T: Real>(model: &ConstitutiveModel<T>, u: &GridFunction<T>) -> T {
    u.values().iter().map(|&x| model.psi(x)).sum::<T>() * u.grid().dx()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry<T> {
    pub step: usize,
    pub t: T,
    pub mass: T,
    /// Total flux through `x = 0` and `x = 1`, positive in the `+x` direction.
    pub flux_left: T,
    pub flux_right: T,
    /// `dt * int S` over the step.
    pub source: T,
    /// `mass - previous mass - dt (flux_right - flux_left) - source`
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassLedger<T> {
    pub t0: T,
    pub initial_mass: T,
    pub entries: Vec<LedgerEntry<T>>,
}

impl<T: Real> MassLedger<T> {
    pub fn new(t0: T, initial_mass: T) -> Self {
        Self {
            t0,
            initial_mass,
            entries: Vec::new(),
        }
    }

    pub fn last_mass(&self) -> T {
        self.entries.last().map_or(self.initial_mass, |e| e.mass)
    }

    pub fn record(&mut self, t: T, dt: T, mass: T, flux_left: T, flux_right: T, source: T) {
        let residual = mass - self.last_mass() - dt * (flux_right - flux_left) - source;
        self.entries.push(LedgerEntry {
            step: self.entries.len() + 1,
            t,
            mass,
            flux_left,
            flux_right,
            source,
            residual,
        });
    }

    pub fn max_abs_residual(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |m, e| m.max(e.residual.abs()))
    }

    /// Appends a ledger that starts where this one ends, renumbering steps.
    pub fn extend(&mut self, other: MassLedger<T>) {
        let offset = self.entries.len();
        self.entries.extend(other.entries.into_iter().map(|mut e| {
            e.step += offset;
            e
        }));
    }

    /// CSV `step,t,mass,flux_left,flux_right,residual`; step 0 is the initial state.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,t,mass,flux_left,flux_right,residual\n");
        out.push_str(&csv_row([
            "0".to_string(),
            fmt_real(self.t0.as_f64()),
            fmt_real(self.initial_mass.as_f64()),
            fmt_real(0.0),
            fmt_real(0.0),
            fmt_real(0.0),
        ]));
        for e in &self.entries {
            out.push_str(&csv_row([
                e.step.to_string(),
                fmt_real(e.t.as_f64()),
                fmt_real(e.mass.as_f64()),
                fmt_real(e.flux_left.as_f64()),
                fmt_real(e.flux_right.as_f64()),
                fmt_real(e.residual.as_f64()),
            ]));
        }
        out
    }
}
