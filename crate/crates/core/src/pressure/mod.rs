//! The given pressure field `p(t, x)` and its derivatives.
//!
//! `p_x` supplies the boundary data `h = p_x(t, 0|1)` and, multiplied by the
//! frozen conductivity, the interior coupling flux.

mod regularity;
mod spline;
mod tabulated;

pub use regularity::{regularity_report, RegularityLevel, RegularityReport};
pub use spline::CellSpline;
pub use tabulated::{parse_pressure_csv, TabulatedPressure};

use crate::grid::GridFunction;
use crate::{Error, Real, Result};

pub const ANALYTIC_PRESETS: [&str; 3] = ["zero", "linear_in_x", "separable_sin"];

/// Closed-form pressure fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticPressure<T> {
    Zero,
    /// `p = slope * x`
    LinearInX {
        slope: T,
    },
    /// `p = amplitude * sin(omega t) * cos(pi x)`
    SeparableSin {
        amplitude: T,
        omega: T,
    },
}

impl<T: Real> AnalyticPressure<T> {
    /// `[p, p_x, p_xx]`
    fn eval(&self, t: T, x: T) -> [T; 3] {
        match *self {
            AnalyticPressure::Zero => [T::zero(); 3],
            AnalyticPressure::LinearInX { slope } => [slope * x, slope, T::zero()],
            AnalyticPressure::SeparableSin { amplitude, omega } => {
                let pi = T::PI();
                let a = amplitude * (omega * t).sin();
                let (s, c) = (pi * x).sin_cos();
                [a * c, -a * pi * s, -a * pi * pi * c]
            }
        }
    }
}

/// Parameters for [`PressureField::analytic`]; unused ones are ignored by
/// presets that do not read them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams<T> {
    pub amplitude: T,
    pub omega: T,
    pub slope: T,
}

impl<T: Real> Default for AnalyticParams<T> {
    fn default() -> Self {
        Self {
            amplitude: T::one(),
            omega: T::lit(2.0) * T::PI(),
            slope: T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PressureSource<T> {
    Analytic(AnalyticPressure<T>),
    Tabulated(TabulatedPressure<T>),
}

const SUP_LATTICE: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct PressureField<T> {
    source: PressureSource<T>,
    horizon: T,
    sup_px: T,
}

impl<T: Real> PressureField<T> {
    /// Builds one of [`ANALYTIC_PRESETS`] on `[0, horizon]`.
    pub fn analytic(name: &str, params: AnalyticParams<T>, horizon: T) -> Result<Self> {
        let kind = match name {
            "zero" => AnalyticPressure::Zero,
            "linear_in_x" => AnalyticPressure::LinearInX {
                slope: params.slope,
            },
            "separable_sin" => AnalyticPressure::SeparableSin {
                amplitude: params.amplitude,
                omega: params.omega,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown pressure preset '{other}' (known: {})",
                    ANALYTIC_PRESETS.join(", ")
                )))
            }
        };
        Self::from_source(PressureSource::Analytic(kind), horizon)
    }

    pub fn zero(horizon: T) -> Self {
        Self::from_source(PressureSource::Analytic(AnalyticPressure::Zero), horizon)
            .expect("zero field")
    }

    /// Interpolates time-ordered cell samples; see [`TabulatedPressure`].
    pub fn tabulated(samples: Vec<(T, GridFunction<T>)>, horizon: T) -> Result<Self> {
        Self::from_source(
            PressureSource::Tabulated(TabulatedPressure::new(samples)?),
            horizon,
        )
    }

    pub fn from_source(source: PressureSource<T>, horizon: T) -> Result<Self> {
        if !(horizon > T::zero() && horizon.is_finite()) {
            return Err(Error::Config(format!(
                "pressure horizon must be positive, got {horizon}"
            )));
        }
        let mut field = Self {
            source,
            horizon,
            sup_px: T::zero(),
        };
        field.sup_px = field.lattice_sup_px(SUP_LATTICE);
        if !field.sup_px.is_finite() {
            return Err(Error::Ingest("pressure gradient is not finite".into()));
        }
        Ok(field)
    }

    pub fn source(&self) -> &PressureSource<T> {
        &self.source
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn describe(&self) -> String {
        match &self.source {
            PressureSource::Analytic(AnalyticPressure::Zero) => "analytic:zero".into(),
            PressureSource::Analytic(AnalyticPressure::LinearInX { slope }) => {
                format!("analytic:linear_in_x(slope={slope})")
            }
            PressureSource::Analytic(AnalyticPressure::SeparableSin { amplitude, omega }) => {
                format!("analytic:separable_sin(amplitude={amplitude},omega={omega})")
            }
            PressureSource::Tabulated(t) => format!("tabulated:{}x{}", t.n_times(), t.n_cells()),
        }
    }

    /// True when `p_x` vanishes identically, so the pressure coupling drops out.
    pub fn is_zero(&self) -> bool {
        matches!(
            self.source,
            PressureSource::Analytic(AnalyticPressure::Zero)
        )
    }

    /// `[p, p_x, p_xx]` at `(t, x)`.
    pub fn eval(&self, t: T, x: T) -> [T; 3] {
        match &self.source {
            PressureSource::Analytic(a) => a.eval(t, x),
            PressureSource::Tabulated(tab) => tab.eval(t, x),
        }
    }

    pub fn p(&self, t: T, x: T) -> T {
        self.eval(t, x)[0]
    }

    pub fn p_x(&self, t: T, x: T) -> T {
        self.eval(t, x)[1]
    }

    pub fn p_xx(&self, t: T, x: T) -> T {
        self.eval(t, x)[2]
    }

    /// Boundary data `(h(t, 0), h(t, 1))`.
    pub fn boundary_gradient(&self, t: T) -> (T, T) {
        (self.p_x(t, T::zero()), self.p_x(t, T::one()))
    }

    /// `|p_x|_{L_inf(Q(T))}`, cached at construction.
    pub fn sup_px(&self) -> T {
        self.sup_px
    }

    /// Max of `|p_x|` over an `(n+1) x (n+1)` lattice of `[0, T] x [0, 1]`.
    pub fn lattice_sup_px(&self, n: usize) -> T {
        let nn = T::from_usize_lossy(n);
        let mut best = T::zero();
        for i in 0..=n {
            let t = self.horizon * T::from_usize_lossy(i) / nn;
            for j in 0..=n {
                let x = T::from_usize_lossy(j) / nn;
                best = best.max(self.p_x(t, x).abs());
            }
        }
        best
    }
}
