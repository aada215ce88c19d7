//! TOML run configuration. Every numeric field is range-checked while the
//! file is loaded, so a command either starts with a usable setup or fails
//! before writing anything.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use moisture_core::ap_solver::ApConfig;
use moisture_core::constitutive::{preset, Bounds, ConstitutiveModel, LambdaCurve, PsiCurve};
use moisture_core::fixed_point::PicardConfig;
use moisture_core::grid::{Grid1D, GridFunction};
use moisture_core::pressure::{parse_pressure_csv, AnalyticParams, PressureField};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub material: MaterialSection,
    pub pressure: PressureSection,
    #[serde(default)]
    pub initial: InitialSection,
    pub grid: GridSection,
    pub time: TimeSection,
    #[serde(default)]
    pub picard: PicardSection,
    #[serde(default)]
    pub ap: ApSection,
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub contraction: ContractionSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

/// Either a named preset (optionally with overridden constants) or fully
/// custom curves.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub preset: Option<String>,
    pub psi: Option<PsiCurve<f64>>,
    pub lambda: Option<LambdaCurve<f64>>,
    pub bounds: Option<Bounds<f64>>,
    pub working_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureSection {
    pub preset: Option<String>,
    /// Tabulated `t,x,p` samples; relative paths resolve against the config file.
    pub csv: Option<PathBuf>,
    pub amplitude: Option<f64>,
    pub omega: Option<f64>,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    Constant {
        value: f64,
    },
    /// `offset + amplitude cos(pi x)`
    Cosine {
        offset: f64,
        amplitude: f64,
    },
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection::Cosine {
            offset: 0.0,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_cells: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub horizon: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardSection {
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub contraction_threshold: f64,
    pub window_min: Option<f64>,
    pub initial_window: Option<f64>,
}

impl Default for PicardSection {
    fn default() -> Self {
        let d = PicardConfig::<f64>::default();
        Self {
            picard_tol: d.picard_tol,
            picard_max_iter: d.picard_max_iter,
            contraction_threshold: d.contraction_threshold,
            window_min: None,
            initial_window: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApSection {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub line_search: bool,
}

impl Default for ApSection {
    fn default() -> Self {
        let d = ApConfig::<f64>::default();
        Self {
            newton_tol: d.newton_tol,
            newton_max_iter: d.newton_max_iter,
            line_search: d.line_search,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Only `"cosine_decay"`: `u* = exp(-t) cos(pi x)`.
    pub case: String,
    #[serde(default = "defaults::spatial_cells")]
    pub spatial_cells: Vec<usize>,
    #[serde(default = "defaults::spatial_dt")]
    pub spatial_dt: f64,
    #[serde(default = "defaults::spatial_horizon")]
    pub spatial_horizon: f64,
    #[serde(default = "defaults::temporal_dts")]
    pub temporal_dts: Vec<f64>,
    #[serde(default = "defaults::temporal_cells")]
    pub temporal_cells: usize,
    #[serde(default = "defaults::temporal_horizon")]
    pub temporal_horizon: f64,
    #[serde(default = "defaults::min_spatial_order")]
    pub min_spatial_order: f64,
    #[serde(default = "defaults::min_temporal_order")]
    pub min_temporal_order: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContractionSection {
    pub n_pairs: usize,
    /// Base window `T1` starting at `t = 0`.
    pub window: f64,
    /// Number of successive window halvings to probe.
    pub halvings: usize,
    /// Gradient bound `M`; defaults to `2 |u0_x|_H^2 + 1`.
    pub m: Option<f64>,
}

impl Default for ContractionSection {
    fn default() -> Self {
        Self {
            n_pairs: 20,
            window: 0.05,
            halvings: 3,
            m: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    pub n_random: usize,
    pub n_cells: usize,
    pub n_samples: usize,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            n_random: 1000,
            n_cells: 512,
            n_samples: 4001,
        }
    }
}

mod defaults {
    pub fn spatial_cells() -> Vec<usize> {
        vec![32, 64, 128, 256]
    }
    pub fn spatial_dt() -> f64 {
        1e-5
    }
    pub fn spatial_horizon() -> f64 {
        0.01
    }
    pub fn temporal_dts() -> Vec<f64> {
        vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0]
    }
    pub fn temporal_cells() -> usize {
        1024
    }
    pub fn temporal_horizon() -> f64 {
        1.0
    }
    pub fn min_spatial_order() -> f64 {
        1.9
    }
    pub fn min_temporal_order() -> f64 {
        0.9
    }
}

pub const DEFAULT_SEED: u64 = 0;

/// A loaded configuration with every derived object built and checked.
#[derive(Debug, Clone)]
pub struct Setup {
    pub raw: RunConfig,
    /// Hex SHA-256 of the configuration file bytes.
    pub hash: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub model: ConstitutiveModel<f64>,
    pub material_name: String,
    pub pressure: PressureField<f64>,
    pub grid: Grid1D<f64>,
    pub u0: GridFunction<f64>,
    pub ap: ApConfig<f64>,
    pub picard: PicardConfig<f64>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(format!("{name} must be positive and finite (got {x})")))
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Setup {
    /// Reads, parses and validates `path`; `out` and `seed` override the file.
    pub fn load(path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Self, CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| bad(format!("{} is not UTF-8: {e}", path.display())))?;
        let raw: RunConfig =
            toml::from_str(text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_raw(raw, hash_bytes(&bytes), base, out, seed)
    }

    pub fn from_raw(
        raw: RunConfig,
        hash: String,
        base: &Path,
        out: Option<&Path>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let horizon = positive("time.horizon", raw.time.horizon)?;
        let dt = positive("time.dt", raw.time.dt)?;
        if dt > horizon {
            return Err(bad(format!("time.dt = {dt} exceeds the horizon {horizon}")));
        }
        let grid = Grid1D::new(raw.grid.n_cells).map_err(|e| bad(format!("grid: {e}")))?;
        let (model, material_name) = build_material(&raw.material)?;
        let pressure = build_pressure(&raw.pressure, horizon, base)?;
        let u0 = match raw.initial {
            InitialSection::Constant { value } => GridFunction::constant(grid, value),
            InitialSection::Cosine { offset, amplitude } => GridFunction::from_fn(grid, |x| {
                offset + amplitude * (std::f64::consts::PI * x).cos()
            }),
        };
        if !u0.is_finite() {
            return Err(bad("initial condition is not finite"));
        }

        let ap = ApConfig {
            newton_tol: positive("ap.newton_tol", raw.ap.newton_tol)?,
            newton_max_iter: raw.ap.newton_max_iter,
            line_search: raw.ap.line_search,
            source: None,
        };
        ap.validate().map_err(|e| bad(e.to_string()))?;
        let initial_window = positive(
            "picard.initial_window",
            raw.picard.initial_window.unwrap_or(horizon),
        )?;
        let picard = PicardConfig {
            picard_tol: positive("picard.picard_tol", raw.picard.picard_tol)?,
            picard_max_iter: raw.picard.picard_max_iter,
            contraction_threshold: raw.picard.contraction_threshold,
            window_min: positive(
                "picard.window_min",
                raw.picard.window_min.unwrap_or(initial_window * 1e-4),
            )?,
            initial_window,
        };
        picard.validate().map_err(|e| bad(e.to_string()))?;

        if let Some(v) = &raw.verify {
            check_verify(v)?;
        }
        let c = &raw.contraction;
        if c.n_pairs == 0 {
            return Err(bad("contraction.n_pairs must be at least 1"));
        }
        positive("contraction.window", c.window)?;
        if let Some(m) = c.m {
            positive("contraction.m", m)?;
        }
        let v = &raw.validate;
        if v.n_random == 0 || v.n_samples < 2 || v.n_cells < 8 {
            return Err(bad(
                "validate needs n_random >= 1, n_samples >= 2 and n_cells >= 8",
            ));
        }

        let output_dir = out
            .map(Path::to_path_buf)
            .or_else(|| raw.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(Self {
            seed: seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
            raw,
            hash,
            output_dir,
            model,
            material_name,
            pressure,
            grid,
            u0,
            ap,
            picard,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.raw.time.horizon
    }

    pub fn dt(&self) -> f64 {
        self.raw.time.dt
    }

    /// First line of every artifact.
    pub fn header_comment(&self) -> String {
        format!("# config_sha256={} seed={}\n", self.hash, self.seed)
    }
}

fn check_verify(v: &VerifySection) -> Result<(), CliError> {
    if v.case != "cosine_decay" {
        return Err(bad(format!(
            "unknown manufactured case '{}' (known: cosine_decay)",
            v.case
        )));
    }
    if v.spatial_cells.len() < 2 || v.temporal_dts.len() < 2 {
        return Err(bad(
            "verify needs at least two refinement levels in space and in time",
        ));
    }
    if v.spatial_cells.windows(2).any(|w| w[1] <= w[0])
        || v.spatial_cells[0] < 4
        || v.temporal_cells < 4
    {
        return Err(bad(
            "verify.spatial_cells must increase from at least 4 cells",
        ));
    }
    if v.temporal_dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(bad("verify.temporal_dts must decrease"));
    }
    for (name, x) in [
        ("verify.spatial_dt", v.spatial_dt),
        ("verify.spatial_horizon", v.spatial_horizon),
        ("verify.temporal_horizon", v.temporal_horizon),
    ] {
        positive(name, x)?;
    }
    for &dt in &v.temporal_dts {
        positive("verify.temporal_dts", dt)?;
    }
    Ok(())
}

fn build_material(m: &MaterialSection) -> Result<(ConstitutiveModel<f64>, String), CliError> {
    let wrap = |e: moisture_core::Error| bad(format!("material: {e}"));
    let (mut model, name) = match (&m.preset, m.psi, m.lambda) {
        (Some(name), None, None) => {
            let p = preset::<f64>(name).map_err(wrap)?;
            (p.model, p.name)
        }
        (None, Some(psi), Some(lambda)) => {
            let bounds = m
                .bounds
                .ok_or_else(|| bad("custom material needs [material.bounds]"))?;
            let [lo, hi] = m
                .working_range
                .ok_or_else(|| bad("custom material needs material.working_range"))?;
            (
                ConstitutiveModel::new(psi, lambda, bounds, (lo, hi)).map_err(wrap)?,
                "custom".to_string(),
            )
        }
        _ => {
            return Err(bad(
                "material needs either `preset` or both `psi` and `lambda` tables",
            ))
        }
    };
    if m.preset.is_some() {
        if let Some(b) = m.bounds {
            model = model.with_bounds(b).map_err(wrap)?;
        }
        if let Some([lo, hi]) = m.working_range {
            model = model.with_working_range((lo, hi)).map_err(wrap)?;
        }
    }
    Ok((model, name))
}

fn build_pressure(
    p: &PressureSection,
    horizon: f64,
    base: &Path,
) -> Result<PressureField<f64>, CliError> {
    let wrap = |e: moisture_core::Error| bad(format!("pressure: {e}"));
    match (&p.preset, &p.csv) {
        (Some(name), None) => {
            let d = AnalyticParams::<f64>::default();
            let params = AnalyticParams {
                amplitude: p.amplitude.unwrap_or(d.amplitude),
                omega: p.omega.unwrap_or(d.omega),
                slope: p.slope.unwrap_or(d.slope),
            };
            if [params.amplitude, params.omega, params.slope]
                .iter()
                .any(|x| !x.is_finite())
            {
                return Err(bad("pressure parameters must be finite"));
            }
            PressureField::analytic(name, params, horizon).map_err(wrap)
        }
        (None, Some(csv)) => {
            if p.amplitude.is_some() || p.omega.is_some() || p.slope.is_some() {
                return Err(bad("pressure parameters only apply to analytic presets"));
            }
            let path = base.join(csv);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
            let samples = parse_pressure_csv::<f64>(&text).map_err(wrap)?;
            PressureField::tabulated(samples, horizon).map_err(wrap)
        }
        _ => Err(bad("pressure needs exactly one of `preset` or `csv`")),
    }
}
