use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root find for {what} did not converge after {iterations} iterations (target {target:e}, last residual {residual:e})")]
    RootFind {
        what: &'static str,
        target: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("quadrature on [{a}, {b}] did not reach tolerance (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("newton iteration failed ({reason}) after {iterations} iterations, residual history {history:?}")]
    Newton {
        reason: String,
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("time step {step} (t = {t}) failed: {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "picard iteration is not contracting on window [{t_start}, {t_end}] (ratios {ratios:?})"
    )]
    WindowTooLarge {
        t_start: f64,
        t_end: f64,
        ratios: Vec<f64>,
    },

    #[error("picard iteration reached the cap of {iterations} iterations (last difference {last_diff:e})")]
    PicardCap { iterations: usize, last_diff: f64 },

    #[error("window length fell below the minimum {window_min} at t = {t}: {reason}")]
    WindowExhausted {
        t: f64,
        window_min: f64,
        reason: String,
    },
}
