use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("frame drift {drift:.3e} exceeds {limit:.1e}; refine the step")]
    Resolution { drift: f64, limit: f64 },
    #[error("extrapolation spread {spread:.3e} exceeds {limit:.1e}; extend the profile range")]
    Extrapolation { spread: f64, limit: f64 },
    #[error("blow-up guard: sup|v| = {sup:.3e} at t = {t:.4e} exceeds {limit:.3e}")]
    BlowUp { t: f64, sup: f64, limit: f64 },
    #[error("modulus floor violated at t = {t:.4e}, x = {x:.4}: |u| = {modulus:.3e} < {floor:.3e}")]
    ModulusFloor { t: f64, x: f64, modulus: f64, floor: f64 },
    #[error("non-contraction at iteration {iteration}: ratio {ratio:.3}")]
    NonContraction { iteration: usize, ratio: f64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("checkpoint format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
