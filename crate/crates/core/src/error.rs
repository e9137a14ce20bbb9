use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("{what} = {value} is outside its valid domain")]
    OutOfDomain { what: &'static str, value: f64 },

    /// The slant never reaches its buckling compression within the travel
    /// between the two rest states, so the shell cannot snap through.
    #[error(
        "no buckling: critical compression {critical_compression:.6} mm >= available travel {max_compression:.6} mm"
    )]
    NoBuckling {
        critical_compression: f64,
        max_compression: f64,
    },

    #[error("invalid grid size {0}: need an odd count of at least 101")]
    InvalidGrid(usize),

    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    #[error("shore hardness {0} outside supported range [20, 95]")]
    HardnessOutOfRange(f64),

    #[error("invalid hardness table: {0}")]
    InvalidTable(String),

    #[error("hardness table line {line}: {message}")]
    TableParse { line: usize, message: String },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("target unreachable: {target} kPa outside achievable range [{low}, {high}] kPa")]
    TargetUnreachable { target: f64, low: f64, high: f64 },

    #[error("critical pressure is not monotone over the bounds: {0}")]
    NonMonotone(String),

    #[error("valve never switched after {trials} trials")]
    NeverSwitched { trials: usize },

    #[error("event not found: {0}")]
    EventNotFound(&'static str),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
