use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ζ(s) has a pole at s = 1")]
    Pole,

    #[error("precision error: {0}")]
    Precision(String),

    #[error("integer range exceeded: {0}")]
    Range(String),

    #[error("Ramanujan bound violated: |λ| = {0} > 2")]
    RamanujanViolation(f64),

    #[error("coverage error: {reason} (mass lost {lost_mass:.3e})")]
    Coverage { reason: String, lost_mass: f64 },

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("method error: {0}")]
    Method(String),

    #[error("inversion quality: negative mass {negative_mass:.3e} exceeds {threshold:.1e}")]
    InversionQuality { negative_mass: f64, threshold: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("missing data: {0}")]
    DataCoverage(String),

    #[error("degenerate modulus {0}: no primitive characters")]
    DegenerateModulus(u64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input data or unreadable files.
    Config,
    /// A documented precondition of an operation does not hold.
    Precondition,
    /// The requested accuracy or coverage was not achieved.
    Precision,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Precision(_) | Error::Coverage { .. } | Error::InversionQuality { .. } => {
                ErrorKind::Precision
            }
            Error::Parse { .. } | Error::Csv(_) | Error::Json(_) | Error::Io(_) => ErrorKind::Config,
            _ => ErrorKind::Precondition,
        }
    }

    /// Stable machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::EmptyDomain(_) => "empty-domain",
            Error::Domain(_) => "domain",
            Error::Pole => "pole",
            Error::Precision(_) => "precision",
            Error::Range(_) => "range",
            Error::RamanujanViolation(_) => "ramanujan-violation",
            Error::Coverage { .. } => "coverage",
            Error::GeometryMismatch(_) => "geometry-mismatch",
            Error::Method(_) => "method",
            Error::InversionQuality { .. } => "inversion-quality",
            Error::Precondition(_) => "precondition",
            Error::DataCoverage(_) => "data-coverage",
            Error::DegenerateModulus(_) => "degenerate-modulus",
            Error::Parse { .. } => "parse",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
