use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Green function pole at nu = {nu} (bound level n = {n}, l = {l}); use the reduced kernel")]
    Pole { nu: f64, n: u32, l: u32 },

    #[error("degenerate channel l = {l} at n = {n} is not subtracted from the reduced kernel")]
    UnresolvedDegeneracy { n: u32, l: u32 },

    #[error("no convergence in {what}: last estimate {estimate}, change {change}")]
    Convergence { what: String, estimate: f64, change: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable machine-readable tag used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole { .. } => "pole",
            Error::UnresolvedDegeneracy { .. } => "unresolved_degeneracy",
            Error::Convergence { .. } => "convergence",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
