use thiserror::Error;

/// Which zone of a two-zone system an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Left,
    Right,
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Zone::Left => f.write_str("left zone"),
            Zone::Right => f.write_str("right zone"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("system is not observable: m12 = 0, orbits cannot return to x = 0")]
    NotObservable,

    #[error("degenerate system: a^2 + D^2 = 0, the line y = Tx is a continuum of equilibria")]
    DegenerateSystem,

    #[error("no left half-map exists for a = {a}, T = {t}, D = {d}")]
    NoHalfMap { a: f64, t: f64, d: f64 },

    #[error("V(0, y) vanishes or is negative at y = {y}")]
    SingularPoint { y: f64 },

    #[error("index-like function undefined: a = 0 and exactly one endpoint lies on y = 0")]
    UndefinedAtAxis,

    #[error("y = {y} is outside the half-map domain: {reason}")]
    OutOfDomain { y: f64, reason: &'static str },

    #[error("point (y1 = {y1}, y0 = {y0}) is off the level curve (residual {residual:e})")]
    OffLevelCurve { y1: f64, y0: f64, residual: f64 },

    #[error("path crosses the zero set of V on segment {segment}")]
    SingularPath { segment: usize },

    #[error("{what} did not converge after {evaluations} evaluations")]
    NoConvergence { what: &'static str, evaluations: usize },

    #[error("orbit does not return to x = 0: {reason}")]
    NoReturn { reason: &'static str },

    #[error("return to x = 0 could not be bracketed")]
    EventMissed,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{zone}: {source}")]
    Zone { zone: Zone, source: Box<Error> },
}

impl Error {
    /// Strips zone attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Zone { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for solver, quadrature and integration failures, as opposed to
    /// domain or classification failures.
    pub fn is_convergence(&self) -> bool {
        matches!(self.root(), Error::NoConvergence { .. } | Error::NoReturn { .. } | Error::EventMissed)
    }

    /// Variant name, used as a status tag in tabular output.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::NotObservable => "NotObservable",
            Error::DegenerateSystem => "DegenerateSystem",
            Error::NoHalfMap { .. } => "NoHalfMap",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::UndefinedAtAxis => "UndefinedAtAxis",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::OffLevelCurve { .. } => "OffLevelCurve",
            Error::SingularPath { .. } => "SingularPath",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NoReturn { .. } => "NoReturn",
            Error::EventMissed => "EventMissed",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Zone { .. } => unreachable!("root strips zones"),
        }
    }

    pub(crate) fn in_zone(self, zone: Zone) -> Error {
        Error::Zone { zone, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
