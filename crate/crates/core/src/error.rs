use thiserror::Error;

/// Errors raised by the solvers, generators and oracles of this crate.
///
/// Variants fall in two classes: domain errors (bad inputs, violated
/// preconditions, inadmissible configurations) and numerical errors
/// (a method that failed to converge or resolve). [`Error::is_numerical`]
/// tells them apart; the CLI maps the classes to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent p = {exponent} is not subcritical in dimension {dimension}: need p < {critical}")]
    Supercritical {
        exponent: f64,
        dimension: usize,
        critical: f64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no shooting bracket found for the center value in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("exponential tail not resolved: {0}")]
    TailNotResolved(String),
    #[error("integrand tail not resolved at r = {r_max}: ratio {ratio:e} exceeds 1e-12")]
    TailUnderresolved { r_max: f64, ratio: f64 },
    #[error("density is not integrable on its grid: {0}")]
    NotIntegrable(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("polygon needs k >= 7 vertices, got k = {0} (2 sin(pi/k) >= 1)")]
    TooFewVertices(usize),
    #[error("configuration violates its existence condition: {0}")]
    ConditionViolated(String),
    #[error("unknown polytope '{0}'")]
    UnknownPolytope(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("admissible radius range is empty for eps = {eps}: ({lo}, {hi})")]
    EmptyRange { eps: f64, lo: f64, hi: f64 },
    #[error("argument {value} outside the domain: {reason}")]
    DomainViolation { value: f64, reason: String },
    #[error("no unique interior maximum: {0}")]
    NoInteriorMax(String),
    #[error("maximizer sits on the boundary of the admissible range at r = {r} (eps = {eps})")]
    BoundaryMax { r: f64, eps: f64 },
    #[error("configuration is not a theorem family")]
    UnknownFamily,
    #[error("cache format error: {0}")]
    Cache(String),
}

impl Error {
    /// True for convergence/resolution failures, false for domain errors.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoBracket { .. }
                | Error::TailNotResolved(_)
                | Error::TailUnderresolved { .. }
                | Error::NotIntegrable(_)
                | Error::QuadratureNotConverged(_)
                | Error::NoInteriorMax(_)
                | Error::BoundaryMax { .. }
        )
    }

    /// Short stable tag, used in CSV status columns.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Supercritical { .. } => "Supercritical",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NoBracket { .. } => "NoBracket",
            Error::TailNotResolved(_) => "TailNotResolved",
            Error::TailUnderresolved { .. } => "TailUnderresolved",
            Error::NotIntegrable(_) => "NotIntegrable",
            Error::QuadratureNotConverged(_) => "QuadratureNotConverged",
            Error::TooFewVertices(_) => "TooFewVertices",
            Error::ConditionViolated(_) => "ConditionViolated",
            Error::UnknownPolytope(_) => "UnknownPolytope",
            Error::DegenerateFamily(_) => "DegenerateFamily",
            Error::EmptyRange { .. } => "EmptyRange",
            Error::DomainViolation { .. } => "DomainViolation",
            Error::NoInteriorMax(_) => "NoInteriorMax",
            Error::BoundaryMax { .. } => "BoundaryMax",
            Error::UnknownFamily => "UnknownFamily",
            Error::Cache(_) => "Cache",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
