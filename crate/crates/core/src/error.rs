//! Error types for every layer of the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: set has dimension {expected}, point has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid convex set: {0}")]
    InvalidSet(String),

    /// Dykstra's iteration did not settle; for a polyhedron this almost always
    /// means the face system is infeasible.
    #[error("polyhedron projection did not converge after {sweeps} sweeps (likely infeasible)")]
    NotConverged { sweeps: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegularityError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("subset enumeration needs {subsets} subsets, limit is {limit}")]
    BudgetExceeded { subsets: u128, limit: u128 },

    #[error("x_star is not contained in constraint set {index}")]
    NotContained { index: usize },

    #[error("intersection of all normal sets is not the singleton {{x_star}}; it also contains {point:?}")]
    NonSingleton { point: Vec<f64> },

    #[error("family is not redundant at the requested level: subset {subset:?} admits {point:?}")]
    NotRedundant { subset: Vec<usize>, point: Vec<f64> },

    #[error("sampler produced no points distinct from x_star")]
    NoValidSamples,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("contraction factor {rho} is outside (0, 1); step size violates the bound")]
    RhoInfeasible { rho: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("received {received} values but must discard {f}; nothing would be retained")]
    TooFewMessages { received: usize, f: usize },

    #[error("sender {0} appears more than once")]
    DuplicateSender(usize),

    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("adversary requires x_star but none is configured")]
    MissingTarget,

    #[error("simulation budget exceeded: {work} work units, limit {limit}")]
    BudgetExceeded { work: u128, limit: u128 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("schema violation in `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("infeasible parameters: need k > 4f/mu^2 + 2f - 1, got k = {k} but the right side is {threshold}")]
    InfeasibleParameters { k: usize, threshold: f64 },

    #[error("template precondition violated: {0}")]
    Template(String),

    #[error("trace has {0} rounds with positive V; at least 2 are needed to fit a rate")]
    TooFewPoints(usize),

    #[error(transparent)]
    Regularity(#[from] RegularityError),

    #[error(transparent)]
    Simulation(#[from] SimulationError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("cannot serialize scenario: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
