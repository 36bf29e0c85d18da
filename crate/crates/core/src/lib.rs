//! Resilient constrained consensus under Byzantine agents.
//!
//! Normal agents each hold a private convex constraint set and run a
//! distance-filtered projected consensus step; up to `f` Byzantine agents may
//! send arbitrary values. Under a redundancy condition on the constraint sets
//! every normal agent converges geometrically to the common point of their
//! intersection.

pub mod adversary;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod protocol;
pub mod regularity;
pub mod vector;

pub use adversary::AdversaryModel;
pub use engine::{run_simulation, ExecutionMode, Network, RoundDiagnostics, SimulationSpec, Theory, Trajectory};
pub use error::{GeometryError, HarnessError, ProtocolError, RegularityError, SimulationError};
pub use geometry::{ConvexSet, Halfspace};
pub use harness::{
    fit_rate, generate_scenario, load_scenario, run_scenario, write_trace, Scenario, ScenarioConfig, Template,
    TemplateParams, Trace,
};
pub use protocol::{filter_received, local_update, AgentId, AgentState, FilterOutcome};
pub use regularity::{
    alpha_upper_bound, check_k_redundancy, estimate_mu, k_threshold, rho_bound, RegularityReport, Sampler,
};
