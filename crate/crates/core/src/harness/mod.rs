//! Scenario files, scenario templates, running a scenario, and writing its trace.

pub mod config;
pub mod templates;
pub mod trace_io;

use crate::engine::{run_simulation, ExecutionMode, RoundDiagnostics};
use crate::error::HarnessError;
use crate::protocol::AgentState;
use crate::regularity::RegularityReport;

pub use config::{load_scenario, read_config, write_scenario, AlphaSpec, InitSpec, MuSpec, Scenario, ScenarioConfig};
pub use templates::{fan_mu, generate_scenario, Template, TemplateParams};
pub use trace_io::{fit_rate, summary_toml, trace_to_string, write_trace};

/// A finished run.
#[derive(Clone, Debug)]
pub struct Trace {
    pub config: ScenarioConfig,
    pub alpha: f64,
    pub rho: Option<f64>,
    /// `rounds + 1` rows.
    pub rows: Vec<RoundDiagnostics>,
    pub final_states: Vec<AgentState>,
    pub report: Option<RegularityReport>,
    /// Absent when fewer than two rounds have positive `V`.
    pub fitted_rate: Option<f64>,
}

impl Trace {
    /// Names of the checks that failed in at least one round, in column order.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for row in &self.rows {
            if let Some(step) = &row.step {
                for name in step.flags.failures() {
                    if !out.contains(&name) {
                        out.push(name);
                    }
                }
            }
        }
        let order = [
            "agent_descent",
            "sum_identity",
            "sum_lower_bound",
            "aggregate_descent",
            "step_energy",
            "contraction",
        ];
        out.sort_by_key(|n| order.iter().position(|o| o == n));
        out
    }
}

pub fn run_scenario(scenario: &Scenario, mode: ExecutionMode) -> Result<Trace, HarnessError> {
    let trajectory = run_simulation(&scenario.simulation()?, mode)?;
    let fitted_rate = fit_rate(&trajectory.rows).ok();
    Ok(Trace {
        config: scenario.config.clone(),
        alpha: scenario.alpha,
        rho: scenario.rho(),
        rows: trajectory.rows,
        final_states: trajectory.final_states,
        report: scenario.report.clone(),
        fitted_rate,
    })
}
