//! Round-synchronous simulation over the complete graph, with white-box
//! instrumentation of the convergence analysis.
//!
//! Every round each normal agent broadcasts its value, Byzantine agents send
//! whatever the adversary chooses to each receiver, and all normal agents
//! filter and update against the same frozen snapshot.
//!
//! Diagnostics use `x_star` and the Byzantine id set, neither of which the
//! agents know, and never feed back into agent behavior. For normal agent `i`
//! with retained senders `M_i`:
//!
//! * `V_i = |x_i - x*|^2`, `V = Σ V_i`
//! * `phi_i = <x_i - x*, Σ_{M_i} (x_i - x_ji)>`, `psi_i = |Σ_{M_i} (x_i - x_ji)|^2`
//! * `L_i` = normal senders in `M_i`, `F_i` = Byzantine senders in `M_i`
//! * `e_i = Σ_{F_i} (x_i - x_ji) - Σ_{H_i \ L_i} (x_i - x_j)`
//! * `S_i = ½ Σ_{j in H} |x_i - x_j|^2 + <x_i - x*, e_i>`
//!
//! and the checked relations are
//!
//! * `V_i(t+1) <= V_i(t) - 2 alpha phi_i + alpha^2 psi_i` for every `i`
//! * `Σ phi_i = Σ S_i`
//! * `S_i >= ½ Σ_{L_i} |x_i - x_j|^2 - 2 |H_i \ L_i| V_i` for every `i`
//! * `Σ phi_i >= (mu^2 k / 2 - (4f + 2f mu^2 - mu^2) / 2) V` (needs `mu`, `k`)
//! * `Σ psi_i <= 4 |H|^3 V`
//! * `V(t+1) <= rho V(t)` (needs `mu`, `k`)

use rayon::prelude::*;

use crate::adversary::{AdversaryModel, RoundView};
use crate::error::{ProtocolError, SimulationError};
use crate::protocol::{filter_received, local_update, AgentId, AgentState, FilterOutcome};
use crate::regularity::{contraction_factor, descent_margin, k_threshold};
use crate::vector::{dist_sq, dot, norm, norm_sq};

/// Relative slack for every diagnostic inequality.
pub const DIAGNOSTIC_TOLERANCE: f64 = 1e-9;

/// Cap on `rounds * |H| * n * m` for one run.
pub const WORK_LIMIT: u128 = 100_000_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum ExecutionMode {
    #[default]
    Serial,
    /// Per-agent filter, update and diagnostics on the rayon pool.
    Parallel,
}

/// `n` agents on a complete graph, a Byzantine budget `f`, and the actual Byzantine ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    n: usize,
    f: usize,
    byzantine: Vec<AgentId>,
    normal: Vec<AgentId>,
}

impl Network {
    pub fn new(n: usize, f: usize, mut byzantine: Vec<AgentId>) -> Result<Self, SimulationError> {
        byzantine.sort_unstable();
        byzantine.dedup();
        if byzantine.len() > f {
            return Err(SimulationError::InvalidNetwork(format!(
                "{} Byzantine agents exceed the budget f = {f}",
                byzantine.len()
            )));
        }
        if let Some(bad) = byzantine.iter().find(|id| id.0 >= n) {
            return Err(SimulationError::InvalidNetwork(format!(
                "Byzantine id {bad} out of range for n = {n}"
            )));
        }
        if n < f + 2 {
            return Err(SimulationError::InvalidNetwork(format!(
                "need n >= f + 2, got n = {n}, f = {f}"
            )));
        }
        let normal = (0..n)
            .map(AgentId)
            .filter(|id| byzantine.binary_search(id).is_err())
            .collect();
        Ok(Network {
            n,
            f,
            byzantine,
            normal,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn byzantine(&self) -> &[AgentId] {
        &self.byzantine
    }

    pub fn normal(&self) -> &[AgentId] {
        &self.normal
    }

    pub fn is_byzantine(&self, id: AgentId) -> bool {
        self.byzantine.binary_search(&id).is_ok()
    }
}

/// The hypotheses under which the rate guarantee is checked.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Theory {
    pub mu: f64,
    pub k: usize,
}

/// Everything one round sees: `x_ji(t)` for every receiver `i` and sender `j != i`.
///
/// Normal senders broadcast, so their column is stored once; Byzantine values
/// are stored per receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundMessages {
    broadcast: Vec<(AgentId, Vec<f64>)>,
    byzantine_ids: Vec<AgentId>,
    /// `[receiver position][byzantine position]`
    byzantine: Vec<Vec<Vec<f64>>>,
}

impl RoundMessages {
    /// Value received by `receiver` from `sender`.
    pub fn value(&self, sender: AgentId, receiver: AgentId) -> Option<&[f64]> {
        if sender == receiver {
            return None;
        }
        let r = self.broadcast.binary_search_by_key(&receiver, |(id, _)| *id).ok()?;
        match self.byzantine_ids.binary_search(&sender) {
            Ok(b) => Some(&self.byzantine[r][b]),
            Err(_) => self
                .broadcast
                .binary_search_by_key(&sender, |(id, _)| *id)
                .ok()
                .map(|s| self.broadcast[s].1.as_slice()),
        }
    }

    /// All `n - 1` values received by the normal agent at `position`, ascending by sender.
    pub fn inbox(&self, position: usize) -> Vec<(AgentId, &[f64])> {
        let receiver = self.broadcast[position].0;
        let mut inbox: Vec<(AgentId, &[f64])> = self
            .broadcast
            .iter()
            .filter(|(id, _)| *id != receiver)
            .map(|(id, x)| (*id, x.as_slice()))
            .chain(
                self.byzantine_ids
                    .iter()
                    .zip(&self.byzantine[position])
                    .map(|(id, x)| (*id, x.as_slice())),
            )
            .collect();
        inbox.sort_unstable_by_key(|(id, _)| *id);
        inbox
    }

    pub fn receivers(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.broadcast.iter().map(|(id, _)| *id)
    }
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub states: Vec<AgentState>,
    pub outcomes: Vec<FilterOutcome>,
    pub messages: RoundMessages,
}

pub struct RoundContext<'a> {
    pub network: &'a Network,
    pub alpha: f64,
    pub round: u64,
    pub x_star: Option<&'a [f64]>,
    pub seed: u64,
    pub mode: ExecutionMode,
}

fn map_agents<T, F>(count: usize, mode: ExecutionMode, op: F) -> Result<Vec<T>, SimulationError>
where
    T: Send,
    F: Fn(usize) -> Result<T, SimulationError> + Sync + Send,
{
    match mode {
        ExecutionMode::Serial => (0..count).map(op).collect(),
        ExecutionMode::Parallel => (0..count).into_par_iter().map(op).collect(),
    }
}

/// One synchronous round: broadcast, adversary messages, filter and update for every normal agent.
///
/// `states` must list the normal agents in ascending id order.
pub fn run_round(
    states: &[AgentState],
    adversary: &AdversaryModel,
    ctx: &RoundContext<'_>,
) -> Result<RoundRecord, SimulationError> {
    let network = ctx.network;
    if states.len() != network.normal().len() || states.iter().zip(network.normal()).any(|(s, id)| s.id != *id) {
        return Err(SimulationError::InvalidNetwork(
            "states do not match the normal agents".into(),
        ));
    }
    let snapshot: Vec<(AgentId, &[f64])> = states.iter().map(|s| (s.id, s.x.as_slice())).collect();
    let view = RoundView {
        round: ctx.round,
        normal: &snapshot,
        x_star: ctx.x_star,
        seed: ctx.seed,
    };
    let byzantine = map_agents(states.len(), ctx.mode, |p| {
        adversary.messages_for(&view, network.byzantine(), states[p].id)
    })?;
    let messages = RoundMessages {
        broadcast: states.iter().map(|s| (s.id, s.x.clone())).collect(),
        byzantine_ids: network.byzantine().to_vec(),
        byzantine,
    };

    let updated = map_agents(states.len(), ctx.mode, |p| {
        let inbox = messages.inbox(p);
        let outcome = filter_received(&states[p].x, &inbox, network.f())?;
        let kept: Vec<&[f64]> = inbox
            .iter()
            .filter(|(id, _)| outcome.retained.binary_search(id).is_ok())
            .map(|(_, v)| *v)
            .collect();
        let next = local_update(&states[p], &kept, ctx.alpha)?;
        Ok::<_, SimulationError>((next, outcome))
    })?;
    let (states, outcomes) = updated.into_iter().unzip();
    Ok(RoundRecord {
        states,
        outcomes,
        messages,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentDiagnostics {
    pub phi: f64,
    pub psi: f64,
    pub s: f64,
    pub e: Vec<f64>,
}

/// Pass/fail for each checked relation; `None` when the hypotheses are not configured.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CheckFlags {
    pub agent_descent: bool,
    pub sum_identity: bool,
    pub sum_lower_bound: bool,
    pub aggregate_descent: Option<bool>,
    pub step_energy: bool,
    pub contraction: Option<bool>,
}

impl CheckFlags {
    pub fn all_ok(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let checks = [
            ("agent_descent", Some(self.agent_descent)),
            ("sum_identity", Some(self.sum_identity)),
            ("sum_lower_bound", Some(self.sum_lower_bound)),
            ("aggregate_descent", self.aggregate_descent),
            ("step_energy", Some(self.step_energy)),
            ("contraction", self.contraction),
        ];
        for (name, flag) in checks {
            if flag == Some(false) {
                out.push(name);
            }
        }
        out
    }
}

/// Quantities of the transition from round `t` to `t + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub agents: Vec<AgentDiagnostics>,
    pub sum_phi: f64,
    pub sum_s: f64,
    pub sum_psi: f64,
    pub v_next: f64,
    pub rho: Option<f64>,
    pub flags: CheckFlags,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundDiagnostics {
    pub t: usize,
    pub v: f64,
    /// `|x_i(t) - x*|^2` per normal agent, ascending by id.
    pub v_i: Vec<f64>,
    /// Absent for the final recorded round.
    pub step: Option<StepDiagnostics>,
}

impl RoundDiagnostics {
    pub fn at(t: usize, states: &[AgentState], x_star: &[f64]) -> Self {
        let v_i: Vec<f64> = states.iter().map(|s| dist_sq(&s.x, x_star)).collect();
        RoundDiagnostics {
            t,
            v: v_i.iter().sum(),
            v_i,
            step: None,
        }
    }
}

struct AgentCheck {
    diag: AgentDiagnostics,
    /// `|x_i - x*| |Σ_{M_i}(x_i - x_ji)|`, the rounding scale of `phi_i`.
    phi_scale: f64,
    vi_ok: bool,
    lower_ok: bool,
}

#[inline]
fn le_within(lhs: f64, rhs: f64, scale: f64) -> bool {
    lhs <= rhs + DIAGNOSTIC_TOLERANCE * scale
}

/// Evaluates every analysis quantity for one round and checks each relation.
#[allow(clippy::too_many_arguments)]
pub fn compute_diagnostics(
    before: &[AgentState],
    after: &[AgentState],
    messages: &RoundMessages,
    outcomes: &[FilterOutcome],
    network: &Network,
    x_star: &[f64],
    alpha: f64,
    theory: Option<Theory>,
    mode: ExecutionMode,
) -> Result<StepDiagnostics, SimulationError> {
    let h = before.len();
    let m = x_star.len();
    let checks = map_agents(h, mode, |p| {
        let xi = &before[p].x;
        let id = before[p].id;
        let d: Vec<f64> = xi.iter().zip(x_star).map(|(a, b)| a - b).collect();
        let v_i = norm_sq(&d);
        let outcome = &outcomes[p];

        let mut pull = vec![0.0; m];
        let mut e = vec![0.0; m];
        let mut kept_pairs = 0.0;
        for &j in &outcome.retained {
            let xj = messages
                .value(j, id)
                .ok_or_else(|| SimulationError::InvalidNetwork(format!("no message {j} -> {id}")))?;
            for c in 0..m {
                pull[c] += xi[c] - xj[c];
            }
            if network.is_byzantine(j) {
                for c in 0..m {
                    e[c] += xi[c] - xj[c];
                }
            } else {
                kept_pairs += dist_sq(xi, xj);
            }
        }
        let mut dropped_normal = 0usize;
        for &j in outcome.removed.iter().filter(|j| !network.is_byzantine(**j)) {
            let xj = messages
                .value(j, id)
                .ok_or_else(|| SimulationError::InvalidNetwork(format!("no message {j} -> {id}")))?;
            for c in 0..m {
                e[c] -= xi[c] - xj[c];
            }
            dropped_normal += 1;
        }
        let all_pairs: f64 = before.iter().map(|other| dist_sq(xi, &other.x)).sum();

        let phi = dot(&d, &pull);
        let psi = norm_sq(&pull);
        let de = dot(&d, &e);
        let s = 0.5 * all_pairs + de;

        let lower_rhs = 0.5 * kept_pairs - 2.0 * dropped_normal as f64 * v_i;
        let lower_scale = 0.5 * all_pairs + norm(&d) * norm(&e) + 0.5 * kept_pairs + 2.0 * dropped_normal as f64 * v_i;
        let lower_ok = le_within(lower_rhs, s, lower_scale);

        let v_next = dist_sq(&after[p].x, x_star);
        let vi_rhs = v_i - 2.0 * alpha * phi + alpha * alpha * psi;
        let vi_scale = v_i + 2.0 * alpha * phi.abs() + alpha * alpha * psi + v_next;
        let vi_ok = le_within(v_next, vi_rhs, vi_scale);

        Ok(AgentCheck {
            diag: AgentDiagnostics { phi, psi, s, e },
            phi_scale: norm(&d) * psi.sqrt(),
            vi_ok,
            lower_ok,
        })
    })?;

    let v: f64 = before.iter().map(|s| dist_sq(&s.x, x_star)).sum();
    let v_next: f64 = after.iter().map(|s| dist_sq(&s.x, x_star)).sum();
    let sum_phi: f64 = checks.iter().map(|c| c.diag.phi).sum();
    let sum_s: f64 = checks.iter().map(|c| c.diag.s).sum();
    let sum_psi: f64 = checks.iter().map(|c| c.diag.psi).sum();
    let phi_scale: f64 = checks.iter().map(|c| c.phi_scale).sum();

    let hf = h as f64;
    let energy_bound = 4.0 * hf * hf * hf * v;
    let applicable = theory.filter(|t| t.k as f64 > k_threshold(t.mu, network.f()));
    let rho = applicable.map(|t| contraction_factor(alpha, t.mu, t.k, network.f(), h));
    let aggregate_descent = applicable.map(|t| {
        let coeff = descent_margin(t.mu, t.k, network.f()) / 2.0;
        le_within(coeff * v, sum_phi, phi_scale + coeff.abs() * v)
    });

    let flags = CheckFlags {
        agent_descent: checks.iter().all(|c| c.vi_ok),
        sum_identity: (sum_phi - sum_s).abs() <= DIAGNOSTIC_TOLERANCE * (1.0 + sum_phi.abs()),
        sum_lower_bound: checks.iter().all(|c| c.lower_ok),
        aggregate_descent,
        step_energy: le_within(sum_psi, energy_bound, sum_psi + energy_bound),
        contraction: rho.map(|rho| v_next <= rho * v + DIAGNOSTIC_TOLERANCE * v),
    };

    Ok(StepDiagnostics {
        agents: checks.into_iter().map(|c| c.diag).collect(),
        sum_phi,
        sum_s,
        sum_psi,
        v_next,
        rho,
        flags,
    })
}

/// Inputs of one simulation run, already validated.
#[derive(Clone, Debug)]
pub struct SimulationSpec {
    pub network: Network,
    /// Normal agents in ascending id order, each already inside its set.
    pub initial: Vec<AgentState>,
    pub adversary: AdversaryModel,
    pub alpha: f64,
    pub rounds: usize,
    pub x_star: Vec<f64>,
    pub seed: u64,
    pub theory: Option<Theory>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `rounds + 1` rows; row `t` carries the step from `t` to `t + 1` for `t < rounds`.
    pub rows: Vec<RoundDiagnostics>,
    pub final_states: Vec<AgentState>,
}

pub fn run_simulation(spec: &SimulationSpec, mode: ExecutionMode) -> Result<Trajectory, SimulationError> {
    let work =
        spec.rounds as u128 * spec.initial.len() as u128 * spec.network.n() as u128 * spec.x_star.len().max(1) as u128;
    if work > WORK_LIMIT {
        return Err(SimulationError::BudgetExceeded {
            work,
            limit: WORK_LIMIT,
        });
    }
    if spec.adversary.needs_target() && spec.x_star.is_empty() {
        return Err(SimulationError::MissingTarget);
    }
    if spec.alpha.is_nan() || spec.alpha <= 0.0 {
        return Err(ProtocolError::NonPositiveStep(spec.alpha).into());
    }

    let mut states = spec.initial.clone();
    let mut rows = Vec::with_capacity(spec.rounds + 1);
    for t in 0..spec.rounds {
        let ctx = RoundContext {
            network: &spec.network,
            alpha: spec.alpha,
            round: t as u64,
            x_star: Some(&spec.x_star),
            seed: spec.seed,
            mode,
        };
        let record = run_round(&states, &spec.adversary, &ctx)?;
        let step = compute_diagnostics(
            &states,
            &record.states,
            &record.messages,
            &record.outcomes,
            &spec.network,
            &spec.x_star,
            spec.alpha,
            spec.theory,
            mode,
        )?;
        let mut row = RoundDiagnostics::at(t, &states, &spec.x_star);
        row.step = Some(step);
        rows.push(row);
        states = record.states;
    }
    rows.push(RoundDiagnostics::at(spec.rounds, &states, &spec.x_star));
    Ok(Trajectory {
        rows,
        final_states: states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{echo_fixed_point, random_gaussian};
    use crate::geometry::ConvexSet;

    fn agent(id: usize, x: &[f64], set: ConvexSet) -> AgentState {
        AgentState::initial(AgentId(id), x, set).unwrap()
    }

    fn ctx(network: &Network, alpha: f64) -> RoundContext<'_> {
        RoundContext {
            network,
            alpha,
            round: 0,
            x_star: None,
            seed: 0,
            mode: ExecutionMode::Serial,
        }
    }

    #[test]
    fn network_validation() {
        assert!(Network::new(4, 1, vec![AgentId(4)]).is_err());
        assert!(Network::new(4, 1, vec![AgentId(1), AgentId(2)]).is_err());
        assert!(Network::new(2, 1, vec![]).is_err());
        let net = Network::new(5, 2, vec![AgentId(3)]).unwrap();
        assert_eq!(net.normal(), &[AgentId(0), AgentId(1), AgentId(2), AgentId(4)]);
    }

    #[test]
    fn two_agent_unconstrained_averaging() {
        let net = Network::new(2, 0, vec![]).unwrap();
        let states = vec![
            agent(0, &[0.0], ConvexSet::FullSpace),
            agent(1, &[1.0], ConvexSet::FullSpace),
        ];
        let rec = run_round(&states, &echo_fixed_point(vec![0.0]), &ctx(&net, 0.25)).unwrap();
        assert_eq!(rec.states[0].x, vec![0.25]);
        assert_eq!(rec.states[1].x, vec![0.75]);
        assert!(rec.outcomes.iter().all(|o| o.removed.is_empty()));
    }

    #[test]
    fn message_matrix_is_complete() {
        let net = Network::new(5, 1, vec![AgentId(2)]).unwrap();
        let states: Vec<AgentState> = [0usize, 1, 3, 4]
            .iter()
            .map(|&i| agent(i, &[i as f64], ConvexSet::FullSpace))
            .collect();
        let rec = run_round(&states, &random_gaussian(1.0, 3), &ctx(&net, 0.1)).unwrap();
        for (p, receiver) in rec.messages.receivers().enumerate() {
            let inbox = rec.messages.inbox(p);
            assert_eq!(inbox.len(), 4);
            assert!(inbox.iter().all(|(j, _)| *j != receiver));
            for (j, v) in inbox {
                assert_eq!(rec.messages.value(j, receiver), Some(v));
            }
            assert_eq!(rec.outcomes[p].retained.len(), 3);
        }
        assert_eq!(rec.messages.value(AgentId(0), AgentId(0)), None);
        assert_eq!(rec.messages.value(AgentId(0), AgentId(2)), None);
    }

    #[test]
    fn consensus_fixed_point_diagnostics() {
        let net = Network::new(4, 1, vec![AgentId(3)]).unwrap();
        let sets = [
            ConvexSet::halfspace(vec![1.0], 0.0).unwrap(),
            ConvexSet::halfspace(vec![-1.0], 0.0).unwrap(),
            ConvexSet::halfspace(vec![1.0], 0.0).unwrap(),
        ];
        let states: Vec<AgentState> = sets
            .iter()
            .enumerate()
            .map(|(i, s)| agent(i, &[0.0], s.clone()))
            .collect();
        let adv = echo_fixed_point(vec![0.0]);
        let rec = run_round(&states, &adv, &ctx(&net, 0.1)).unwrap();
        let d = compute_diagnostics(
            &states,
            &rec.states,
            &rec.messages,
            &rec.outcomes,
            &net,
            &[0.0],
            0.1,
            Some(Theory { mu: 1.0, k: 6 }),
            ExecutionMode::Serial,
        )
        .unwrap();
        assert_eq!((d.sum_phi, d.sum_psi, d.sum_s, d.v_next), (0.0, 0.0, 0.0, 0.0));
        assert!(d.flags.all_ok());
        assert_eq!(d.flags.aggregate_descent, Some(true));
    }

    #[test]
    fn no_byzantine_means_no_correction() {
        let net = Network::new(4, 0, vec![]).unwrap();
        let pts = [[1.0, 2.0], [-3.0, 0.5], [0.0, -1.0], [2.0, 2.0]];
        let states: Vec<AgentState> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| agent(i, p, ConvexSet::FullSpace))
            .collect();
        let x_star = [0.5, 0.5];
        let rec = run_round(&states, &echo_fixed_point(vec![0.0, 0.0]), &ctx(&net, 0.05)).unwrap();
        let d = compute_diagnostics(
            &states,
            &rec.states,
            &rec.messages,
            &rec.outcomes,
            &net,
            &x_star,
            0.05,
            None,
            ExecutionMode::Serial,
        )
        .unwrap();
        assert!(d.agents.iter().all(|a| a.e.iter().all(|v| *v == 0.0)));
        let double_sum: f64 = pts.iter().flat_map(|a| pts.iter().map(move |b| dist_sq(a, b))).sum();
        assert!((d.sum_s - 0.5 * double_sum).abs() < 1e-12);
        assert!((d.sum_phi - d.sum_s).abs() < 1e-12);
        assert!(d.flags.all_ok());
        assert_eq!(d.flags.aggregate_descent, None);
    }

    #[test]
    fn zero_rounds_trajectory() {
        let net = Network::new(3, 0, vec![]).unwrap();
        let spec = SimulationSpec {
            network: net,
            initial: (0..3).map(|i| agent(i, &[i as f64], ConvexSet::FullSpace)).collect(),
            adversary: echo_fixed_point(vec![0.0]),
            alpha: 0.1,
            rounds: 0,
            x_star: vec![0.0],
            seed: 0,
            theory: None,
        };
        let tr = run_simulation(&spec, ExecutionMode::Serial).unwrap();
        assert_eq!(tr.rows.len(), 1);
        assert_eq!(tr.rows[0].v, 5.0);
        assert!(tr.rows[0].step.is_none());
    }

    #[test]
    fn work_budget_guard() {
        let net = Network::new(3, 0, vec![]).unwrap();
        let spec = SimulationSpec {
            network: net,
            initial: (0..3).map(|i| agent(i, &[i as f64], ConvexSet::FullSpace)).collect(),
            adversary: echo_fixed_point(vec![0.0]),
            alpha: 0.1,
            rounds: usize::MAX / 4,
            x_star: vec![0.0],
            seed: 0,
            theory: None,
        };
        assert!(matches!(
            run_simulation(&spec, ExecutionMode::Serial),
            Err(SimulationError::BudgetExceeded { .. })
        ));
    }
}
