//! Per-agent behavior of a normal agent: the distance filter followed by the
//! projected consensus step.
//!
//! Each round a normal agent measures the Euclidean distance from its own
//! value to every received value, discards the `f` furthest, moves by `alpha`
//! times the summed differences to the retained values, and projects the
//! result back onto its own constraint set.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;
use crate::geometry::ConvexSet;
use crate::vector::dist;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub x: Vec<f64>,
    pub constraint: ConvexSet,
}

impl AgentState {
    /// Builds the state for round 0, projecting `x` onto `constraint` first.
    pub fn initial(id: AgentId, x: &[f64], constraint: ConvexSet) -> Result<Self, ProtocolError> {
        let x = constraint.project(x)?;
        Ok(AgentState { id, x, constraint })
    }
}

/// Which senders a receiver kept and which it discarded in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterOutcome {
    /// Ascending sender ids.
    pub retained: Vec<AgentId>,
    /// Ascending sender ids; exactly `f` of them.
    pub removed: Vec<AgentId>,
}

/// Discards the `f` received values furthest from `own`.
///
/// Ties are broken by removing the larger sender id first, so the outcome is a
/// pure function of the multiset of `(sender, value)` pairs.
pub fn filter_received(own: &[f64], received: &[(AgentId, &[f64])], f: usize) -> Result<FilterOutcome, ProtocolError> {
    if received.len() <= f {
        return Err(ProtocolError::TooFewMessages {
            received: received.len(),
            f,
        });
    }
    let mut senders: Vec<AgentId> = received.iter().map(|(id, _)| *id).collect();
    senders.sort_unstable();
    if let Some(w) = senders.windows(2).find(|w| w[0] == w[1]) {
        return Err(ProtocolError::DuplicateSender(w[0].0));
    }
    let mut ranked: Vec<(f64, AgentId)> = received.iter().map(|(id, v)| (dist(own, v), *id)).collect();
    ranked.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => b.1.cmp(&a.1),
        other => other,
    });
    let mut removed: Vec<AgentId> = ranked[..f].iter().map(|(_, id)| *id).collect();
    let mut retained: Vec<AgentId> = ranked[f..].iter().map(|(_, id)| *id).collect();
    removed.sort_unstable();
    retained.sort_unstable();
    Ok(FilterOutcome { retained, removed })
}

/// `project(x + alpha * Σ (v - x))` over the retained values, summed in order.
pub fn local_update(state: &AgentState, retained: &[&[f64]], alpha: f64) -> Result<AgentState, ProtocolError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(ProtocolError::NonPositiveStep(alpha));
    }
    let pull = consensus_sum(&state.x, retained);
    let moved: Vec<f64> = state.x.iter().zip(&pull).map(|(x, p)| x + alpha * p).collect();
    let x = state.constraint.project(&moved)?;
    Ok(AgentState {
        id: state.id,
        x,
        constraint: state.constraint.clone(),
    })
}

/// `Σ_j (v_j - x)`, accumulated left to right.
pub fn consensus_sum(x: &[f64], values: &[&[f64]]) -> Vec<f64> {
    let mut acc = vec![0.0; x.len()];
    for v in values {
        debug_assert_eq!(v.len(), x.len());
        for ((a, vi), xi) in acc.iter_mut().zip(v.iter()).zip(x) {
            *a += vi - xi;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(v: &[usize]) -> Vec<AgentId> {
        v.iter().copied().map(AgentId).collect()
    }

    fn scalar_inbox(pairs: &[(usize, f64)]) -> Vec<(AgentId, Vec<f64>)> {
        pairs.iter().map(|&(id, v)| (AgentId(id), vec![v])).collect()
    }

    fn as_refs(inbox: &[(AgentId, Vec<f64>)]) -> Vec<(AgentId, &[f64])> {
        inbox.iter().map(|(id, v)| (*id, v.as_slice())).collect()
    }

    #[test]
    fn removes_unique_furthest() {
        let inbox = scalar_inbox(&[(2, 1.0), (3, -2.0), (4, 0.5), (5, 9.0)]);
        let out = filter_received(&[0.0], &as_refs(&inbox), 1).unwrap();
        assert_eq!(out.removed, ids(&[5]));
        assert_eq!(out.retained, ids(&[2, 3, 4]));
    }

    #[test]
    fn ties_remove_larger_ids_first() {
        let inbox = scalar_inbox(&[(2, 1.0), (3, -1.0), (4, 1.0), (5, -1.0)]);
        let out = filter_received(&[0.0], &as_refs(&inbox), 2).unwrap();
        assert_eq!(out.removed, ids(&[4, 5]));
        assert_eq!(out.retained, ids(&[2, 3]));
    }

    #[test]
    fn zero_budget_keeps_everything() {
        let inbox = scalar_inbox(&[(1, 3.0), (0, -7.0)]);
        let out = filter_received(&[0.0], &as_refs(&inbox), 0).unwrap();
        assert!(out.removed.is_empty());
        assert_eq!(out.retained, ids(&[0, 1]));
    }

    #[test]
    fn too_few_messages() {
        let inbox = scalar_inbox(&[(1, 3.0)]);
        assert_eq!(
            filter_received(&[0.0], &as_refs(&inbox), 1),
            Err(ProtocolError::TooFewMessages { received: 1, f: 1 })
        );
    }

    #[test]
    fn duplicate_sender_rejected() {
        let inbox = scalar_inbox(&[(1, 3.0), (1, 0.5), (2, 0.0)]);
        assert_eq!(
            filter_received(&[0.0], &as_refs(&inbox), 1),
            Err(ProtocolError::DuplicateSender(1))
        );
    }

    #[test]
    fn update_projects_onto_halfspace() {
        let state = AgentState {
            id: AgentId(0),
            x: vec![0.0],
            constraint: ConvexSet::halfspace(vec![1.0], 0.0).unwrap(),
        };
        let vals = [[1.0], [-1.0], [0.5]];
        let refs: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
        let moved = consensus_sum(&state.x, &refs);
        assert!((0.1 * moved[0] - 0.05).abs() < 1e-15);
        let next = local_update(&state, &refs, 0.1).unwrap();
        assert_eq!(next.x, vec![0.0]);
        assert_eq!(next.id, state.id);
        assert_eq!(next.constraint, state.constraint);
    }

    #[test]
    fn agreeing_neighbors_are_a_fixed_point() {
        let x = vec![-1.0, 0.25];
        let state = AgentState {
            id: AgentId(3),
            x: x.clone(),
            constraint: ConvexSet::halfspace(vec![1.0, 0.0], 0.0).unwrap(),
        };
        let refs: Vec<&[f64]> = vec![&x, &x, &x];
        let next = local_update(&state, &refs, 0.7).unwrap();
        assert_eq!(next.x, x);
    }

    #[test]
    fn unconstrained_step() {
        let state = AgentState {
            id: AgentId(0),
            x: vec![1.0, 1.0],
            constraint: ConvexSet::FullSpace,
        };
        let next = local_update(&state, &[&[0.0, 0.0]], 0.5).unwrap();
        assert_eq!(next.x, vec![0.5, 0.5]);
    }

    #[test]
    fn rejects_non_positive_step() {
        let state = AgentState {
            id: AgentId(0),
            x: vec![1.0],
            constraint: ConvexSet::FullSpace,
        };
        assert!(local_update(&state, &[&[0.0]], 0.0).is_err());
    }

    #[test]
    fn initial_state_is_projected() {
        let s = AgentState::initial(AgentId(1), &[3.0], ConvexSet::halfspace(vec![1.0], 0.0).unwrap()).unwrap();
        assert_eq!(s.x, vec![0.0]);
    }

    proptest! {
        #[test]
        fn filter_contract(
            own in prop::collection::vec(-10.0f64..10.0, 2),
            values in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 2..12),
            f_frac in 0.0f64..1.0,
            seed in any::<u64>(),
        ) {
            let f = ((values.len() - 1) as f64 * f_frac) as usize;
            let inbox: Vec<(AgentId, Vec<f64>)> =
                values.iter().enumerate().map(|(i, v)| (AgentId(i + 1), v.clone())).collect();
            let out = filter_received(&own, &as_refs(&inbox), f).unwrap();

            prop_assert_eq!(out.removed.len(), f);
            prop_assert_eq!(out.retained.len(), values.len() - f);
            let mut all: Vec<AgentId> = out.retained.iter().chain(&out.removed).copied().collect();
            all.sort();
            prop_assert_eq!(all, (1..=values.len()).map(AgentId).collect::<Vec<_>>());

            let d = |id: &AgentId| dist(&own, &inbox[id.0 - 1].1);
            let max_kept = out.retained.iter().map(d).fold(0.0, f64::max);
            let min_removed = out.removed.iter().map(d).fold(f64::INFINITY, f64::min);
            prop_assert!(max_kept <= min_removed);

            // order of arrival does not matter
            let mut shuffled = inbox.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let again = filter_received(&own, &as_refs(&shuffled), f).unwrap();
            prop_assert_eq!(again, out);
        }

        #[test]
        fn update_stays_feasible(
            x in prop::collection::vec(-5.0f64..5.0, 2),
            vals in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 2), 1..8),
            alpha in 1e-4f64..1.0,
        ) {
            let set = ConvexSet::ball(vec![1.0, -1.0], 2.0).unwrap();
            let state = AgentState::initial(AgentId(0), &x, set.clone()).unwrap();
            let refs: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
            let next = local_update(&state, &refs, alpha).unwrap();
            prop_assert!(set.contains(&next.x, 1e-10).unwrap());
        }
    }
}
