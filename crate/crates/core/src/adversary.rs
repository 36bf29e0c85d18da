//! Byzantine message sources.
//!
//! Adversaries see every normal state of the current round and may tell each
//! receiver something different. They hold no constrained state of their own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::SimulationError;
use crate::protocol::AgentId;
use crate::vector::{dist, mean};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum AdversaryModel {
    /// Every Byzantine agent sends `target` to everyone, every round.
    EchoFixedPoint { target: Vec<f64> },
    /// Sends each receiver its own value pushed `offset_scale` further from `x_star`.
    MirrorPush { offset_scale: f64 },
    /// Sends an isotropic Gaussian draw around the mean normal state.
    RandomGaussian {
        sigma: f64,
        /// Falls back to the scenario seed when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

/// What the adversary observes when composing round `round`'s messages.
#[derive(Clone, Copy, Debug)]
pub struct RoundView<'a> {
    pub round: u64,
    /// Normal agents and their current values, ascending by id.
    pub normal: &'a [(AgentId, &'a [f64])],
    pub x_star: Option<&'a [f64]>,
    pub seed: u64,
}

pub fn echo_fixed_point(target: Vec<f64>) -> AdversaryModel {
    AdversaryModel::EchoFixedPoint { target }
}

pub fn mirror_push(offset_scale: f64) -> AdversaryModel {
    AdversaryModel::MirrorPush { offset_scale }
}

pub fn random_gaussian(sigma: f64, seed: u64) -> AdversaryModel {
    AdversaryModel::RandomGaussian {
        sigma,
        seed: Some(seed),
    }
}

impl AdversaryModel {
    pub fn validate(&self, m: usize) -> Result<(), String> {
        match self {
            AdversaryModel::EchoFixedPoint { target } => {
                if target.len() != m {
                    return Err(format!("echo target has dimension {}, expected {m}", target.len()));
                }
                if !target.iter().all(|v| v.is_finite()) {
                    return Err("echo target must be finite".into());
                }
            }
            AdversaryModel::MirrorPush { offset_scale } => {
                if !(offset_scale.is_finite() && *offset_scale >= 0.0) {
                    return Err("offset_scale must be finite and >= 0".into());
                }
            }
            AdversaryModel::RandomGaussian { sigma, .. } => {
                if !(sigma.is_finite() && *sigma >= 0.0) {
                    return Err("sigma must be finite and >= 0".into());
                }
            }
        }
        Ok(())
    }

    pub fn needs_target(&self) -> bool {
        matches!(self, AdversaryModel::MirrorPush { .. })
    }

    /// Messages from every Byzantine sender to one receiver, in `byzantine` order.
    pub fn messages_for(
        &self,
        view: &RoundView<'_>,
        byzantine: &[AgentId],
        receiver: AgentId,
    ) -> Result<Vec<Vec<f64>>, SimulationError> {
        if byzantine.is_empty() {
            return Ok(Vec::new());
        }
        let own = view
            .normal
            .iter()
            .find(|(id, _)| *id == receiver)
            .map(|(_, x)| *x)
            .ok_or_else(|| SimulationError::InvalidNetwork(format!("receiver {receiver} is not a normal agent")))?;
        match self {
            AdversaryModel::EchoFixedPoint { target } => Ok(vec![target.clone(); byzantine.len()]),
            AdversaryModel::MirrorPush { offset_scale } => {
                let x_star = view.x_star.ok_or(SimulationError::MissingTarget)?;
                let d = dist(own, x_star);
                let mut value = own.to_vec();
                if d > 0.0 {
                    for ((v, o), c) in value.iter_mut().zip(own).zip(x_star) {
                        *v += offset_scale * (o - c) / d;
                    }
                } else {
                    value[0] += offset_scale;
                }
                Ok(vec![value; byzantine.len()])
            }
            AdversaryModel::RandomGaussian { sigma, seed } => {
                let center = mean(view.normal.iter().map(|(_, x)| *x));
                let seed = seed.unwrap_or(view.seed);
                Ok(byzantine
                    .iter()
                    .map(|sender| {
                        let mut rng =
                            ChaCha8Rng::seed_from_u64(mix(&[seed, view.round, sender.0 as u64, receiver.0 as u64]));
                        center
                            .iter()
                            .map(|c| {
                                let z: f64 = StandardNormal.sample(&mut rng);
                                c + sigma * z
                            })
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

/// Folds several words into one seed with the SplitMix64 finalizer.
fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0x9E37_79B9_7F4A_7C15u64, |acc, w| {
        let mut z = (acc ^ w).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}
