//! Parameterized scenario families built from halfspaces through the origin.
//!
//! Byzantine agents always take the last `f` ids.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::adversary::{echo_fixed_point, random_gaussian, AdversaryModel};
use crate::error::HarnessError;
use crate::geometry::ConvexSet;
use crate::harness::config::{AlphaSpec, InitSpec, MuSpec, ScenarioConfig};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Template {
    /// Scalar agents split between `{x >= 0}` and `{x <= 0}`.
    ScalarTwoSided,
    /// Planar halfspaces with evenly spaced outward normals, all tangent at the origin.
    HalfspaceFan2d,
    /// A family one Byzantine echo can freeze away from the intersection.
    PinnedCounterexample,
}

impl Template {
    pub const ALL: [Template; 3] = [
        Template::ScalarTwoSided,
        Template::HalfspaceFan2d,
        Template::PinnedCounterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::ScalarTwoSided => "scalar-two-sided",
            Template::HalfspaceFan2d => "halfspace-fan-2d",
            Template::PinnedCounterexample => "thm1-counterexample",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Template {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Template::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| HarnessError::Template(format!("unknown template `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemplateParams {
    pub n: usize,
    pub f: usize,
    /// Agents on `{x >= 0}` and on `{x <= 0}`; scalar family only.
    pub split: Option<(usize, usize)>,
    pub k: Option<usize>,
    pub rounds: usize,
    pub seed: u64,
    pub adversary: Option<AdversaryModel>,
    pub alpha: Option<AlphaSpec>,
    pub init_radius: f64,
}

impl TemplateParams {
    pub fn new(n: usize, f: usize) -> Self {
        TemplateParams {
            n,
            f,
            split: None,
            k: None,
            rounds: 1000,
            seed: 0,
            adversary: None,
            alpha: None,
            init_radius: 10.0,
        }
    }
}

/// Regularity constant of the fan: the widest angular gap after dropping
/// `k - f` adjacent normals is `(k - f + 1)` spacings, and the worst probe bisects it.
pub fn fan_mu(n: usize, f: usize, k: usize) -> f64 {
    let spacing = PI / (n - f) as f64;
    ((k - f + 1) as f64 * spacing).cos()
}

pub fn generate_scenario(template: Template, params: &TemplateParams) -> Result<ScenarioConfig, HarnessError> {
    let TemplateParams { n, f, .. } = *params;
    if n < f + 2 {
        return Err(HarnessError::Template(format!("need n >= f + 2, got n = {n}, f = {f}")));
    }
    let h = n - f;
    let byzantine_ids: Vec<usize> = (h..n).collect();
    let gaussian = || random_gaussian(1.0, params.seed);
    let ball = InitSpec::Ball {
        center: None,
        radius: params.init_radius,
    };

    match template {
        Template::ScalarTwoSided => {
            let (p, q) = params.split.unwrap_or((h - h / 2, h / 2));
            if p + q != h || p == 0 || q == 0 {
                return Err(HarnessError::Template(format!(
                    "split {p}/{q} must be two positive parts summing to n - f = {h}"
                )));
            }
            let max_k = n - p.max(q) - 1;
            let k = params.k.unwrap_or(max_k);
            if k > max_k {
                return Err(HarnessError::Template(format!(
                    "split {p}/{q} is at most {max_k}-redundant, asked for k = {k}"
                )));
            }
            let mut sets = vec![ConvexSet::halfspace(vec![-1.0], 0.0)?; p];
            sets.extend(vec![ConvexSet::halfspace(vec![1.0], 0.0)?; q]);
            Ok(ScenarioConfig {
                n,
                f,
                byzantine_ids,
                m: 1,
                x_star: Some(vec![0.0]),
                alpha: params.alpha.unwrap_or_default(),
                k: Some(k),
                mu: Some(MuSpec::Value(1.0)),
                rounds: params.rounds,
                seed: params.seed,
                adversary: params.adversary.clone().unwrap_or_else(gaussian),
                init: ball,
                mu_sampler: None,
                sets,
            })
        }
        Template::HalfspaceFan2d => {
            let k = params
                .k
                .ok_or_else(|| HarnessError::Template("halfspace-fan-2d needs k".into()))?;
            if k < f || k >= n {
                return Err(HarnessError::Template(format!("k = {k} must lie in f..n = {f}..{n}")));
            }
            if 2 * (k - f + 1) >= h {
                return Err(HarnessError::Template(format!(
                    "{h} normals are too sparse for k = {k}: dropping {} adjacent ones opens a gap of 180 degrees or more",
                    k - f
                )));
            }
            let sets = (0..h)
                .map(|i| {
                    let theta = 2.0 * PI * i as f64 / h as f64;
                    ConvexSet::halfspace(vec![theta.cos(), theta.sin()], 0.0)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ScenarioConfig {
                n,
                f,
                byzantine_ids,
                m: 2,
                x_star: Some(vec![0.0, 0.0]),
                alpha: params.alpha.unwrap_or_default(),
                k: Some(k),
                mu: Some(MuSpec::Value(fan_mu(n, f, k))),
                rounds: params.rounds,
                seed: params.seed,
                adversary: params.adversary.clone().unwrap_or_else(gaussian),
                init: ball,
                mu_sampler: None,
                sets,
            })
        }
        Template::PinnedCounterexample => {
            if f == 0 || n < 2 * f + 1 {
                return Err(HarnessError::Template(format!(
                    "need f >= 1 and n >= 2f + 1, got n = {n}, f = {f}"
                )));
            }
            let pinned = n - 2 * f;
            let mut sets = vec![ConvexSet::halfspace(vec![1.0], 0.0)?; pinned];
            sets.extend(vec![ConvexSet::halfspace(vec![-1.0], 0.0)?; f]);
            let mut states = vec![vec![-1.0]; pinned];
            states.extend(vec![vec![0.0]; f]);
            Ok(ScenarioConfig {
                n,
                f,
                byzantine_ids,
                m: 1,
                x_star: Some(vec![0.0]),
                alpha: params.alpha.unwrap_or(AlphaSpec::Value(0.05)),
                k: None,
                mu: None,
                rounds: params.rounds,
                seed: params.seed,
                adversary: params.adversary.clone().unwrap_or_else(|| echo_fixed_point(vec![-1.0])),
                init: InitSpec::Explicit { states },
                mu_sampler: None,
                sets,
            })
        }
    }
}
