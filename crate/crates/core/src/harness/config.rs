//! Scenario files: a TOML document describing agents, sets, adversary and
//! step size, and its resolution into a runnable [`Scenario`].
//!
//! ```toml
//! n = 14
//! f = 1
//! byzantine_ids = [13]
//! m = 1
//! x_star = [0.0]
//! alpha = "auto:0.5"      # a number, "auto" (= "auto:0.5") or "auto:<fraction>"
//! k = 6                   # asserted redundancy level, optional
//! mu = 1.0                # a number or "estimate", optional
//! rounds = 1000
//! seed = 7
//!
//! [adversary]
//! strategy = "random_gaussian"   # or "echo_fixed_point" / "mirror_push"
//! sigma = 1.0
//!
//! [init]
//! kind = "ball"           # or kind = "explicit" with states = [[...], ...]
//! radius = 10.0           # center defaults to x_star
//!
//! [[sets]]
//! type = "halfspace"      # box, ball, polyhedron, singleton, full_space
//! normal = [-1.0]
//! offset = 0.0
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::adversary::AdversaryModel;
use crate::engine::{Network, SimulationSpec, Theory};
use crate::error::HarnessError;
use crate::geometry::ConvexSet;
use crate::protocol::{AgentId, AgentState};
use crate::regularity::{
    alpha_upper_bound, check_k_redundancy, estimate_mu, k_threshold, RedundancyVerdict, RegularityReport, Sampler,
    MU_SAFETY_FACTOR,
};

/// Fraction of the admissible step used by a bare `"auto"`.
pub const DEFAULT_ALPHA_FRACTION: f64 = 0.5;

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Value(f64),
    /// This fraction of the largest admissible step.
    Auto(f64),
}

impl Default for AlphaSpec {
    fn default() -> Self {
        AlphaSpec::Auto(DEFAULT_ALPHA_FRACTION)
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Value(v) => write!(f, "{v}"),
            AlphaSpec::Auto(frac) => write!(f, "auto:{frac}"),
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "auto" {
            return Ok(AlphaSpec::Auto(DEFAULT_ALPHA_FRACTION));
        }
        if let Some(frac) = s.strip_prefix("auto:") {
            let frac: f64 = frac.parse().map_err(|_| format!("bad auto fraction `{frac}`"))?;
            if !(frac > 0.0 && frac < 1.0) {
                return Err(format!("auto fraction must lie in (0, 1), got {frac}"));
            }
            return Ok(AlphaSpec::Auto(frac));
        }
        s.parse::<f64>()
            .map(AlphaSpec::Value)
            .map_err(|_| format!("expected a number, \"auto\" or \"auto:<fraction>\", got `{s}`"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum MuSpec {
    Value(f64),
    Estimate,
}

impl FromStr for MuSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "estimate" => Ok(MuSpec::Estimate),
            other => other
                .parse::<f64>()
                .map(MuSpec::Value)
                .map_err(|_| format!("expected a number or \"estimate\", got `{other}`")),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Integer(i64),
    Text(String),
}

impl Serialize for AlphaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            AlphaSpec::Value(v) => s.serialize_f64(*v),
            AlphaSpec::Auto(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match NumberOrText::deserialize(d)? {
            NumberOrText::Number(v) => Ok(AlphaSpec::Value(v)),
            NumberOrText::Integer(v) => Ok(AlphaSpec::Value(v as f64)),
            NumberOrText::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for MuSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MuSpec::Value(v) => s.serialize_f64(*v),
            MuSpec::Estimate => s.serialize_str("estimate"),
        }
    }
}

impl<'de> Deserialize<'de> for MuSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match NumberOrText::deserialize(d)? {
            NumberOrText::Number(v) => Ok(MuSpec::Value(v)),
            NumberOrText::Integer(v) => Ok(MuSpec::Value(v as f64)),
            NumberOrText::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// Uniform draws from a ball, then projected onto each agent's set.
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
    },
    /// One state per normal agent, in ascending id order.
    Explicit { states: Vec<Vec<f64>> },
}

/// A scenario file as written.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub f: usize,
    #[serde(default)]
    pub byzantine_ids: Vec<usize>,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: AlphaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuSpec>,
    pub rounds: usize,
    #[serde(default)]
    pub seed: u64,
    pub adversary: AdversaryModel,
    pub init: InitSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_sampler: Option<Sampler>,
    /// One set per normal agent, in ascending id order.
    pub sets: Vec<ConvexSet>,
}

/// A validated scenario with every derived quantity filled in.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub network: Network,
    pub alpha: f64,
    /// The value used by every formula; already scaled down when estimated.
    pub mu: Option<f64>,
    pub report: Option<RegularityReport>,
    pub initial: Vec<AgentState>,
}

impl Scenario {
    pub fn theory(&self) -> Option<Theory> {
        Some(Theory {
            mu: self.mu?,
            k: self.config.k?,
        })
    }

    /// Contraction factor at the resolved step, when `mu` and `k` are known.
    pub fn rho(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.rho(self.alpha))
    }

    pub fn simulation(&self) -> Result<SimulationSpec, HarnessError> {
        let x_star = self
            .config
            .x_star
            .clone()
            .ok_or_else(|| HarnessError::schema("x_star", "required to run a simulation"))?;
        Ok(SimulationSpec {
            network: self.network.clone(),
            initial: self.initial.clone(),
            adversary: self.config.adversary.clone(),
            alpha: self.alpha,
            rounds: self.config.rounds,
            x_star,
            seed: self.config.seed,
            theory: self.theory(),
        })
    }
}

pub fn read_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, HarnessError> {
    ScenarioConfig::from_toml(&std::fs::read_to_string(path)?)
}

/// Reads and resolves a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, HarnessError> {
    read_config(path)?.resolve()
}

pub fn write_scenario(config: &ScenarioConfig, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    std::fs::write(path, config.to_toml()?)?;
    Ok(())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        Ok(toml::to_string(self)?)
    }

    pub fn h(&self) -> usize {
        self.n - self.byzantine_ids.len()
    }

    fn validate(&self) -> Result<(), HarnessError> {
        use HarnessError as E;
        if self.n < self.f + 2 {
            return Err(E::schema(
                "n",
                format!("need n >= f + 2, got n = {}, f = {}", self.n, self.f),
            ));
        }
        let mut ids = self.byzantine_ids.clone();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(E::schema("byzantine_ids", "ids must be distinct"));
        }
        if ids.len() > self.f {
            return Err(E::schema(
                "byzantine_ids",
                format!("{} ids exceed the budget f = {}", ids.len(), self.f),
            ));
        }
        if let Some(bad) = ids.iter().find(|&&id| id >= self.n) {
            return Err(E::schema(
                "byzantine_ids",
                format!("id {bad} out of range for n = {}", self.n),
            ));
        }
        if self.m == 0 {
            return Err(E::schema("m", "dimension must be positive"));
        }
        if self.sets.len() != self.h() {
            return Err(E::schema(
                "sets",
                format!(
                    "expected one set per normal agent ({}), got {}",
                    self.h(),
                    self.sets.len()
                ),
            ));
        }
        for (i, set) in self.sets.iter().enumerate() {
            set.validate()
                .map_err(|e| E::schema(format!("sets[{i}]"), e.to_string()))?;
            if set.dim().is_some_and(|d| d != self.m) {
                return Err(E::schema(
                    format!("sets[{i}]"),
                    format!("dimension differs from m = {}", self.m),
                ));
            }
        }
        if let Some(x) = &self.x_star {
            if x.len() != self.m || !x.iter().all(|v| v.is_finite()) {
                return Err(E::schema(
                    "x_star",
                    format!("must be a finite vector of length {}", self.m),
                ));
            }
        }
        if let AlphaSpec::Value(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(E::schema("alpha", format!("must be positive, got {a}")));
            }
        }
        if let Some(MuSpec::Value(mu)) = self.mu {
            if !(mu > 0.0 && mu <= 1.0) {
                return Err(E::schema("mu", format!("must lie in (0, 1], got {mu}")));
            }
        }
        if let Some(k) = self.k {
            if k > self.n {
                return Err(E::schema("k", format!("k = {k} exceeds n = {}", self.n)));
            }
        }
        self.adversary.validate(self.m).map_err(|r| E::schema("adversary", r))?;
        match &self.init {
            InitSpec::Ball { center, radius } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(E::schema("init.radius", "must be finite and >= 0"));
                }
                if center.as_ref().is_some_and(|c| c.len() != self.m) {
                    return Err(E::schema("init.center", format!("must have length {}", self.m)));
                }
                if center.is_none() && self.x_star.is_none() {
                    return Err(E::schema("init.center", "required when x_star is absent"));
                }
            }
            InitSpec::Explicit { states } => {
                if states.len() != self.h() {
                    return Err(E::schema(
                        "init.states",
                        format!("expected {} states, got {}", self.h(), states.len()),
                    ));
                }
                if states
                    .iter()
                    .any(|s| s.len() != self.m || !s.iter().all(|v| v.is_finite()))
                {
                    return Err(E::schema(
                        "init.states",
                        format!("every state must be finite of length {}", self.m),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Validates the document, settles `mu` and `alpha`, checks the asserted
    /// redundancy, and draws the initial states.
    pub fn resolve(&self) -> Result<Scenario, HarnessError> {
        self.validate()?;
        let network = Network::new(
            self.n,
            self.f,
            self.byzantine_ids.iter().copied().map(AgentId).collect(),
        )?;
        let h = self.h();
        let sampler = self.mu_sampler.clone().unwrap_or_default();

        let needs_target = self.k.is_some() || self.mu == Some(MuSpec::Estimate);
        let x_star = match (&self.x_star, needs_target) {
            (Some(x), _) => Some(x.as_slice()),
            (None, true) => {
                return Err(HarnessError::schema(
                    "x_star",
                    "required when k or an estimated mu is given",
                ))
            }
            (None, false) => None,
        };

        let verdict = match (self.k, x_star) {
            (Some(k), Some(x)) => {
                let verdict = check_k_redundancy(&self.sets, self.n, k, x, &sampler)?;
                if !verdict.redundant {
                    let detail = verdict
                        .witness
                        .as_ref()
                        .map(|w| format!("; subfamily {:?} also contains {:?}", w.subset, w.point))
                        .unwrap_or_default();
                    return Err(HarnessError::schema(
                        "k",
                        format!("the sets are not {k}-redundant{detail}"),
                    ));
                }
                Some(verdict)
            }
            _ => None,
        };

        let (mu, mu_estimate) = match self.mu {
            None => (None, None),
            Some(MuSpec::Value(v)) => (Some(v), None),
            Some(MuSpec::Estimate) => {
                let k = self
                    .k
                    .ok_or_else(|| HarnessError::schema("mu", "\"estimate\" needs k"))?;
                let est = estimate_mu(&self.sets, self.n, k, x_star.unwrap_or_default(), &sampler)?;
                (Some((MU_SAFETY_FACTOR * est.mu).min(1.0)), Some(est.mu))
            }
        };

        let report = match (self.k, mu) {
            (Some(k), Some(mu)) => {
                let threshold = k_threshold(mu, self.f);
                if k as f64 <= threshold {
                    return Err(HarnessError::InfeasibleParameters { k, threshold });
                }
                let verdict = verdict.unwrap_or(RedundancyVerdict {
                    redundant: true,
                    witness: None,
                });
                Some(RegularityReport::new(k, self.f, h, mu, verdict, mu_estimate))
            }
            _ => None,
        };

        let alpha = match self.alpha {
            AlphaSpec::Value(a) => a,
            AlphaSpec::Auto(frac) => match (self.k, mu) {
                (Some(k), Some(mu)) => frac * alpha_upper_bound(mu, k, self.f, h),
                _ if self.f == 0 => frac / self.n as f64,
                _ => return Err(HarnessError::schema("alpha", "\"auto\" needs mu and k when f > 0")),
            },
        };

        let initial = self.initial_states(&network)?;
        Ok(Scenario {
            config: self.clone(),
            network,
            alpha,
            mu,
            report,
            initial,
        })
    }

    fn initial_states(&self, network: &Network) -> Result<Vec<AgentState>, HarnessError> {
        let raw: Vec<Vec<f64>> = match &self.init {
            InitSpec::Explicit { states } => states.clone(),
            InitSpec::Ball { center, radius } => {
                let center = center.as_ref().or(self.x_star.as_ref()).expect("validated");
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..self.h())
                    .map(|_| {
                        let mut dir: Vec<f64> = (0..self.m).map(|_| rng.sample(StandardNormal)).collect();
                        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                        let r = radius * rng.random::<f64>().powf(1.0 / self.m as f64);
                        let scale = if len > 0.0 { r / len } else { 0.0 };
                        for (d, c) in dir.iter_mut().zip(center) {
                            *d = c + scale * *d;
                        }
                        dir
                    })
                    .collect()
            }
        };
        network
            .normal()
            .iter()
            .zip(raw)
            .zip(&self.sets)
            .map(|((id, x), set)| {
                AgentState::initial(*id, &x, set.clone()).map_err(|e| match e {
                    crate::error::ProtocolError::Geometry(g) => HarnessError::Geometry(g),
                    other => HarnessError::Simulation(other.into()),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"
n = 14
f = 1
byzantine_ids = [13]
m = 1
x_star = [0.0]
alpha = "auto:0.5"
k = 6
mu = 1.0
rounds = 10
seed = 3

[adversary]
strategy = "random_gaussian"
sigma = 1.0

[init]
kind = "ball"
radius = 5.0
"#;

    fn scalar_sets(p: usize, q: usize) -> String {
        let mut s = String::new();
        for _ in 0..p {
            s.push_str("[[sets]]\ntype = \"halfspace\"\nnormal = [-1.0]\noffset = 0.0\n");
        }
        for _ in 0..q {
            s.push_str("[[sets]]\ntype = \"halfspace\"\nnormal = [1.0]\noffset = 0.0\n");
        }
        s
    }

    fn parse(text: &str) -> ScenarioConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn minimal_config_without_mu() {
        let cfg = parse(
            r#"
n = 4
f = 0
m = 2
rounds = 3
[adversary]
strategy = "echo_fixed_point"
target = [0.0, 0.0]
[init]
kind = "explicit"
states = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
[[sets]]
type = "full_space"
[[sets]]
type = "full_space"
[[sets]]
type = "full_space"
[[sets]]
type = "full_space"
"#,
        );
        let sc = cfg.resolve().unwrap();
        assert!(sc.report.is_none());
        assert!(sc.alpha > 0.0);
        assert!(sc.simulation().is_err());
    }

    #[test]
    fn auto_alpha_for_scalar_family() {
        let sc = parse(&format!("{SCALAR}{}", scalar_sets(7, 6))).resolve().unwrap();
        assert!((sc.alpha - 0.5 / 8788.0).abs() < 1e-15);
        let report = sc.report.as_ref().unwrap();
        assert!(report.redundant && report.feasible);
        assert_eq!(sc.initial.len(), 13);
        for s in &sc.initial {
            assert!(s.constraint.contains(&s.x, 0.0).unwrap());
        }
    }

    #[test]
    fn infeasible_k_reports_both_sides() {
        let text = format!("{}{}", SCALAR.replace("k = 6", "k = 5"), scalar_sets(7, 6));
        match parse(&text).resolve() {
            Err(HarnessError::InfeasibleParameters { k, threshold }) => {
                assert_eq!(k, 5);
                assert_eq!(threshold, 5.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unredundant_k_rejected() {
        let text = format!("{}{}", SCALAR.replace("k = 6", "k = 8"), scalar_sets(7, 6));
        assert!(matches!(parse(&text).resolve(), Err(HarnessError::Schema { field, .. }) if field == "k"));
    }

    #[test]
    fn estimated_mu_is_scaled() {
        let text = format!(
            "{}{}",
            SCALAR.replace("mu = 1.0", "mu = \"estimate\""),
            scalar_sets(7, 6)
        );
        let sc = parse(&text).resolve().unwrap();
        let report = sc.report.unwrap();
        assert!((report.mu_estimate.unwrap() - 1.0).abs() < 1e-9);
        assert!((sc.mu.unwrap() - 0.99).abs() < 1e-9);
    }

    #[test]
    fn schema_violations() {
        let base = format!("{SCALAR}{}", scalar_sets(7, 6));
        let cases = [
            (
                base.replace("byzantine_ids = [13]", "byzantine_ids = [13, 12]"),
                "byzantine_ids",
            ),
            (base.replace("x_star = [0.0]", "x_star = [0.0, 1.0]"), "x_star"),
            (base.replace("alpha = \"auto:0.5\"", "alpha = -1.0"), "alpha"),
            (base.replace("mu = 1.0", "mu = 1.5"), "mu"),
            (format!("{SCALAR}{}", scalar_sets(7, 5)), "sets"),
        ];
        for (text, field) in cases {
            match parse(&text).resolve() {
                Err(HarnessError::Schema { field: got, .. }) => assert_eq!(got, field),
                other => panic!("{field}: {other:?}"),
            }
        }
        assert!(toml::from_str::<ScenarioConfig>(&base.replace("mu = 1.0", "mu = \"guess\"")).is_err());
        assert!(toml::from_str::<ScenarioConfig>(&format!("extra = 1\n{base}")).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = parse(&format!("{SCALAR}{}", scalar_sets(7, 6)));
        let again: ScenarioConfig = toml::from_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn alpha_spec_parsing() {
        assert_eq!("auto".parse::<AlphaSpec>().unwrap(), AlphaSpec::Auto(0.5));
        assert_eq!("auto:0.25".parse::<AlphaSpec>().unwrap(), AlphaSpec::Auto(0.25));
        assert_eq!("0.1".parse::<AlphaSpec>().unwrap(), AlphaSpec::Value(0.1));
        assert!("auto:2".parse::<AlphaSpec>().is_err());
    }
}
