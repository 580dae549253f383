//! Scenario files, single trials, and summaries over many trials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chance::SeededCoins;
use crate::engine::{Action, Adversary, FirstK, Passive, Phase, ProtocolOutcome, Verdict};
use crate::error::{Error, Result};
use crate::protocols::{self, ProtocolSpec, TheorySpec};
use crate::search::{AdversaryStrategy, Objective, TreeEve};
use crate::stats::wilson_interval;
use crate::transcript::{Event, Transcript};
use crate::world::{Location, LocationGraph, WorldState};

fn three() -> usize {
    3
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    #[serde(default = "three")]
    pub locations: usize,
    /// Undirected edges; a line `0 - 1 - ... - (locations - 1)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub alice: usize,
    /// Defaults to the last location.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bob: Option<usize>,
    #[serde(default = "one")]
    pub eve: usize,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            locations: 3,
            edges: None,
            alice: 0,
            bob: None,
            eve: 1,
        }
    }
}

impl WorldSpec {
    pub fn build(&self) -> Result<WorldState> {
        let graph = match &self.edges {
            Some(edges) => LocationGraph::new(self.locations, edges)?,
            None => LocationGraph::line(self.locations),
        };
        let bob = self.bob.unwrap_or(self.locations.saturating_sub(1));
        let (a, b, e) = (Location(self.alice), Location(bob), Location(self.eve));
        let world = WorldState::new(graph, a, b, e)?;
        if world.graph().common_neighbour(a, b) != Some(e) {
            return Err(Error::invalid("world.eve", "eve must start on the node joining the two labs"));
        }
        Ok(world)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum EveSpec {
    #[default]
    Passive,
    FirstK {
        phase: Phase,
        count: usize,
        action: Action,
    },
    Tree {
        tree: AdversaryStrategy,
    },
}

impl EveSpec {
    pub fn adversary(&self) -> Box<dyn Adversary + '_> {
        match self {
            EveSpec::Passive => Box::new(Passive),
            EveSpec::FirstK { phase, count, action } => Box::new(FirstK {
                phase: *phase,
                count: *count,
                action: *action,
            }),
            EveSpec::Tree { tree } => Box::new(TreeEve::new(tree)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub objective: Objective,
    pub horizon: usize,
    pub menu: Vec<Action>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub world: WorldSpec,
    pub theory: TheorySpec,
    pub protocol: ProtocolSpec,
    #[serde(default)]
    pub eve: EveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpec>,
}

/// Rejected scenario file; the message names the offending line or field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl Config {
    pub fn from_toml(text: &str) -> std::result::Result<Config, ConfigError> {
        let config: Config = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        config.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn validate(&self) -> Result<()> {
        self.world.build()?;
        self.protocol.validate(&self.theory)?;
        if let Some(search) = &self.search {
            if search.menu.is_empty() {
                return Err(Error::invalid("search.menu", "needs at least one action"));
            }
        }
        Ok(())
    }
}

/// Runs trial `trial` of a batch seeded with `seed`.
pub fn run_trial(config: &Config, seed: u64, trial: u64, recording: bool) -> Result<(Transcript, ProtocolOutcome)> {
    let mut coins = SeededCoins::for_trial(seed, trial);
    let mut eve = config.eve.adversary();
    let world = config.world.build()?;
    protocols::run(world, &config.theory, &config.protocol, &mut coins, &mut *eve, recording)
}

pub fn accepted(verdict: &Verdict) -> bool {
    match verdict {
        Verdict::KeyAgreed { .. } | Verdict::StorageVerified { .. } => true,
        Verdict::CommitmentOpened { accepted, .. } => *accepted,
        Verdict::Analysis { holds, .. } => *holds,
        Verdict::Abort(_) | Verdict::Inconclusive => false,
    }
}

/// Additive counts over trials; merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub accepted: u64,
    pub detected: u64,
    pub key_bits: u64,
    pub keys_disagree: u64,
    pub aborts: BTreeMap<String, u64>,
}

impl Tally {
    pub fn of(outcome: &ProtocolOutcome) -> Tally {
        let mut t = Tally {
            trials: 1,
            accepted: accepted(&outcome.verdict) as u64,
            detected: outcome.stats.detected as u64,
            key_bits: outcome.verdict.key_len() as u64,
            keys_disagree: (outcome.verdict.keys_agree() == Some(false)) as u64,
            aborts: BTreeMap::new(),
        };
        if let Verdict::Abort(reason) = &outcome.verdict {
            let name = serde_json::to_value(reason).expect("reasons serialize")["reason"]
                .as_str()
                .unwrap_or("unknown")
                .to_string();
            t.aborts.insert(name, 1);
        }
        t
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.accepted += other.accepted;
        self.detected += other.detected;
        self.key_bits += other.key_bits;
        self.keys_disagree += other.keys_disagree;
        for (k, v) in other.aborts {
            *self.aborts.entry(k).or_default() += v;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: u64,
    pub acceptance_rate: f64,
    /// Over accepted trials.
    pub mean_key_length: f64,
    pub detection_rate: f64,
    /// 95% Wilson interval for the detection rate.
    pub detection_interval: [f64; 2],
    pub keys_disagree: u64,
    pub aborts: BTreeMap<String, u64>,
}

impl From<&Tally> for Summary {
    fn from(t: &Tally) -> Summary {
        let n = t.trials.max(1) as f64;
        let (lo, hi) = wilson_interval(t.detected, t.trials, 1.96);
        Summary {
            trials: t.trials,
            acceptance_rate: t.accepted as f64 / n,
            mean_key_length: if t.accepted == 0 {
                0.0
            } else {
                t.key_bits as f64 / t.accepted as f64
            },
            detection_rate: t.detected as f64 / n,
            detection_interval: [lo, hi],
            keys_disagree: t.keys_disagree,
            aborts: t.aborts.clone(),
        }
    }
}

/// Recovers a run's outcome from its transcript alone.
pub fn outcome_from_events(events: &[Event]) -> Option<ProtocolOutcome> {
    events
        .iter()
        .rev()
        .find(|e| e.kind == "outcome")
        .and_then(|e| serde_json::from_value(e.payload.clone()).ok())
}
