//! Exhaustive search over deterministic adversary strategies.
//!
//! A strategy is a decision tree: each node names an action, and the
//! observation that action returns selects the child consulted at the next
//! decision. Below the tree the adversary passes. Observations are outcome
//! classes only, with no serials or message contents, so histories are
//! canonical by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chance::{for_each_path, Coins, Prob, SeededCoins};
use crate::engine::{Action, Adversary, DecisionPoint, Observation, ProtocolOutcome, Verdict};
use crate::error::{Error, Result};
use crate::protocols::{self, ProtocolSpec, TheorySpec};
use crate::scenario::WorldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub action: Action,
    /// One subtree per outcome class of `action`, or none at all to pass
    /// from here on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Node>,
}

impl Node {
    fn pass() -> Node {
        Node {
            action: Action::Pass,
            children: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AdversaryStrategy {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<Node>,
}

impl AdversaryStrategy {
    pub fn depth(&self) -> usize {
        fn d(n: &Node) -> usize {
            1 + n.children.iter().map(d).max().unwrap_or(0)
        }
        self.root.as_ref().map_or(0, d)
    }
}

/// Plays a strategy tree.
pub struct TreeEve<'a> {
    at: Option<&'a Node>,
}

impl<'a> TreeEve<'a> {
    pub fn new(strategy: &'a AdversaryStrategy) -> Self {
        TreeEve {
            at: strategy.root.as_ref(),
        }
    }
}

impl Adversary for TreeEve<'_> {
    fn decide(&mut self, _: &DecisionPoint) -> Option<Action> {
        Some(self.at.map_or(Action::Pass, |n| n.action))
    }

    fn observe(&mut self, obs: Observation) -> bool {
        if let Some(n) = self.at {
            self.at = n.children.get(obs as usize);
        }
        true
    }
}

/// Number of full-depth trees: `S(0) = 1`, `S(h) = sum_a S(h-1)^k(a)`.
pub fn strategy_count(menu: &[Action], horizon: usize) -> Option<u128> {
    let mut s: u128 = 1;
    for _ in 0..horizon {
        let mut next: u128 = 0;
        for a in menu {
            next = next.checked_add(s.checked_pow(a.outcome_classes() as u32)?)?;
        }
        s = next;
    }
    Some(s)
}

fn decode(menu: &[Action], horizon: usize, mut index: u128) -> Option<Node> {
    if horizon == 0 {
        return None;
    }
    let sub = strategy_count(menu, horizon - 1).expect("counted before decoding");
    for &a in menu {
        let k = a.outcome_classes();
        let block = sub.pow(k as u32);
        if index < block {
            // first child is the most significant digit
            let children = (0..k)
                .rev()
                .filter_map(|pos| decode(menu, horizon - 1, index / sub.pow(pos as u32) % sub))
                .collect();
            return Some(Node { action: a, children });
        }
        index -= block;
    }
    unreachable!("index below the strategy count")
}

fn checked_count(menu: &[Action], horizon: usize, cap: u128) -> Result<u128> {
    let count = strategy_count(menu, horizon).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::BudgetExceeded { count, cap });
    }
    Ok(count)
}

/// Every full-depth strategy tree over `menu`, in lexicographic order of
/// (action position, children left to right).
pub fn enumerate(menu: &[Action], horizon: usize, cap: u128) -> Result<impl Iterator<Item = AdversaryStrategy> + '_> {
    let count = checked_count(menu, horizon, cap)?;
    Ok((0..count).map(move |i| AdversaryStrategy {
        root: decode(menu, horizon, i),
    }))
}

pub fn strategy_at(menu: &[Action], horizon: usize, index: u128) -> AdversaryStrategy {
    AdversaryStrategy {
        root: decode(menu, horizon, index),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Accepted run where Eve knows every raw bit the final key depends on.
    KeyKnowledge,
    /// The committer opens to the other value and is accepted.
    Equivocation,
    /// Eve holds part of the final key material and nobody noticed.
    UndetectedRead,
}

impl Objective {
    pub fn holds(self, outcome: &ProtocolOutcome) -> bool {
        let st = &outcome.stats;
        match self {
            Objective::KeyKnowledge => crate::scenario::accepted(&outcome.verdict) && st.eve_knows_key,
            Objective::Equivocation => match outcome.verdict {
                Verdict::CommitmentOpened { bit, accepted } => accepted && st.committed != Some(bit),
                _ => false,
            },
            Objective::UndetectedRead => {
                !outcome.verdict.is_abort() && !st.detected && st.eve_known_key_bits > 0
            }
        }
    }
}

/// A bounded game: a protocol, an objective, and the adversary's options.
pub trait Game: Sync {
    fn menu(&self) -> &[Action];
    fn horizon(&self) -> usize;
    /// Plays one run; `Ok(true)` when the objective was met.
    fn play(&self, coins: &mut dyn Coins, eve: &mut dyn Adversary) -> Result<bool>;
    fn describe(&self) -> Value;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolGame {
    pub world: WorldSpec,
    pub theory: TheorySpec,
    pub protocol: ProtocolSpec,
    pub objective: Objective,
    pub menu: Vec<Action>,
    pub horizon: usize,
}

impl Game for ProtocolGame {
    fn menu(&self) -> &[Action] {
        &self.menu
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn play(&self, coins: &mut dyn Coins, eve: &mut dyn Adversary) -> Result<bool> {
        let world = self.world.build()?;
        let (_, outcome) = protocols::run(world, &self.theory, &self.protocol, coins, eve, false)?;
        Ok(self.objective.holds(&outcome))
    }

    fn describe(&self) -> Value {
        json!({
            "protocol": self.protocol,
            "theory": self.theory,
            "objective": self.objective,
        })
    }
}

/// Exact success probability of one strategy.
pub fn evaluate(game: &dyn Game, strategy: &AdversaryStrategy) -> Result<Prob> {
    let mut total = Prob::from_integer(0);
    let mut failure = None;
    for_each_path(
        |coins| game.play(coins, &mut TreeEve::new(strategy)),
        |p, r| match r {
            Ok(true) => total += p,
            Ok(false) => {}
            Err(e) => failure = Some(e),
        },
    );
    failure.map_or(Ok(total), Err)
}

/// Seeded Monte Carlo count of successes out of `samples`.
pub fn monte_carlo(game: &dyn Game, strategy: &AdversaryStrategy, samples: u64, seed: u64) -> Result<u64> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut coins = SeededCoins::for_trial(seed, i);
            game.play(&mut coins, &mut TreeEve::new(strategy)).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Following,
    /// Needed decision number `len(history)`.
    Reached,
    /// An observation differed from the history.
    Diverged,
}

/// Replays a fixed history of (action, observation) and stops the run at
/// the first decision past it.
struct HistoryEve<'a> {
    history: &'a [(Action, Observation)],
    horizon: usize,
    step: usize,
    status: Status,
}

impl Adversary for HistoryEve<'_> {
    fn decide(&mut self, _: &DecisionPoint) -> Option<Action> {
        let i = self.step;
        if i < self.history.len() {
            Some(self.history[i].0)
        } else if i < self.horizon {
            self.status = Status::Reached;
            None
        } else {
            Some(Action::Pass)
        }
    }

    fn observe(&mut self, obs: Observation) -> bool {
        let i = self.step;
        self.step += 1;
        if i < self.history.len() && self.history[i].1 != obs {
            self.status = Status::Diverged;
            return false;
        }
        true
    }
}

/// Value of the best continuation after `history`, with the subtree that
/// achieves it. At the empty history the menu is split across threads.
fn induct(game: &dyn Game, history: &mut Vec<(Action, Observation)>) -> Result<(Prob, Option<Node>)> {
    let mut settled = Prob::from_integer(0);
    let mut reached = false;
    let mut failure = None;
    let horizon = game.horizon();
    for_each_path(
        |coins| {
            let mut eve = HistoryEve {
                history,
                horizon,
                step: 0,
                status: Status::Following,
            };
            let r = game.play(coins, &mut eve);
            (r, eve.status)
        },
        |p, (r, status)| match (status, r) {
            (Status::Following, Ok(true)) => settled += p,
            (Status::Following, Ok(false)) | (Status::Diverged, _) => {}
            (Status::Reached, _) => reached = true,
            (Status::Following, Err(e)) => failure = Some(e),
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !reached {
        return Ok((settled, None));
    }
    let branch = |a: Action, history: &mut Vec<(Action, Observation)>| -> Result<(Prob, Node)> {
        let mut sum = Prob::from_integer(0);
        let mut children = Vec::with_capacity(a.outcome_classes());
        for obs in 0..a.outcome_classes() as Observation {
            history.push((a, obs));
            let r = induct(game, history);
            history.pop();
            let (v, child) = r?;
            sum += v;
            children.push(child);
        }
        // unreachable observations get a passive leaf
        let children = if children.iter().all(Option::is_none) {
            Vec::new()
        } else {
            children.into_iter().map(|c| c.unwrap_or_else(Node::pass)).collect()
        };
        Ok((sum, Node { action: a, children }))
    };
    let scored: Vec<Result<(Prob, Node)>> = if history.is_empty() {
        game.menu().par_iter().map(|&a| branch(a, &mut Vec::new())).collect()
    } else {
        game.menu().iter().map(|&a| branch(a, history)).collect()
    };
    let mut best: Option<(Prob, Node)> = None;
    for s in scored {
        let (v, node) = s?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, node));
        }
    }
    let (v, node) = best.expect("menu is not empty");
    Ok((settled + v, Some(node)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub game: Value,
    pub horizon: usize,
    pub menu: Vec<Action>,
    pub strategy: AdversaryStrategy,
    pub numerator: u128,
    pub denominator: u128,
}

impl Witness {
    pub fn probability(&self) -> Prob {
        Prob::new(self.numerator, self.denominator)
    }
}

fn witness(game: &dyn Game, strategy: AdversaryStrategy, p: Prob) -> Witness {
    Witness {
        game: game.describe(),
        horizon: game.horizon(),
        menu: game.menu().to_vec(),
        strategy,
        numerator: *p.numer(),
        denominator: *p.denom(),
    }
}

/// Best strategy within the game's horizon and its exact success
/// probability, by backward induction over the adversary's histories.
/// Ties go to the earlier action in the menu.
pub fn best_attack(game: &dyn Game, cap: u128) -> Result<Witness> {
    if game.menu().is_empty() {
        return Err(Error::invalid("search.menu", "needs at least one action"));
    }
    checked_count(game.menu(), game.horizon(), cap)?;
    let (p, root) = induct(game, &mut Vec::new())?;
    Ok(witness(game, AdversaryStrategy { root }, p))
}

/// Same answer as [`best_attack`] by scoring every enumerated strategy.
/// Ties go to the lexicographically first strategy.
pub fn best_by_enumeration(game: &dyn Game, cap: u128) -> Result<Witness> {
    let count = checked_count(game.menu(), game.horizon(), cap)?;
    let menu = game.menu();
    let horizon = game.horizon();
    let scored: Result<Vec<(Prob, u64)>> = (0..count as u64)
        .into_par_iter()
        .map(|i| evaluate(game, &strategy_at(menu, horizon, i as u128)).map(|p| (p, i)))
        .collect();
    let (p, i) = scored?
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one strategy");
    Ok(witness(game, strategy_at(menu, horizon, i as u128), p))
}

/// A named game from the canned desk-scale suite.
pub struct Canned {
    pub name: &'static str,
    pub game: ProtocolGame,
}

fn game(theory: TheorySpec, protocol: ProtocolSpec, objective: Objective, menu: &[Action], horizon: usize) -> ProtocolGame {
    ProtocolGame {
        world: WorldSpec::default(),
        theory,
        protocol,
        objective,
        menu: menu.to_vec(),
        horizon,
    }
}

/// The small games whose exact values are checked against sampling.
pub fn canned_games() -> Vec<Canned> {
    use crate::protocols::TheoryKind::*;
    use Action::*;
    let t = TheorySpec::new;
    vec![
        Canned {
            name: "kd_lbp_full_key",
            game: game(
                t(Lbp),
                ProtocolSpec::KdLbp { n: 2, m: 1, sigma: 0, hash: false },
                Objective::KeyKnowledge,
                &[Pass, Flip, Value, Substitute, Withhold],
                3,
            ),
        },
        Canned {
            name: "kd_combination_full_key",
            game: game(
                t(Combination).with_bits(2),
                ProtocolSpec::KdCombination { n: 2, m: 1, sigma: 0, hash: false },
                Objective::KeyKnowledge,
                &[Pass, TryOpen { guess: 0 }],
                2,
            ),
        },
        Canned {
            name: "ks_lbp_plain_read",
            game: game(t(Lbp), ProtocolSpec::KsLbpPlain { n: 2 }, Objective::UndetectedRead, &[Pass, Value], 2),
        },
        Canned {
            name: "ks_readonce_read",
            game: game(
                t(LbpReadOnce),
                ProtocolSpec::KsReadonce {
                    n: 6,
                    w: 2,
                    sigma: 0,
                    confidence: 0.95,
                    hash: false,
                },
                Objective::UndetectedRead,
                &[Pass, Value, ReadReplace],
                2,
            ),
        },
        Canned {
            name: "ks_serial_list_read",
            game: game(
                t(LbpReadOnce),
                ProtocolSpec::KsSerialList { n: 2 },
                Objective::UndetectedRead,
                &[Pass, Value, ReadReplace, Substitute],
                2,
            ),
        },
        Canned {
            name: "ks_rcp_read",
            game: game(
                t(Rcp),
                ProtocolSpec::KsRcp { n: 2, threshold: None },
                Objective::UndetectedRead,
                &[Pass, OpenRcp, Substitute],
                2,
            ),
        },
        Canned {
            name: "bc_dual_equivocation",
            game: game(
                t(Dual).with_bits(2),
                ProtocolSpec::BcDual { bit: None, claim_flipped: true },
                Objective::Equivocation,
                &[Pass, Flip, Substitute],
                1,
            ),
        },
        Canned {
            name: "bc_single_equivocation",
            game: game(
                t(Combination).with_bits(2),
                ProtocolSpec::BcSingle {
                    bit: None,
                    verify_reads: 2,
                    claim_flipped: true,
                },
                Objective::Equivocation,
                &[Pass, Substitute],
                1,
            ),
        },
        Canned {
            name: "bc_harrow_equivocation",
            game: game(
                t(Dual).with_bits(2),
                ProtocolSpec::BcHarrow {
                    k: 2,
                    bit: None,
                    claim_flipped: true,
                },
                Objective::Equivocation,
                &[Pass, Substitute],
                2,
            ),
        },
    ]
}
