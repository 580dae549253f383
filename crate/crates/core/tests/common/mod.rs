#![allow(dead_code)]

use lockbox_core::chance::{for_each_path, Coins, Prob, SeededCoins};
use lockbox_core::engine::{Action, Adversary, DecisionPoint, ProtocolOutcome};
use lockbox_core::protocols::{self, ProtocolSpec, TheorySpec};
use lockbox_core::scenario::WorldSpec;

pub fn play(theory: &TheorySpec, protocol: &ProtocolSpec, coins: &mut dyn Coins, eve: &mut dyn Adversary) -> ProtocolOutcome {
    let world = WorldSpec::default().build().unwrap();
    protocols::run(world, theory, protocol, coins, eve, false).unwrap().1
}

/// Exact probability of `event` over every random branch.
pub fn exact<E: Adversary>(
    theory: &TheorySpec,
    protocol: &ProtocolSpec,
    mut eve: impl FnMut() -> E,
    event: impl Fn(&ProtocolOutcome) -> bool,
) -> Prob {
    let mut p = Prob::from_integer(0);
    for_each_path(
        |coins| event(&play(theory, protocol, coins, &mut eve())),
        |w, hit| {
            if hit {
                p += w
            }
        },
    );
    p
}

/// Seeded trials; returns how many satisfy `event`.
pub fn sample<E: Adversary>(
    theory: &TheorySpec,
    protocol: &ProtocolSpec,
    trials: u64,
    seed: u64,
    mut eve: impl FnMut() -> E,
    event: impl Fn(&ProtocolOutcome) -> bool,
) -> u64 {
    (0..trials)
        .filter(|&i| {
            let mut coins = SeededCoins::for_trial(seed, i);
            event(&play(theory, protocol, &mut coins, &mut eve()))
        })
        .count() as u64
}

/// Takes `action` at decision number `at` only.
#[derive(Clone, Copy)]
pub struct Only {
    pub at: usize,
    pub action: Action,
}

impl Adversary for Only {
    fn decide(&mut self, p: &DecisionPoint) -> Option<Action> {
        Some(if p.index == self.at { self.action } else { Action::Pass })
    }
}

pub fn one() -> Prob {
    Prob::from_integer(1)
}
