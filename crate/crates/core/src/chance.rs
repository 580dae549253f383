//! Sources of randomness.
//!
//! Every random decision in a run goes through [`Coins`]. A run is therefore a
//! deterministic function of the sequence of answers it receives, which gives
//! two interchangeable drivers: [`SeededCoins`] samples the answers from a
//! seeded ChaCha stream, and [`for_each_path`] walks every possible answer
//! sequence depth-first and reports the exact probability of each one.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exact probability. Denominators stay products of small branching factors.
pub type Prob = Ratio<u128>;

pub trait Coins {
    /// Uniform draw from `0..n`. `n` must be at least 1.
    fn below(&mut self, n: u64) -> u64;

    fn bit(&mut self) -> bool {
        self.below(2) == 1
    }
}

impl<C: Coins + ?Sized> Coins for &mut C {
    fn below(&mut self, n: u64) -> u64 {
        (**self).below(n)
    }
}

#[derive(Debug, Clone)]
pub struct SeededCoins {
    rng: ChaCha8Rng,
}

impl SeededCoins {
    pub fn new(seed: u64) -> Self {
        SeededCoins {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for trial `trial` of a seeded batch.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        SeededCoins { rng }
    }
}

impl Coins for SeededCoins {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n >= 1, "empty range");
        self.rng.gen_range(0..n)
    }
}

/// Replays a fixed prefix of answers, then answers 0, recording every draw.
struct ScriptedCoins<'a> {
    script: &'a [u64],
    taken: Vec<(u64, u64)>,
}

impl Coins for ScriptedCoins<'_> {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n >= 1, "empty range");
        let pos = self.taken.len();
        let value = self.script.get(pos).copied().unwrap_or(0);
        debug_assert!(value < n, "replayed draw out of range; run is not deterministic");
        self.taken.push((value, n));
        value
    }
}

/// Runs `run` once for every distinct sequence of coin answers and hands each
/// result to `visit` together with the probability of that sequence.
///
/// Runs may stop drawing early; a run that stops is a single path whose
/// probability covers every continuation it did not look at. The sum of the
/// visited probabilities is exactly one.
pub fn for_each_path<T>(
    mut run: impl FnMut(&mut dyn Coins) -> T,
    mut visit: impl FnMut(Prob, T),
) {
    let mut script: Vec<u64> = Vec::new();
    loop {
        let mut coins = ScriptedCoins {
            script: &script,
            taken: Vec::with_capacity(script.len() + 8),
        };
        let out = run(&mut coins);
        let taken = coins.taken;
        let denom = taken
            .iter()
            .try_fold(1u128, |acc, &(_, n)| acc.checked_mul(n as u128))
            .expect("path probability denominator overflow");
        visit(Prob::new(1, denom), out);

        match taken.iter().rposition(|&(v, n)| v + 1 < n) {
            Some(i) => {
                script.clear();
                script.extend(taken[..i].iter().map(|&(v, _)| v));
                script.push(taken[i].0 + 1);
            }
            None => break,
        }
    }
}

/// Number of answer sequences `for_each_path` would visit.
pub fn count_paths(mut run: impl FnMut(&mut dyn Coins)) -> usize {
    let mut count = 0;
    for_each_path(|c| run(c), |_, _| count += 1);
    count
}

pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Uniformly random `k`-subset of `0..n`, sorted ascending.
///
/// When `C(n, k)` fits in a `u64` the subset is drawn with a single coin and
/// unranked, so exhaustive enumeration sees each subset exactly once.
pub fn subset(coins: &mut dyn Coins, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "subset larger than population");
    match binomial(n as u64, k as u64) {
        Some(total) => unrank_subset(n, k, coins.below(total)),
        None => {
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = i + coins.below((n - i) as u64) as usize;
                pool.swap(i, j);
            }
            let mut picked = pool[..k].to_vec();
            picked.sort_unstable();
            picked
        }
    }
}

/// Lexicographic unranking of `k`-subsets of `0..n`.
fn unrank_subset(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for remaining in (1..=k).rev() {
        loop {
            // subsets whose smallest remaining element is `next`
            let block = binomial((n - next - 1) as u64, (remaining - 1) as u64).unwrap_or(u64::MAX);
            if rank < block {
                out.push(next);
                next += 1;
                break;
            }
            rank -= block;
            next += 1;
        }
    }
    out
}
