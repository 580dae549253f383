//! Exact hypergeometric tails and binomial intervals.

use crate::chance::Prob;

pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// P(X = k) for `draws` taken without replacement from `population` items of
/// which `successes` are marked.
pub fn hypergeometric_pmf(population: u64, successes: u64, draws: u64, k: u64) -> Prob {
    let total = binomial_u128(population, draws);
    if k > successes || k > draws || draws - k > population - successes.min(population) {
        return Prob::from_integer(0);
    }
    Prob::new(
        binomial_u128(successes, k) * binomial_u128(population - successes, draws - k),
        total,
    )
}

pub fn hypergeometric_cdf(population: u64, successes: u64, draws: u64, k: u64) -> Prob {
    (0..=k.min(draws))
        .map(|i| hypergeometric_pmf(population, successes, draws, i))
        .fold(Prob::from_integer(0), |a, b| a + b)
}

/// Largest count `r` of compromised items among `population` still
/// consistent, at one-sided level `alpha`, with seeing `observed` compromised
/// items in a uniform sample of `sample` of them.
pub fn hypergeometric_upper_bound(population: u64, sample: u64, observed: u64, alpha: f64) -> u64 {
    let alpha = Prob::new((alpha * 1e9).round() as u128, 1_000_000_000);
    (observed..=population - (sample - observed))
        .rev()
        .find(|&r| hypergeometric_cdf(population, r, sample, observed) >= alpha)
        .unwrap_or(observed)
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn to_f64(p: Prob) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}
