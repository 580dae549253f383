//! Privacy amplification by a random binary matrix over GF(2).

use serde::{Deserialize, Serialize};

use crate::chance::Coins;
use crate::error::{Error, Result};

/// `max(0, n - t - sigma)`
pub fn pa_output_length(n: usize, leak_bound: usize, sigma: usize) -> usize {
    n.saturating_sub(leak_bound).saturating_sub(sigma)
}

/// An `l x n` binary matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HexRows", into = "HexRows")]
pub struct HashSpec {
    n: usize,
    rows: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct HexRows {
    n: usize,
    l: usize,
    rows: Vec<String>,
}

impl From<HashSpec> for HexRows {
    fn from(spec: HashSpec) -> Self {
        HexRows {
            n: spec.n,
            l: spec.rows.len(),
            rows: spec.hex_rows(),
        }
    }
}

impl TryFrom<HexRows> for HashSpec {
    type Error = Error;

    fn try_from(wire: HexRows) -> Result<Self> {
        if wire.rows.len() != wire.l {
            return Err(Error::DimensionError {
                expected: wire.l,
                actual: wire.rows.len(),
            });
        }
        HashSpec::from_hex_rows(wire.n, &wire.rows)
    }
}

impl HashSpec {
    pub fn new(n: usize, rows: Vec<Vec<bool>>) -> Result<Self> {
        if rows.len() > n {
            return Err(Error::invalid("hash", format!("{} rows exceed input length {n}", rows.len())));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionError {
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        Ok(HashSpec { n, rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        HashSpec { n, rows }
    }

    /// Keeps the first `l` of `n` bits.
    pub fn leading(n: usize, l: usize) -> Result<Self> {
        HashSpec::new(n, HashSpec::identity(n).rows[..l.min(n)].to_vec())
    }

    /// Any `l x n` matrix, every entry a fair coin.
    pub fn random(n: usize, l: usize, coins: &mut dyn Coins) -> Result<Self> {
        let rows = (0..l).map(|_| (0..n).map(|_| coins.bit()).collect()).collect();
        HashSpec::new(n, rows)
    }

    /// A uniformly random matrix of full row rank.
    ///
    /// Row `i` is drawn uniformly outside the span of rows `0..i` by picking
    /// its nonzero residue on the non-pivot columns and its component inside
    /// the span separately, so no draw is ever rejected.
    pub fn random_full_rank(n: usize, l: usize, coins: &mut dyn Coins) -> Result<Self> {
        if l > n {
            return Err(Error::invalid("hash", format!("output length {l} exceeds input length {n}")));
        }
        let mut basis = Echelon::new(n);
        let mut rows = Vec::with_capacity(l);
        for _ in 0..l {
            let free: Vec<usize> = (0..n).filter(|c| !basis.pivots.contains(c)).collect();
            let residue = nonzero_vector(free.len(), coins);
            let mut row = vec![false; n];
            for (k, &c) in free.iter().enumerate() {
                row[c] = residue[k];
            }
            // `row` is already reduced; add a uniform element of the span.
            for b in &basis.rows {
                if coins.bit() {
                    xor_into(&mut row, b);
                }
            }
            basis.insert(row.clone());
            rows.push(row);
        }
        Ok(HashSpec { n, rows })
    }

    pub fn input_len(&self) -> usize {
        self.n
    }

    pub fn output_len(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.n);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.rows.len()
    }

    /// Each row as hex, first column in the most significant bit, padded on
    /// the right to a whole digit.
    pub fn hex_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|row| {
                row.chunks(4)
                    .map(|nib| {
                        let v = nib.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | ((b as u32) << (3 - i)));
                        char::from_digit(v, 16).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_hex_rows(n: usize, rows: &[String]) -> Result<Self> {
        let digits = n.div_ceil(4);
        let mut parsed = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != digits {
                return Err(Error::DimensionError {
                    expected: digits,
                    actual: r.len(),
                });
            }
            let mut bits = Vec::with_capacity(digits * 4);
            for ch in r.chars() {
                let v = ch
                    .to_digit(16)
                    .ok_or_else(|| Error::invalid("hash", format!("bad hex digit {ch:?}")))?;
                bits.extend((0..4).map(|i| v >> (3 - i) & 1 == 1));
            }
            if bits[n..].iter().any(|&b| b) {
                return Err(Error::invalid("hash", "padding bits must be zero"));
            }
            bits.truncate(n);
            parsed.push(bits);
        }
        HashSpec::new(n, parsed)
    }
}

fn xor_into(acc: &mut [bool], other: &[bool]) {
    for (a, &b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

fn nonzero_vector(len: usize, coins: &mut dyn Coins) -> Vec<bool> {
    assert!(len > 0);
    if len <= 63 {
        let v = coins.below((1u64 << len) - 1) + 1;
        (0..len).map(|i| v >> i & 1 == 1).collect()
    } else {
        loop {
            let v: Vec<bool> = (0..len).map(|_| coins.bit()).collect();
            if v.iter().any(|&b| b) {
                return v;
            }
        }
    }
}

/// Reduced row echelon basis.
struct Echelon {
    rows: Vec<Vec<bool>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(_n: usize) -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce(&self, v: &mut [bool]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p] {
                xor_into(v, row);
            }
        }
    }

    fn insert(&mut self, mut v: Vec<bool>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|&b| b) else {
            return false;
        };
        for row in &mut self.rows {
            if row[p] {
                xor_into(row, &v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

/// `spec.matrix * bits` over GF(2).
pub fn pa_apply(bits: &[bool], spec: &HashSpec) -> Result<Vec<bool>> {
    if bits.len() != spec.n {
        return Err(Error::DimensionError {
            expected: spec.n,
            actual: bits.len(),
        });
    }
    Ok(spec
        .rows
        .iter()
        .map(|row| row.iter().zip(bits).fold(false, |acc, (&m, &x)| acc ^ (m & x)))
        .collect())
}

/// Worst case, over every set of at most `t` positions Eve might know, of
/// the statistical distance of the hash output from uniform given her view,
/// averaged over her observed values and over all `2^(l*n)` matrices.
pub fn exhaustive_uniformity_gap(n: usize, l: usize, t: usize) -> f64 {
    assert!(l * n <= 20, "exhaustive over 2^(l*n) matrices");
    let matrices: Vec<HashSpec> = (0u64..1 << (l * n))
        .map(|code| {
            let rows = (0..l).map(|i| (0..n).map(|j| code >> (i * n + j) & 1 == 1).collect()).collect();
            HashSpec { n, rows }
        })
        .collect();
    let mut worst: f64 = 0.0;
    for known in 0u32..1 << n {
        if known.count_ones() as usize > t {
            continue;
        }
        let mut total = 0.0;
        for spec in &matrices {
            for seen in 0u32..1 << n {
                if seen & !known != 0 {
                    continue;
                }
                // distribution of the output over inputs agreeing with `seen`
                let mut counts = vec![0u32; 1 << l];
                let mut members = 0u32;
                for x in 0u32..1 << n {
                    if x & known != seen {
                        continue;
                    }
                    let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
                    let out = pa_apply(&bits, spec).unwrap();
                    let idx = out.iter().enumerate().fold(0usize, |a, (i, &b)| a | (b as usize) << i);
                    counts[idx] += 1;
                    members += 1;
                }
                let uniform = 1.0 / (1u32 << l) as f64;
                let dist: f64 = counts.iter().map(|&c| (c as f64 / members as f64 - uniform).abs()).sum::<f64>() / 2.0;
                total += dist;
            }
        }
        let views = (1u64 << known.count_ones()) as f64;
        worst = worst.max(total / (matrices.len() as f64 * views));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chance::{for_each_path, Prob, SeededCoins};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn output_length_policy() {
        assert_eq!(pa_output_length(8, 2, 2), 4);
        assert_eq!(pa_output_length(5, 5, 1), 0);
        assert_eq!(pa_output_length(9, 0, 0), 9);
    }

    #[test]
    fn identity_and_parity() {
        assert_eq!(pa_apply(&bits("101"), &HashSpec::identity(3)).unwrap(), bits("101"));
        let parity = HashSpec::new(3, vec![bits("111")]).unwrap();
        assert_eq!(pa_apply(&bits("101"), &parity).unwrap(), bits("0"));
        assert_eq!(
            pa_apply(&bits("10"), &parity),
            Err(Error::DimensionError { expected: 3, actual: 2 })
        );
    }

    #[test]
    fn seeded_matrix_against_bitwise_oracle() {
        let spec = HashSpec::random(4, 2, &mut SeededCoins::new(2024)).unwrap();
        let x = bits("1011");
        // Oracle: pack the rows into integers and take popcount parity.
        let expect: Vec<bool> = spec
            .rows()
            .iter()
            .map(|r| {
                let row = r.iter().enumerate().fold(0u8, |a, (i, &b)| a | (b as u8) << i);
                (row & 0b1101).count_ones() % 2 == 1
            })
            .collect();
        assert_eq!(pa_apply(&x, &spec).unwrap(), expect);
    }

    #[test]
    fn full_rank_sampler_is_uniform_over_full_rank_matrices() {
        // 2 x 3: (8 - 1) * (8 - 2) = 42 full-rank matrices, each 1/42.
        let mut dist = BTreeMap::new();
        for_each_path(
            |c| HashSpec::random_full_rank(3, 2, c).unwrap().hex_rows(),
            |p, rows| *dist.entry(rows).or_insert(Prob::from_integer(0)) += p,
        );
        assert_eq!(dist.len(), 42);
        assert!(dist.values().all(|&p| p == Prob::new(1, 42)));
        for rows in dist.keys() {
            assert_eq!(HashSpec::from_hex_rows(3, rows).unwrap().rank(), 2);
        }
    }

    #[test]
    fn large_full_rank_draw() {
        let spec = HashSpec::random_full_rank(200, 150, &mut SeededCoins::new(9)).unwrap();
        assert_eq!(spec.rank(), 150);
    }

    #[test]
    fn hex_round_trip_and_json() {
        let spec = HashSpec::random(6, 3, &mut SeededCoins::new(1)).unwrap();
        let back = HashSpec::from_hex_rows(6, &spec.hex_rows()).unwrap();
        assert_eq!(back, spec);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"rows\":[\""));
        assert_eq!(serde_json::from_str::<HashSpec>(&json).unwrap(), spec);
        assert_eq!(HashSpec::identity(5).hex_rows()[0], "80");
        assert!(HashSpec::from_hex_rows(5, &["81".to_string()]).is_err());
    }

    #[test]
    fn uniformity_bound_at_desk_scale() {
        let (n, l, t) = (4, 2, 2);
        let gap = exhaustive_uniformity_gap(n, l, t);
        let bound = 2f64.powf(-((n - t - l) as f64) / 2.0);
        assert!(gap <= bound, "{gap} > {bound}");
        // and with less leakage the gap shrinks under a tighter bound
        let gap1 = exhaustive_uniformity_gap(4, 2, 1);
        assert!(gap1 <= 2f64.powf(-0.5));
        assert!(gap1 <= gap);
    }

    proptest! {
        #[test]
        fn linear_over_gf2(seed in any::<u64>(), n in 1usize..24, a in any::<u32>(), b in any::<u32>()) {
            let mut coins = SeededCoins::new(seed);
            let l = coins.below(n as u64 + 1) as usize;
            let spec = HashSpec::random(n, l, &mut coins).unwrap();
            let av: Vec<bool> = (0..n).map(|i| a >> i & 1 == 1).collect();
            let bv: Vec<bool> = (0..n).map(|i| b >> i & 1 == 1).collect();
            let sum: Vec<bool> = av.iter().zip(&bv).map(|(x, y)| x ^ y).collect();
            let lhs = pa_apply(&sum, &spec).unwrap();
            let rhs: Vec<bool> = pa_apply(&av, &spec).unwrap().iter()
                .zip(pa_apply(&bv, &spec).unwrap()).map(|(x, y)| x ^ y).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
