//! The serial-only theory: no key distribution, no bit commitment.
//!
//! Both claims are checked by brute force over a bounded class of
//! protocols in which Alice's choices depend on one private random bit `r`.
//! In each round she sends a public message bit and some of the boxes still
//! in her lab. The parties' outputs are arbitrary functions of what they
//! know: `r` for Alice, the messages and the serials that reached him for
//! Bob.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chance::SeededCoins;
use crate::engine::{Passive, Session, Verdict};
use crate::error::{Error, Result};
use crate::world::{Location, LocationGraph, ObjectId, Party, WorldState};

/// One round: a message bit and a bitmask of boxes to send.
type Round = (bool, u32);

fn sequences(rounds: usize, boxes: usize) -> Vec<Vec<Round>> {
    let mut out = vec![(vec![], (1u32 << boxes) - 1)];
    for _ in 0..rounds {
        let mut next = Vec::new();
        for (seq, left) in out {
            for bit in [false, true] {
                // every subset of the boxes still at home
                let mut sub = left;
                loop {
                    let mut s: Vec<Round> = seq.clone();
                    s.push((bit, sub));
                    next.push((s, left & !sub));
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & left;
                }
            }
        }
        out = next;
    }
    let mut seqs: Vec<Vec<Round>> = out.into_iter().map(|(s, _)| s).collect();
    seqs.sort();
    seqs
}

/// Plays an action sequence and returns Bob's and Eve's views as strings.
fn views(seq: &[Round], boxes: usize) -> Result<(String, String)> {
    let world = WorldState::new(LocationGraph::line(3), Location(0), Location(2), Location(1))?;
    let mut coins = SeededCoins::new(0);
    let mut eve = Passive;
    let mut s = Session::new(world, &mut coins, &mut eve, true);
    let serials = s.world.mint_serials(boxes.max(1), 0)?;
    let ids: Vec<ObjectId> = serials[..boxes]
        .iter()
        .map(|&x| s.world.create_trivial(Party::Alice, x))
        .collect::<Result<_>>()?;
    let mut bob_got = Vec::new();
    for &(bit, mask) in seq {
        s.message(Party::Alice, Party::Bob, "round", serde_json::json!(bit));
        let send: Vec<ObjectId> = (0..boxes).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
        let got = s.send(Party::Alice, Party::Bob, &send)?;
        let mut round: Vec<u64> = got.iter().map(|&id| s.world.serial_of(Party::Bob, id).map(|x| x.0)).collect::<Result<_>>()?;
        round.sort_unstable();
        bob_got.push((bit, round));
    }
    // Eve's view is rebuilt from the public transcript alone.
    let mut eve_seen: Vec<(bool, Vec<u64>)> = Vec::new();
    for e in s.transcript.events() {
        match e.kind.as_str() {
            "message" => eve_seen.push((e.payload["body"].as_bool().unwrap_or(false), vec![])),
            "custody" if e.payload["to"] == "eve" => {
                let obj = e.payload["object"].as_str().unwrap_or_default();
                let serial: u64 = obj.trim_start_matches('#').split('.').next().unwrap_or("0").parse().unwrap_or(0);
                if let Some(last) = eve_seen.last_mut() {
                    last.1.push(serial);
                }
            }
            _ => {}
        }
    }
    for r in &mut eve_seen {
        r.1.sort_unstable();
    }
    Ok((format!("{bob_got:?}"), format!("{eve_seen:?}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrivialReport {
    pub rounds: usize,
    pub boxes: usize,
    pub protocols: u128,
    /// Protocols where Alice and Bob always end with the same key bit.
    pub agreeing: u128,
    /// Agreeing protocols where Eve, applying Bob's rule to what she saw in
    /// transit and on the channel, always gets Alice's key.
    pub witnessed: u128,
    pub witness: &'static str,
}

impl TrivialReport {
    pub fn impossible(&self) -> bool {
        self.agreeing == self.witnessed
    }

    pub(super) fn verdict(&self) -> Verdict {
        Verdict::Analysis {
            claim: "a passive eve learns every agreed key".into(),
            holds: self.impossible(),
            checked: self.protocols as u64,
        }
    }
}

const WITNESS: &str = "eve applies bob's key rule to the public messages and the serials she carried";

/// Enumerates every protocol of the class with `rounds` rounds and `boxes`
/// trivial boxes.
pub fn kd_trivial_impossible(rounds: usize, boxes: usize, cap: u128) -> Result<TrivialReport> {
    if rounds == 0 {
        // nothing is exchanged: the only key is the empty one
        return Ok(TrivialReport {
            rounds,
            boxes,
            protocols: 1,
            agreeing: 1,
            witnessed: 1,
            witness: WITNESS,
        });
    }
    let seqs = sequences(rounds, boxes);
    let mut bob_ids = BTreeMap::new();
    let mut seen = Vec::with_capacity(seqs.len());
    for seq in &seqs {
        let (bob, eve) = views(seq, boxes)?;
        let next = bob_ids.len();
        let id = *bob_ids.entry(bob).or_insert(next);
        seen.push((id, eve));
    }
    // the Bob view, if any, that looks exactly like what Eve saw
    let eve_as_bob: Vec<Option<usize>> = seen.iter().map(|(_, eve)| bob_ids.get(eve).copied()).collect();
    let tables = (seqs.len() as u128).pow(2);
    let bob_rules = 1u128.checked_shl(bob_ids.len() as u32).unwrap_or(u128::MAX);
    let count = tables.saturating_mul(4).saturating_mul(bob_rules);
    if count > cap {
        return Err(Error::BudgetExceeded { count, cap });
    }
    let (mut agreeing, mut witnessed) = (0u128, 0u128);
    for a0 in 0..seqs.len() {
        for a1 in 0..seqs.len() {
            let acts = [a0, a1];
            for alice_rule in 0u32..4 {
                for bob_rule in 0u128..bob_rules {
                    let alice_key = |r: usize| alice_rule >> r & 1 == 1;
                    let bob_key = |view: usize| bob_rule >> view & 1 == 1;
                    if !(0..2).all(|r| bob_key(seen[acts[r]].0) == alice_key(r)) {
                        continue;
                    }
                    agreeing += 1;
                    if (0..2).all(|r| eve_as_bob[acts[r]].is_some_and(|v| bob_key(v) == alice_key(r))) {
                        witnessed += 1;
                    }
                }
            }
        }
    }
    Ok(TrivialReport {
        rounds,
        boxes,
        protocols: count,
        agreeing,
        witnessed,
        witness: WITNESS,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrivialBcReport {
    pub tables: u64,
    /// Tables whose commit-phase view for Bob is the same in distribution
    /// for both committed values.
    pub concealing: u64,
    /// Concealing tables where Alice can later claim either value with an
    /// `r` consistent with what Bob saw.
    pub equivocable: u64,
}

/// One-round commitments with `boxes` trivial boxes: Alice's action is a
/// table from `(v, r)` to a round.
pub fn trivial_bc_equivocable(boxes: usize) -> Result<TrivialBcReport> {
    let seqs = sequences(1, boxes);
    let view: Vec<String> = seqs.iter().map(|s| views(s, boxes).map(|v| v.0)).collect::<Result<_>>()?;
    let k = seqs.len();
    let (mut tables, mut concealing, mut equivocable) = (0u64, 0u64, 0u64);
    for code in 0..k.pow(4) {
        tables += 1;
        let t = |v: usize, r: usize| view[code / k.pow((2 * v + r) as u32) % k].as_str();
        let mut zero = [t(0, 0), t(0, 1)];
        let mut one = [t(1, 0), t(1, 1)];
        zero.sort_unstable();
        one.sort_unstable();
        if zero != one {
            continue;
        }
        concealing += 1;
        let opens_other = |v: usize| (0..2).all(|r| (0..2).any(|r2| t(1 - v, r2) == t(v, r)));
        if opens_other(0) && opens_other(1) {
            equivocable += 1;
        }
    }
    Ok(TrivialBcReport {
        tables,
        concealing,
        equivocable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_round_two_boxes() {
        assert_eq!(sequences(1, 2).len(), 8);
        let r = kd_trivial_impossible(1, 2, crate::DEFAULT_CAP).unwrap();
        assert_eq!(r.protocols, 64 * 4 * 256);
        assert!(r.agreeing > 0);
        assert!(r.impossible());
    }

    #[test]
    fn empty_protocol_has_empty_key() {
        let r = kd_trivial_impossible(0, 2, crate::DEFAULT_CAP).unwrap();
        assert!(r.impossible());
    }

    #[test]
    fn longer_protocols_hit_the_cap() {
        assert!(matches!(
            kd_trivial_impossible(2, 2, crate::DEFAULT_CAP),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn pure_classical_protocol_is_known_to_eve() {
        // no boxes at all: Bob's only input is the message
        let r = kd_trivial_impossible(1, 0, crate::DEFAULT_CAP).unwrap();
        assert_eq!(r.protocols, 4 * 4 * 4);
        assert!(r.impossible());
    }

    #[test]
    fn concealing_commitments_are_equivocable() {
        let r = trivial_bc_equivocable(2).unwrap();
        assert_eq!(r.tables, 4096);
        assert!(r.concealing > 0);
        assert_eq!(r.concealing, r.equivocable);
    }
}
