//! Bit commitment with lockboxes, and why lockbox pairs rule it out.

use serde::Serialize;
use serde_json::json;

use crate::chance::{for_each_path, subset, Prob};
use crate::engine::{AbortReason, Action, EveRole, Session, Verdict};
use crate::error::{Error, Result};
use crate::lockbox::{Combination, DualLockbox, OpenOutcome};
use crate::world::{Location, LocationGraph, ObjectId, Party, WorldState};

fn commit_bit(s: &mut Session, bit: Option<bool>) -> bool {
    bit.unwrap_or_else(|| s.coins.bit())
}

fn bad_choice(a: Action) -> Error {
    Error::RuleViolation {
        party: Party::Alice,
        detail: format!("{} is not a way to open a commitment", a.name()),
    }
}

/// A combination different from `avoid`, for a committer who lies.
fn fabricate(avoid: &[Combination], len: u32) -> Result<Combination> {
    let space = Combination::space(len)?;
    (0..space)
        .map(|v| Combination::new(v, len))
        .find(|c| c.as_ref().is_ok_and(|c| !avoid.contains(c)))
        .unwrap_or_else(|| Err(Error::invalid("combination_bits", "no room to fabricate a combination")))
}

/// Bob re-presents the announced combination `reads` times; every answer
/// must match the claim. A truthful opening always does.
fn bob_verifies(s: &mut Session, id: ObjectId, combo: Combination, claim: bool, reads: u32) -> Result<bool> {
    let mut ok = true;
    for _ in 0..reads {
        match s.world.open_lockbox(Party::Bob, id, combo, s.coins)? {
            OpenOutcome::DestroyedMarker => ok = false,
            o => ok &= o.bit() == Some(claim),
        }
    }
    Ok(ok)
}

pub(super) fn bc_single(s: &mut Session, bit: Option<bool>, c: u32, reads: u32, claim_flipped: bool) -> Result<Verdict> {
    s.role = EveRole::Committer;
    let serial = s.world.mint_serials(1, 0)?[0];
    let b = commit_bit(s, bit);
    let combo = Combination::random(s.coins, c)?;
    let id = s.world.create_lockbox(Party::Alice, b, combo, serial)?;
    s.stats.committed = Some(b);
    s.send(Party::Alice, Party::Bob, &[id])?;
    s.message(Party::Alice, Party::Bob, "committed", json!(serial.0));
    let claim = b ^ claim_flipped;
    let shown = match s.committer_choice(id)? {
        Action::Pass => combo,
        Action::Substitute => fabricate(&[combo], c)?,
        other => return Err(bad_choice(other)),
    };
    s.message(Party::Alice, Party::Bob, "open", json!({ "bit": claim, "combination": shown.to_string() }));
    let accepted = bob_verifies(s, id, shown, claim, reads)?;
    s.stats.detected = !accepted;
    Ok(Verdict::CommitmentOpened { bit: claim, accepted })
}

pub(super) fn bc_dual(s: &mut Session, bit: Option<bool>, c: u32, claim_flipped: bool) -> Result<Verdict> {
    s.role = EveRole::Committer;
    let serial = s.world.mint_serials(1, 0)?[0];
    let b = commit_bit(s, bit);
    let dual = DualLockbox::random(b, c, serial, s.coins)?;
    let (combo, anti) = dual.combinations();
    let id = s.world.create_dual_lockbox(Party::Alice, dual)?;
    s.stats.committed = Some(b);
    s.send(Party::Alice, Party::Bob, &[id])?;
    s.message(Party::Alice, Party::Bob, "committed", json!(serial.0));
    let claim = b ^ claim_flipped;
    let shown = match s.committer_choice(id)? {
        Action::Pass => combo,
        // the second combination opens to the complement
        Action::Flip => anti,
        Action::Substitute => fabricate(&[combo, anti], c)?,
        other => return Err(bad_choice(other)),
    };
    s.message(Party::Alice, Party::Bob, "open", json!({ "bit": claim, "combination": shown.to_string() }));
    let accepted = bob_verifies(s, id, shown, claim, 1)?;
    s.stats.detected = !accepted;
    Ok(Verdict::CommitmentOpened { bit: claim, accepted })
}

/// Each box holds 0. Under commitment `v = 0` the numerically lower
/// combination opens it directly; under `v = 1` the higher one does.
pub(super) fn bc_harrow(s: &mut Session, k: usize, bit: Option<bool>, c: u32, claim_flipped: bool) -> Result<Verdict> {
    s.role = EveRole::Committer;
    let serials = s.world.mint_serials(k, 0)?;
    let v = commit_bit(s, bit);
    let space = Combination::space(c)? as usize;
    let mut pairs = Vec::with_capacity(k);
    let mut ids = Vec::with_capacity(k);
    for &serial in &serials {
        let pick = subset(s.coins, space, 2);
        let lo = Combination::new(pick[0] as u64, c)?;
        let hi = Combination::new(pick[1] as u64, c)?;
        let (direct, complement) = if v { (hi, lo) } else { (lo, hi) };
        ids.push(s.world.create_dual_lockbox(Party::Alice, DualLockbox::new(false, direct, complement, serial)?)?);
        pairs.push((lo, hi));
    }
    s.stats.committed = Some(v);
    s.send(Party::Alice, Party::Bob, &ids)?;
    s.message(Party::Alice, Party::Bob, "committed", json!(serials.iter().map(|x| x.0).collect::<Vec<_>>()));
    let claim = v ^ claim_flipped;
    let mut shown = Vec::with_capacity(k);
    for (&id, &(lo, hi)) in ids.iter().zip(&pairs) {
        shown.push(match s.committer_choice(id)? {
            Action::Pass => (lo, hi),
            Action::Substitute => {
                let a = fabricate(&[lo, hi], c)?;
                let b = fabricate(&[lo, hi, a], c)?;
                (a.min(b), a.max(b))
            }
            other => return Err(bad_choice(other)),
        });
    }
    let listed: Vec<(String, String)> = shown.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    s.message(Party::Alice, Party::Bob, "open", json!({ "bit": claim, "pairs": listed }));
    let mut accepted = true;
    for (&id, &(lo, hi)) in ids.iter().zip(&shown) {
        let higher = s.coins.bit();
        let expected = higher != claim;
        let combo = if higher { hi } else { lo };
        match s.world.open_lockbox(Party::Bob, id, combo, s.coins)? {
            OpenOutcome::DestroyedMarker => accepted = false,
            o => accepted &= o.bit() == Some(expected),
        }
    }
    if !accepted {
        s.stats.detected = true;
        s.message(Party::Bob, Party::Alice, "reject", json!(null));
        return Ok(Verdict::Abort(AbortReason::OpenRejected));
    }
    Ok(Verdict::CommitmentOpened { bit: claim, accepted })
}

/// Probability that Bob, holding a single committed lockbox with `c`-bit
/// combination, names the bit before the opening, maximised over his guesses.
/// Exact; equals `1/2 + 2^-(c+1)`.
pub fn bc_single_concealment(c: u32) -> Result<Prob> {
    let space = Combination::space(c)?;
    let mut best = Prob::from_integer(0);
    for guess in 0..space {
        let guess = Combination::new(guess, c)?;
        let mut win = Prob::from_integer(0);
        let mut failure = None;
        for_each_path(
            |coins| -> Result<bool> {
                let b = coins.bit();
                let combo = Combination::random(coins, c)?;
                // Alice hands the box over in Bob's lab.
                let mut w = WorldState::new(LocationGraph::line(3), Location(2), Location(2), Location(1))?;
                let serial = w.mint_serials(1, 0)?[0];
                let id = w.create_lockbox(Party::Alice, b, combo, serial)?;
                w.transfer_custody(Party::Alice, id, Party::Bob)?;
                let seen = w.open_lockbox(Party::Bob, id, guess, coins)?;
                Ok(seen.bit() == Some(b))
            },
            |p, r| match r {
                Ok(true) => win += p,
                Ok(false) => {}
                Err(e) => failure = Some(e),
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        best = best.max(win);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitVerdict {
    /// Bob holds every box and reads the commitment.
    ConcealmentBroken,
    /// Alice holds a box and flips the commitment unseen.
    BindingBroken,
}

#[derive(Debug, Clone, Serialize)]
pub struct NogoReport {
    pub pairs: usize,
    /// Indexed by split; bit `2i + h` set means half `h` of pair `i` is Bob's.
    pub splits: Vec<SplitVerdict>,
}

impl NogoReport {
    pub fn all_broken(&self) -> bool {
        self.splits.len() == 1 << (2 * self.pairs)
    }

    pub(super) fn verdict(&self) -> Verdict {
        Verdict::Analysis {
            claim: "every possession split breaks concealment or binding".into(),
            holds: self.all_broken(),
            checked: self.splits.len() as u64,
        }
    }
}

/// Commits to the parity of `n` lockbox pairs and examines every way the
/// `2n` boxes can be split between Alice's and Bob's labs during the
/// commitment. Each split is played out on a world: if Bob holds all boxes
/// he reads every pair; otherwise Alice flips a pair through a box she
/// holds and Bob's own readouts cannot tell.
pub fn bc_lbp_nogo(n: usize) -> Result<NogoReport> {
    let mut splits = Vec::with_capacity(1 << (2 * n));
    for split in 0u32..1 << (2 * n) {
        let verdict = nogo_split(n, split, 0)?.ok_or_else(|| Error::invalid("split", format!("{split} survived")))?;
        // both committed values must behave the same way
        if nogo_split(n, split, 1)? != Some(verdict) {
            return Err(Error::invalid("split", format!("{split} depends on the bit")));
        }
        splits.push(verdict);
    }
    Ok(NogoReport { pairs: n, splits })
}

fn nogo_split(n: usize, split: u32, commitment: u32) -> Result<Option<SplitVerdict>> {
    let (alice_lab, bob_lab) = (Location(0), Location(2));
    let mut w = WorldState::new(LocationGraph::line(3), alice_lab, bob_lab, Location(1))?;
    let serials = w.mint_serials(n, 0)?;
    for (i, &x) in serials.iter().enumerate() {
        // parity of the pair bits is the committed value
        let b = i == 0 && commitment == 1;
        w.create_pair(Party::Alice, x, b, false)?;
        for h in 0..2u8 {
            if split >> (2 * i + h as usize) & 1 == 1 {
                let id = ObjectId::half(x, h);
                w.teleport(id, bob_lab, Party::Bob)?;
            }
        }
    }
    let parity = |w: &WorldState| -> Result<bool> {
        serials.iter().try_fold(false, |acc, &x| Ok(acc ^ w.pair_state(x)?.b))
    };
    let committed = parity(&w)?;
    if w.held_by(Party::Alice).is_empty() {
        let mut read = false;
        for &x in &serials {
            match w.lbp_value(Party::Bob, x)? {
                0 => return Ok(None),
                v => read ^= v == 2,
            }
        }
        return Ok((read == committed).then_some(SplitVerdict::ConcealmentBroken));
    }
    let bob_view = |w: &WorldState| -> Vec<u64> {
        w.held_by(Party::Bob)
            .iter()
            .map(|&id| w.lbp_serial(Party::Bob, id).unwrap_or(0))
            .collect()
    };
    let before = bob_view(&w);
    let box_at_alice = w.held_by(Party::Alice)[0];
    w.lbp_flip(Party::Alice, box_at_alice)?;
    let flipped = parity(&w)? != committed;
    let unseen = bob_view(&w) == before;
    Ok((flipped && unseen).then_some(SplitVerdict::BindingBroken))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concealment_matches_closed_form() {
        for c in 1..=3 {
            let expect = Prob::new(1, 2) + Prob::new(1, 1 << (c + 1));
            assert_eq!(bc_single_concealment(c).unwrap(), expect);
        }
    }

    #[test]
    fn nogo_named_splits() {
        let r = bc_lbp_nogo(1).unwrap();
        // both halves with Bob
        assert_eq!(r.splits[0b11], SplitVerdict::ConcealmentBroken);
        // one each
        assert_eq!(r.splits[0b10], SplitVerdict::BindingBroken);
        assert_eq!(r.splits[0b00], SplitVerdict::BindingBroken);
    }

    #[test]
    fn nogo_all_splits_to_four_pairs() {
        for n in 1..=4 {
            let r = bc_lbp_nogo(n).unwrap();
            assert!(r.all_broken());
            let concealment = r.splits.iter().filter(|&&v| v == SplitVerdict::ConcealmentBroken).count();
            assert_eq!(concealment, 1, "only the all-Bob split conceals nothing");
        }
        assert_eq!(bc_lbp_nogo(3).unwrap().splits.len(), 64);
    }
}
