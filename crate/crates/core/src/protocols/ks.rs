//! Key storage: keeping a key in lab objects while Eve visits the lab.

use serde_json::json;

use crate::chance::subset;
use crate::engine::{AbortReason, Session, Verdict};
use crate::error::Result;
use crate::pa::{pa_apply, pa_output_length, HashSpec};
use crate::rcp::RcpReading;
use crate::stats::hypergeometric_upper_bound;
use crate::world::{ObjectId, Party, Serial};

/// Pairs on Alice's shelf, one stored key bit each.
struct Shelf {
    slots: Vec<Serial>,
    stored: Vec<bool>,
}

fn stock_shelf(s: &mut Session, n: usize, read_once: bool) -> Result<Shelf> {
    let minted = s.world.mint_serials((2 * n).max(1), 0)?;
    let (mine, spare) = minted.split_at(n);
    s.give_eve(spare.to_vec());
    let stored: Vec<bool> = (0..n).map(|_| s.coins.bit()).collect();
    for (&x, &b) in mine.iter().zip(&stored) {
        s.world.create_pair(Party::Alice, x, false, read_once)?;
        s.world.lbp_prepare(Party::Alice, x, b)?;
    }
    Ok(Shelf {
        slots: mine.to_vec(),
        stored,
    })
}

/// Lets Eve into Alice's lab and puts whatever she left in each slot.
fn open_lab(s: &mut Session, shelf: &mut Shelf) -> Result<()> {
    let units: Vec<ObjectId> = shelf.slots.iter().map(|&x| ObjectId::half(x, 0)).collect();
    for (old, new) in s.intrude(Party::Alice, &units)? {
        if let Some(slot) = shelf.slots.iter_mut().find(|x| **x == old.serial) {
            *slot = new.serial;
        }
    }
    Ok(())
}

fn read_slot(s: &mut Session, x: Serial) -> Result<Option<bool>> {
    Ok(match s.world.lbp_value(Party::Alice, x)? {
        0 => None,
        v => Some(v == 2),
    })
}

fn stored_key(s: &mut Session, shelf: &Shelf, key: Vec<bool>) -> Verdict {
    let raw: Vec<(Serial, bool)> = shelf.slots.iter().copied().zip(key.iter().copied()).collect();
    s.assess_key(&raw, &HashSpec::identity(raw.len()));
    Verdict::StorageVerified {
        key,
        partner: shelf.stored.clone(),
    }
}

/// Plain pairs: Alice stores, Eve visits, Alice reads back.
pub(super) fn ks_lbp_plain(s: &mut Session, n: usize) -> Result<Verdict> {
    let mut shelf = stock_shelf(s, n, false)?;
    open_lab(s, &mut shelf)?;
    let mut key = Vec::with_capacity(n);
    for i in 0..n {
        match read_slot(s, shelf.slots[i])? {
            Some(b) => key.push(b),
            None => {
                s.stats.nulls += 1;
                s.stats.detected = true;
                return Ok(Verdict::Abort(AbortReason::TamperDetected));
            }
        }
    }
    Ok(stored_key(s, &shelf, key))
}

/// Read-once pairs where Alice privately remembers the serials in `w`
/// uniformly chosen slots.
pub(super) fn ks_readonce(
    s: &mut Session,
    n: usize,
    w: usize,
    sigma: usize,
    confidence: f64,
    random_hash: bool,
) -> Result<Verdict> {
    let mut shelf = stock_shelf(s, n, true)?;
    let marked = subset(s.coins, n, w);
    let remembered: Vec<Serial> = marked.iter().map(|&i| shelf.slots[i]).collect();
    open_lab(s, &mut shelf)?;
    let mut compromised = 0;
    for (&i, &x) in marked.iter().zip(&remembered) {
        let intact = shelf.slots[i] == x && read_slot(s, x)?.is_some();
        if !intact {
            compromised += 1;
        }
    }
    s.stats.tests = w;
    s.stats.tests_failed = compromised;
    s.stats.detected = compromised > 0;
    if w > 0 && compromised == w {
        return Ok(Verdict::Abort(AbortReason::AllMarkedConsumed));
    }
    let mut raw = Vec::new();
    let mut reference = Vec::new();
    for i in (0..n).filter(|i| !marked.contains(i)) {
        match read_slot(s, shelf.slots[i])? {
            Some(b) => {
                raw.push((shelf.slots[i], b));
                reference.push(shelf.stored[i]);
            }
            None => {
                s.stats.nulls += 1;
                s.stats.discarded += 1;
            }
        }
    }
    // A clean sample bounds nothing away from zero; with damage seen, take
    // the one-sided hypergeometric limit on how many unmarked pairs Eve
    // could have reached.
    let leak = if compromised == 0 {
        0
    } else {
        let total = hypergeometric_upper_bound(n as u64, w as u64, compromised as u64, 1.0 - confidence);
        total as usize - compromised
    };
    let len = pa_output_length(raw.len(), leak, sigma);
    let hash = if random_hash {
        HashSpec::random_full_rank(raw.len(), len, s.coins)?
    } else {
        HashSpec::leading(raw.len(), len)?
    };
    let bits: Vec<bool> = raw.iter().map(|&(_, b)| b).collect();
    let key = pa_apply(&bits, &hash)?;
    let partner = pa_apply(&reference, &hash)?;
    s.assess_key(&raw, &hash);
    s.note(
        "alice",
        "estimate",
        json!({ "marked_compromised": compromised, "leak_bound": leak, "key_length": len }),
    );
    Ok(Verdict::StorageVerified { key, partner })
}

/// Read-once pairs where Alice keeps the full, tamper-proof serial list.
pub(super) fn ks_serial_list(s: &mut Session, n: usize) -> Result<Verdict> {
    let mut shelf = stock_shelf(s, n, true)?;
    let list = shelf.slots.clone();
    open_lab(s, &mut shelf)?;
    let mut key = Vec::with_capacity(n);
    for (&now, &then) in shelf.slots.iter().zip(&list) {
        let read = if now == then {
            read_slot(s, then)?
        } else {
            None
        };
        match read {
            Some(b) => key.push(b),
            None => {
                s.stats.detected = true;
                return Ok(Verdict::Abort(AbortReason::TamperDetected));
            }
        }
    }
    Ok(stored_key(s, &shelf, key))
}

/// RCPs with member 0 in Alice's lab and member 1 in Bob's. Pairs that come
/// back null or with the wrong serial on either side are announced and
/// dropped; more than `threshold` of them aborts.
pub(super) fn ks_rcp(s: &mut Session, n: usize, threshold: usize) -> Result<Verdict> {
    let minted = s.world.mint_serials((2 * n).max(1), 0)?;
    let (mine, spare) = minted.split_at(n);
    s.give_eve(spare.to_vec());
    let bob_lab = s.home(Party::Bob);
    for &x in mine {
        s.world.create_rcp(Party::Alice, x)?;
        // the twins were made apart
        s.world.teleport(ObjectId::half(x, 1), bob_lab, Party::Bob)?;
    }
    let mut alice_slots: Vec<ObjectId> = mine.iter().map(|&x| ObjectId::half(x, 0)).collect();
    let mut bob_slots: Vec<ObjectId> = mine.iter().map(|&x| ObjectId::half(x, 1)).collect();
    for (owner, slots) in [(Party::Alice, &mut alice_slots), (Party::Bob, &mut bob_slots)] {
        for (old, new) in s.intrude(owner, slots)? {
            if let Some(slot) = slots.iter_mut().find(|x| **x == old) {
                *slot = new;
            }
        }
    }
    let open_side = |s: &mut Session, party: Party, slots: &[ObjectId]| -> Result<Vec<Option<bool>>> {
        slots
            .iter()
            .zip(mine)
            .map(|(&id, &x)| {
                if id.serial != x {
                    return Ok(None);
                }
                Ok(match s.world.open_rcp(party, id, s.coins)? {
                    RcpReading::Null => {
                        s.stats.nulls += 1;
                        None
                    }
                    RcpReading::Bit(b) => Some(b),
                })
            })
            .collect()
    };
    let alice = open_side(s, Party::Alice, &alice_slots)?;
    let bob = open_side(s, Party::Bob, &bob_slots)?;
    let bad = |side: &[Option<bool>]| -> Vec<usize> { (0..n).filter(|&i| side[i].is_none()).collect() };
    s.message(Party::Alice, Party::Bob, "discard", json!(bad(&alice)));
    s.message(Party::Bob, Party::Alice, "discard", json!(bad(&bob)));
    let kept: Vec<usize> = (0..n).filter(|&i| alice[i].is_some() && bob[i].is_some()).collect();
    s.stats.discarded = n - kept.len();
    s.stats.detected = s.stats.discarded > 0;
    if s.stats.discarded > threshold {
        return Ok(Verdict::Abort(AbortReason::TamperDetected));
    }
    let key: Vec<bool> = kept.iter().map(|&i| alice[i].unwrap()).collect();
    let partner: Vec<bool> = kept.iter().map(|&i| bob[i].unwrap()).collect();
    let raw: Vec<(Serial, bool)> = kept.iter().map(|&i| (mine[i], key_bit(&alice, i))).collect();
    s.assess_key(&raw, &HashSpec::identity(raw.len()));
    Ok(Verdict::StorageVerified { key, partner })
}

fn key_bit(side: &[Option<bool>], i: usize) -> bool {
    side[i].expect("kept positions opened cleanly")
}
