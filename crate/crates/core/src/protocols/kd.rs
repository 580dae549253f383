//! Key distribution over combination lockboxes and over lockbox pairs.

use serde_json::json;

use crate::chance::subset;
use crate::engine::{AbortReason, Session, Verdict};
use crate::error::Result;
use crate::lockbox::{Combination, OpenOutcome};
use crate::pa::{pa_apply, pa_output_length, HashSpec};
use crate::world::{ObjectId, Party, Serial};

fn abort(s: &mut Session, reason: AbortReason) -> Result<Verdict> {
    s.stats.detected = true;
    s.message(Party::Bob, Party::Alice, "abort", json!(reason));
    Ok(Verdict::Abort(reason))
}

fn serial_list(ids: &[ObjectId]) -> Vec<u64> {
    ids.iter().map(|id| id.serial.0).collect()
}

/// Public test of `m` random positions, then hashing of the rest.
fn test_and_amplify(
    s: &mut Session,
    serials: &[Serial],
    alice: &[bool],
    bob: &[bool],
    m: usize,
    sigma: usize,
    random_hash: bool,
) -> Result<Verdict> {
    let n = alice.len();
    let tested = subset(s.coins, n, m);
    s.message(Party::Alice, Party::Bob, "test_positions", json!(tested));
    let bob_tested: Vec<bool> = tested.iter().map(|&i| bob[i]).collect();
    s.message(Party::Bob, Party::Alice, "test_bits", json!(bob_tested));
    s.stats.tests = m;
    s.stats.tests_failed = tested.iter().filter(|&&i| alice[i] != bob[i]).count();
    if s.stats.tests_failed > 0 {
        return abort(s, AbortReason::TestFailed);
    }
    let rest: Vec<usize> = (0..n).filter(|i| !tested.contains(i)).collect();
    // Any mismatch aborts, so an accepted run saw no disturbance at all.
    let leak_bound = 0;
    let len = pa_output_length(rest.len(), leak_bound, sigma);
    let hash = if random_hash {
        HashSpec::random_full_rank(rest.len(), len, s.coins)?
    } else {
        HashSpec::leading(rest.len(), len)?
    };
    s.message(Party::Alice, Party::Bob, "hash", json!(hash));
    let pick = |bits: &[bool]| rest.iter().map(|&i| bits[i]).collect::<Vec<bool>>();
    let alice_key = pa_apply(&pick(alice), &hash)?;
    let bob_key = pa_apply(&pick(bob), &hash)?;
    let raw: Vec<(Serial, bool)> = rest.iter().map(|&i| (serials[i], alice[i])).collect();
    s.assess_key(&raw, &hash);
    Ok(Verdict::KeyAgreed {
        alice: alice_key,
        bob: bob_key,
        leak_bound,
    })
}

pub(super) fn kd_combination(
    s: &mut Session,
    n: usize,
    m: usize,
    c: u32,
    sigma: usize,
    random_hash: bool,
) -> Result<Verdict> {
    let minted = s.world.mint_serials(2 * n, 0)?;
    let (serials, spare) = minted.split_at(n);
    s.give_eve(spare.to_vec());
    let bits: Vec<bool> = (0..n).map(|_| s.coins.bit()).collect();
    let mut combos = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let combo = Combination::random(s.coins, c)?;
        ids.push(s.world.create_lockbox(Party::Alice, bits[i], combo, serials[i])?);
        combos.push(combo);
    }
    let received = s.send(Party::Alice, Party::Bob, &ids)?;
    s.message(Party::Bob, Party::Alice, "received", json!(serial_list(&received)));
    if received.len() < n {
        return abort(s, AbortReason::MissingObjects);
    }
    let announced: Vec<(u64, String)> = serials.iter().zip(&combos).map(|(s, c)| (s.0, c.to_string())).collect();
    s.message(Party::Alice, Party::Bob, "combinations", json!(announced));
    let mut bob = vec![false; n];
    let mut seen = vec![false; n];
    for id in received {
        let Some(i) = serials.iter().position(|&x| x == id.serial) else {
            return abort(s, AbortReason::SerialMismatch);
        };
        seen[i] = true;
        match s.world.open_lockbox(Party::Bob, id, combos[i], s.coins)? {
            OpenOutcome::DestroyedMarker => return abort(s, AbortReason::TamperDetected),
            outcome => bob[i] = outcome.bit().expect("non-marker outcomes carry a bit"),
        }
    }
    if seen.contains(&false) {
        return abort(s, AbortReason::SerialMismatch);
    }
    test_and_amplify(s, serials, &bits, &bob, m, sigma, random_hash)
}

/// Checks that `got` carries exactly the announced serials.
fn check_serials(s: &mut Session, got: &[ObjectId], serials: &[Serial]) -> Option<AbortReason> {
    s.message(Party::Bob, Party::Alice, "received", json!(serial_list(got)));
    if got.len() < serials.len() {
        return Some(AbortReason::MissingObjects);
    }
    let mut listed: Vec<u64> = serial_list(got);
    listed.sort_unstable();
    let expected: Vec<u64> = serials.iter().map(|s| s.0).collect();
    (listed != expected).then_some(AbortReason::SerialMismatch)
}

pub(super) fn kd_lbp(
    s: &mut Session,
    n: usize,
    m: usize,
    sigma: usize,
    random_hash: bool,
    read_once: bool,
) -> Result<Verdict> {
    let minted = s.world.mint_serials(2 * n, 0)?;
    let (serials, spare) = minted.split_at(n);
    s.give_eve(spare.to_vec());
    let bits: Vec<bool> = (0..n).map(|_| s.coins.bit()).collect();
    for i in 0..n {
        s.world.create_pair(Party::Alice, serials[i], false, read_once)?;
        s.world.lbp_prepare(Party::Alice, serials[i], bits[i])?;
    }
    s.message(Party::Alice, Party::Bob, "serials", json!(serials.iter().map(|x| x.0).collect::<Vec<_>>()));
    let first: Vec<ObjectId> = serials.iter().map(|&x| ObjectId::half(x, 0)).collect();
    let got = s.send(Party::Alice, Party::Bob, &first)?;
    if let Some(reason) = check_serials(s, &got, serials) {
        return abort(s, reason);
    }
    // Only now does the second half leave Alice's lab.
    s.message(Party::Bob, Party::Alice, "ack", json!(null));
    let second: Vec<ObjectId> = serials.iter().map(|&x| ObjectId::half(x, 1)).collect();
    let got = s.send(Party::Alice, Party::Bob, &second)?;
    if let Some(reason) = check_serials(s, &got, serials) {
        return abort(s, reason);
    }
    let mut bob = Vec::with_capacity(n);
    for &x in serials {
        match s.world.lbp_value(Party::Bob, x)? {
            0 => {
                s.stats.nulls += 1;
                return abort(s, AbortReason::TamperDetected);
            }
            v => bob.push(v == 2),
        }
    }
    test_and_amplify(s, serials, &bits, &bob, m, sigma, random_hash)
}
