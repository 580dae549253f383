//! Lockbox pairs.
//!
//! A pair stores one bit `b` under a serial `s`, split across two boxes at
//! `x1` and `x2`. Three operators act on it: the serial readout, the value
//! readout (only when the reader and both boxes share a location), and the
//! flip, which toggles `b` from either box without leaving a trace.
//!
//! [`PairState`] is the joint description; [`BoxHalf`] is the equivalent local
//! one where each box carries its own bit and `b = b1 ^ b2`.

use serde::{Deserialize, Serialize};

use crate::chance::{Coins, SeededCoins};
use crate::error::{Error, Result};
use crate::world::{Location, ObjectId, Party, Payload, Placement, Serial, WorldState};

fn delta(a: Location, b: Location) -> bool {
    a == b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairState {
    pub b: bool,
    pub s: Serial,
    pub x1: Location,
    pub x2: Location,
    pub p1: i64,
    pub p2: i64,
    pub read_once: bool,
    pub consumed: bool,
}

impl PairState {
    pub fn new(b: bool, s: Serial, x1: Location, x2: Location) -> Self {
        PairState {
            b,
            s,
            x1,
            x2,
            p1: 0,
            p2: 0,
            read_once: false,
            consumed: false,
        }
    }

    pub fn read_once(mut self) -> Self {
        self.read_once = true;
        self
    }

    fn on_support(&self, x: Location) -> bool {
        x == self.x1 || x == self.x2
    }

    /// `s * (d(x,x1) + d(x,x2) - d(x1,x2))` on the support, 0 elsewhere.
    ///
    /// The bare formula gives `-s` when both boxes share a location other
    /// than `x`; a reader holding neither box gets nothing instead.
    pub fn serial_op(&self, x: Location) -> u64 {
        if !self.on_support(x) {
            return 0;
        }
        let weight = delta(x, self.x1) as i64 + delta(x, self.x2) as i64 - delta(self.x1, self.x2) as i64;
        debug_assert_eq!(weight, 1);
        self.s.0 * weight as u64
    }

    /// `(1 + b) * d(x,x1) * d(x,x2)`; read-once pairs answer 0 after one
    /// successful read.
    pub fn value_op(&mut self, x: Location) -> u8 {
        if self.read_once && self.consumed {
            return 0;
        }
        let value = if delta(x, self.x1) && delta(x, self.x2) {
            1 + self.b as u8
        } else {
            0
        };
        if value != 0 && self.read_once {
            self.consumed = true;
        }
        value
    }

    /// `b ^= d(x,x1) ^ d(x,x2) ^ d(x1,x2)`, restricted to `x` at a box.
    pub fn flip_op(&mut self, x: Location) -> Result<()> {
        if !self.on_support(x) {
            return Err(Error::NotAtBox { at: x });
        }
        self.b ^= delta(x, self.x1) ^ delta(x, self.x2) ^ delta(self.x1, self.x2);
        Ok(())
    }

    /// Splits the pair into two boxes with `b1` uniform and `b2 = b ^ b1`.
    pub fn to_local(&self, coins: &mut dyn Coins) -> (BoxHalf, BoxHalf) {
        let b1 = coins.bit();
        (
            BoxHalf {
                bit: b1,
                s: self.s,
                x: self.x1,
                consumed: self.consumed,
            },
            BoxHalf {
                bit: self.b ^ b1,
                s: self.s,
                x: self.x2,
                consumed: self.consumed,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxHalf {
    pub bit: bool,
    pub s: Serial,
    pub x: Location,
    pub consumed: bool,
}

impl BoxHalf {
    /// `s * d(x, x_i)`
    pub fn serial_op(&self, x: Location) -> u64 {
        if delta(x, self.x) {
            self.s.0
        } else {
            0
        }
    }

    /// `b_i ^= d(x, x_i)`
    pub fn flip_op(&mut self, x: Location) {
        self.bit ^= delta(x, self.x);
    }
}

/// `[1 + (b_i ^ b_j)] * d(x,x_i) * d(x,x_j)`, with read-once bookkeeping
/// carried by both boxes.
pub fn value_op_local(a: &mut BoxHalf, b: &mut BoxHalf, x: Location, read_once: bool) -> u8 {
    if read_once && (a.consumed || b.consumed) {
        return 0;
    }
    let value = if delta(x, a.x) && delta(x, b.x) {
        1 + (a.bit ^ b.bit) as u8
    } else {
        0
    };
    if value != 0 && read_once {
        a.consumed = true;
        b.consumed = true;
    }
    value
}

/// Pair payload as stored in the world; coordinates live in the placements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBits {
    pub b: bool,
    pub read_once: bool,
    pub consumed: bool,
    /// Read-once pairs accept a single initial store.
    pub stored: bool,
}

impl WorldState {
    /// Registers a pair with both halves at `owner`'s location. Pairs exist
    /// from the start of the world holding `b`.
    pub fn create_pair(&mut self, owner: Party, serial: Serial, b: bool, read_once: bool) -> Result<()> {
        let at = self.party_location(owner);
        self.register(
            serial,
            Payload::Pair(PairBits {
                b,
                read_once,
                consumed: false,
                stored: false,
            }),
            vec![Placement::new(at, owner), Placement::new(at, owner)],
        )
    }

    pub fn pair_state(&self, serial: Serial) -> Result<PairState> {
        let rec = self.record(serial).ok_or(Error::UnknownSerial(serial))?;
        match &rec.payload {
            Payload::Pair(bits) => Ok(PairState {
                b: bits.b,
                s: serial,
                x1: rec.parts[0].location,
                x2: rec.parts[1].location,
                p1: rec.parts[0].momentum,
                p2: rec.parts[1].momentum,
                read_once: bits.read_once,
                consumed: bits.consumed,
            }),
            _ => Err(Error::WrongObjectKind {
                object: ObjectId::single(serial),
            }),
        }
    }

    fn store_pair(&mut self, state: &PairState) {
        if let Some(Payload::Pair(bits)) = self.payload_mut(state.s) {
            bits.b = state.b;
            bits.consumed = state.consumed;
        }
    }

    /// Serial readout by the holder of one half.
    pub fn lbp_serial(&self, actor: Party, id: ObjectId) -> Result<u64> {
        let at = self.require_possession(actor, id)?;
        Ok(self.pair_state(id.serial)?.serial_op(at))
    }

    /// Value readout where `actor` stands. Every half at that spot must be
    /// hers; halves elsewhere simply make the answer 0.
    pub fn lbp_value(&mut self, actor: Party, serial: Serial) -> Result<u8> {
        let at = self.party_location(actor);
        let mut state = self.pair_state(serial)?;
        for part in 0..2u8 {
            let id = ObjectId::half(serial, part);
            if self.location_of(id)? == at && self.custodian_of(id)? != actor {
                return Err(Error::NotInPossession { party: actor, object: id });
            }
        }
        let v = state.value_op(at);
        self.store_pair(&state);
        Ok(v)
    }

    /// Flip from the half `id`, which `actor` must hold.
    pub fn lbp_flip(&mut self, actor: Party, id: ObjectId) -> Result<()> {
        let at = self.require_possession(actor, id)?;
        let mut state = self.pair_state(id.serial)?;
        state.flip_op(at)?;
        self.store_pair(&state);
        Ok(())
    }

    /// Puts `bit` into a pair whose halves `actor` holds together.
    ///
    /// Read-once pairs take one direct store before their first read. Plain
    /// pairs are read and flipped if needed, which leaves them unchanged
    /// otherwise.
    pub fn lbp_prepare(&mut self, actor: Party, serial: Serial, bit: bool) -> Result<()> {
        let first = ObjectId::half(serial, 0);
        self.require_possession(actor, first)?;
        self.require_possession(actor, first.twin())?;
        let state = self.pair_state(serial)?;
        if state.x1 != state.x2 {
            return Err(Error::invalid("pair", "both halves must be together to store a bit"));
        }
        if state.read_once {
            match self.payload_mut(serial) {
                Some(Payload::Pair(bits)) if !bits.stored && !bits.consumed => {
                    bits.b = bit;
                    bits.stored = true;
                    Ok(())
                }
                _ => Err(Error::invalid("pair", "read-once pair was already set or read")),
            }
        } else {
            let current = self.lbp_value(actor, serial)? == 2;
            if current != bit {
                self.lbp_flip(actor, first)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairOp {
    Serial(Location),
    Value(Location),
    Flip(Location),
    Move { part: u8, to: Location },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Observed {
    Number(u64),
    Rejected,
    Silent,
}

fn step_joint(state: &mut PairState, op: PairOp) -> Observed {
    match op {
        PairOp::Serial(x) => Observed::Number(state.serial_op(x)),
        PairOp::Value(x) => Observed::Number(state.value_op(x) as u64),
        PairOp::Flip(x) => match state.flip_op(x) {
            Ok(()) => Observed::Silent,
            Err(_) => Observed::Rejected,
        },
        PairOp::Move { part, to } => {
            if part == 0 {
                state.x1 = to;
            } else {
                state.x2 = to;
            }
            Observed::Silent
        }
    }
}

fn step_local(halves: &mut (BoxHalf, BoxHalf), read_once: bool, op: PairOp) -> Observed {
    let (h1, h2) = halves;
    match op {
        // a reader at x sees the serial on any box that is there
        PairOp::Serial(x) => Observed::Number(h1.serial_op(x).max(h2.serial_op(x))),
        PairOp::Value(x) => Observed::Number(value_op_local(h1, h2, x, read_once) as u64),
        // the flip acts on one box at x, never on both
        PairOp::Flip(x) => {
            if h1.x == x {
                h1.flip_op(x);
                Observed::Silent
            } else if h2.x == x {
                h2.flip_op(x);
                Observed::Silent
            } else {
                Observed::Rejected
            }
        }
        PairOp::Move { part, to } => {
            if part == 0 {
                h1.x = to;
            } else {
                h2.x = to;
            }
            Observed::Silent
        }
    }
}

fn run_joint(mut state: PairState, ops: &[PairOp]) -> Vec<Observed> {
    ops.iter().map(|&op| step_joint(&mut state, op)).collect()
}

fn run_local(mut halves: (BoxHalf, BoxHalf), read_once: bool, ops: &[PairOp]) -> Vec<Observed> {
    ops.iter().map(|&op| step_local(&mut halves, read_once, op)).collect()
}

/// Depth-first over every sequence of at most `depth` more operators,
/// sharing work between sequences with a common prefix.
fn diverges(
    joint: PairState,
    local: (BoxHalf, BoxHalf),
    alphabet: &[PairOp],
    depth: usize,
    path: &mut Vec<PairOp>,
) -> bool {
    if depth == 0 {
        return false;
    }
    for &op in alphabet {
        let (mut j, mut l) = (joint, local);
        path.push(op);
        if step_joint(&mut j, op) != step_local(&mut l, joint.read_once, op) || diverges(j, l, alphabet, depth - 1, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Every operator over `locations` sites, in a fixed order.
pub fn op_alphabet(locations: usize) -> Vec<PairOp> {
    let locs = (0..locations).map(Location);
    let mut ops = Vec::new();
    ops.extend(locs.clone().map(PairOp::Serial));
    ops.extend(locs.clone().map(PairOp::Value));
    ops.extend(locs.clone().map(PairOp::Flip));
    for part in 0..2u8 {
        ops.extend(locs.clone().map(|to| PairOp::Move { part, to }));
    }
    ops
}

/// All starting pairs over `locations` sites: every bit, every placement,
/// plain and read-once.
fn initial_states(locations: usize) -> Vec<PairState> {
    let mut out = Vec::new();
    for read_once in [false, true] {
        for b in [false, true] {
            for x1 in 0..locations {
                for x2 in 0..locations {
                    let mut st = PairState::new(b, Serial(7), Location(x1), Location(x2));
                    st.read_once = read_once;
                    out.push(st);
                }
            }
        }
    }
    out
}

/// Finds an operator sequence on which the joint and the local descriptions
/// disagree. Exhaustive up to length 4; above that, 20 000 sequences are
/// drawn from `seed`. The local split draws its hidden bit from `seed` too,
/// so both descriptions see matched randomness.
pub fn find_divergence(locations: usize, max_len: usize, seed: u64) -> Option<(PairState, Vec<PairOp>)> {
    use rayon::prelude::*;

    let alphabet = op_alphabet(locations);
    let states = initial_states(locations);
    states.par_iter().enumerate().find_map_any(|(i, &start)| {
        let mut coins = SeededCoins::for_trial(seed, i as u64);
        let halves = start.to_local(&mut coins);
        let check = |ops: &[PairOp]| run_joint(start, ops) == run_local(halves, start.read_once, ops);
        if max_len <= 4 {
            let mut path = Vec::new();
            diverges(start, halves, &alphabet, max_len, &mut path).then_some((start, path))
        } else {
            for _ in 0..20_000 {
                let ops: Vec<PairOp> = (0..max_len)
                    .map(|_| alphabet[coins.below(alphabet.len() as u64) as usize])
                    .collect();
                if !check(&ops) {
                    return Some((start, ops));
                }
            }
            None
        }
    })
}

/// True when the joint and local descriptions agree on every operator
/// sequence up to `max_len` over `locations` sites.
pub fn equivalence_oracle(locations: usize, max_len: usize, seed: u64) -> bool {
    assert!((1..=4).contains(&locations), "at most four locations");
    find_divergence(locations, max_len, seed).is_none()
}

/// Operations by the holder of half 2 never change what the holder of half 1
/// can observe. Half 1 sits at location 0; half 2 roams the other sites.
/// Checked over both stored bits and every remote sequence up to `max_len`.
pub fn no_signaling_holds(locations: usize, max_len: usize) -> bool {
    assert!(locations >= 2);
    let here = Location(0);
    let mut remote_ops = Vec::new();
    for l in 1..locations {
        let l = Location(l);
        remote_ops.extend([PairOp::Serial(l), PairOp::Value(l), PairOp::Flip(l), PairOp::Move { part: 1, to: l }]);
    }
    let probe = [PairOp::Serial(here), PairOp::Value(here)];
    for start_remote in 1..locations {
        for read_once in [false, true] {
            let mut baseline: Option<Vec<Vec<Observed>>> = None;
            let mut seqs: Vec<Vec<PairOp>> = vec![vec![]];
            let mut frontier = seqs.clone();
            for _ in 0..max_len {
                frontier = frontier
                    .iter()
                    .flat_map(|s| {
                        remote_ops.iter().map(move |op| {
                            let mut t = s.clone();
                            t.push(*op);
                            t
                        })
                    })
                    .collect();
                seqs.extend(frontier.iter().cloned());
            }
            for seq in &seqs {
                // outputs at half 1, listed for b = 0 and b = 1
                let local_view: Vec<Vec<Observed>> = [false, true]
                    .iter()
                    .map(|&b| {
                        let mut st = PairState::new(b, Serial(3), here, Location(start_remote));
                        st.read_once = read_once;
                        let mut ops = seq.clone();
                        ops.extend_from_slice(&probe);
                        let out = run_joint(st, &ops);
                        out[seq.len()..].to_vec()
                    })
                    .collect();
                match &baseline {
                    None => baseline = Some(local_view),
                    Some(base) if *base != local_view => return false,
                    _ => {}
                }
            }
        }
    }
    true
}
