//! Protocol harness: the physical channel through Eve, the public classical
//! channel, lab intrusions, and the bookkeeping that scores a run.
//!
//! Honest parties are plain Rust code driving a [`Session`]. Eve is an
//! [`Adversary`] consulted once per object she gets her hands on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chance::Coins;
use crate::error::{Error, Result};
use crate::lbp::PairState;
use crate::lockbox::{Combination, DualLockbox, OpenOutcome};
use crate::pa::HashSpec;
use crate::rcp::RcpReading;
use crate::transcript::Transcript;
use crate::world::{Location, ObjectId, Party, Payload, Serial, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Pass,
    TryOpen { guess: u64 },
    Flip,
    Value,
    Substitute,
    Withhold,
    Delay,
    OpenRcp,
    ReadReplace,
    MoveTo { location: usize },
}

impl Action {
    /// How many distinct observations the action can return.
    pub fn outcome_classes(self) -> usize {
        match self {
            Action::TryOpen { .. } => 2,
            Action::Value | Action::OpenRcp | Action::ReadReplace => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Pass => "pass",
            Action::TryOpen { .. } => "try_open",
            Action::Flip => "flip",
            Action::Value => "value",
            Action::Substitute => "substitute",
            Action::Withhold => "withhold",
            Action::Delay => "delay",
            Action::OpenRcp => "open_rcp",
            Action::ReadReplace => "read_replace",
            Action::MoveTo { .. } => "move_to",
        }
    }
}

/// What an action showed the adversary, as an index below
/// [`Action::outcome_classes`]. Bits map to 0 and 1; a value readout keeps
/// its 0/1/2; an RCP open is 0 for null and `1 + bit` otherwise.
pub type Observation = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Objects in transit between the labs.
    Transit,
    /// Eve inside a lab.
    Intrusion,
    /// A cheating committer choosing how to open.
    Open,
}

#[derive(Debug, Clone, Copy)]
pub struct DecisionPoint {
    /// Position among all decisions of the run.
    pub index: usize,
    pub phase: Phase,
    /// Position among the decisions of this phase.
    pub ordinal: usize,
    pub object: ObjectId,
    pub kind: &'static str,
}

pub trait Adversary {
    /// `None` stops the run with [`Error::Halted`].
    fn decide(&mut self, point: &DecisionPoint) -> Option<Action>;

    /// Result of the action just taken; `false` stops the run.
    fn observe(&mut self, _obs: Observation) -> bool {
        true
    }
}

impl<A: Adversary + ?Sized> Adversary for &mut A {
    fn decide(&mut self, point: &DecisionPoint) -> Option<Action> {
        (**self).decide(point)
    }

    fn observe(&mut self, obs: Observation) -> bool {
        (**self).observe(obs)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Passive;

impl Adversary for Passive {
    fn decide(&mut self, _: &DecisionPoint) -> Option<Action> {
        Some(Action::Pass)
    }
}

/// Takes `action` at the first `count` decisions of `phase` and passes
/// everywhere else.
///
/// Honest parties randomize everything that matters (bits, combinations,
/// test positions, marks), so attacking a fixed set is as good as attacking
/// a random one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstK {
    pub phase: Phase,
    pub count: usize,
    pub action: Action,
}

impl Adversary for FirstK {
    fn decide(&mut self, point: &DecisionPoint) -> Option<Action> {
        Some(if point.phase == self.phase && point.ordinal < self.count {
            self.action
        } else {
            Action::Pass
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum AbortReason {
    TestFailed,
    SerialMismatch,
    MissingObjects,
    OpenRejected,
    AllMarkedConsumed,
    TamperDetected,
    RuleViolation { party: Party, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    KeyAgreed {
        alice: Vec<bool>,
        bob: Vec<bool>,
        leak_bound: usize,
    },
    Abort(AbortReason),
    CommitmentOpened {
        bit: bool,
        accepted: bool,
    },
    /// `key` is what the storing side reads back; `partner` is the other
    /// copy: the peer's key for shared storage, or the key as originally
    /// stored for single-lab storage.
    StorageVerified {
        key: Vec<bool>,
        partner: Vec<bool>,
    },
    /// Result of an exhaustive analysis rather than a single run.
    Analysis {
        claim: String,
        holds: bool,
        checked: u64,
    },
    Inconclusive,
}

impl Verdict {
    pub fn is_abort(&self) -> bool {
        matches!(self, Verdict::Abort(_))
    }

    /// True for a completed key or storage run whose two copies agree.
    pub fn keys_agree(&self) -> Option<bool> {
        match self {
            Verdict::KeyAgreed { alice, bob, .. } => Some(alice == bob),
            Verdict::StorageVerified { key, partner } => Some(key == partner),
            _ => None,
        }
    }

    pub fn key_len(&self) -> usize {
        match self {
            Verdict::KeyAgreed { alice, .. } => alice.len(),
            Verdict::StorageVerified { key, .. } => key.len(),
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub objects_sent: usize,
    pub eve_actions: usize,
    pub boxes_destroyed: usize,
    pub tests: usize,
    pub tests_failed: usize,
    pub nulls: usize,
    pub discarded: usize,
    /// Some party saw evidence of tampering.
    pub detected: bool,
    /// The committed bit, for commitment runs.
    pub committed: Option<bool>,
    pub key_length: usize,
    /// Raw bits feeding a nonempty final key that Eve knows.
    pub eve_known_key_bits: usize,
    /// Eve knows every raw bit each key bit depends on.
    pub eve_knows_key: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EveRole {
    /// Eve handles objects in transit and in intrusion windows.
    #[default]
    Interceptor,
    /// The adversary is the committer; transit is untouched.
    Committer,
}

pub struct Session<'a> {
    pub world: WorldState,
    pub coins: &'a mut dyn Coins,
    eve: &'a mut dyn Adversary,
    pub transcript: Transcript,
    /// Ground truth: the bit Eve holds for the object with each serial.
    pub knowledge: BTreeMap<Serial, bool>,
    pub stats: Stats,
    pub role: EveRole,
    labs: [Location; 3],
    eve_pool: Vec<Serial>,
    decisions: usize,
    phase_counts: [usize; 3],
}

fn violation(party: Party, e: Error) -> Error {
    match e {
        Error::Halted | Error::RuleViolation { .. } => e,
        other => Error::RuleViolation {
            party,
            detail: other.to_string(),
        },
    }
}

impl<'a> Session<'a> {
    pub fn new(world: WorldState, coins: &'a mut dyn Coins, eve: &'a mut dyn Adversary, recording: bool) -> Self {
        let labs = [
            world.party_location(Party::Alice),
            world.party_location(Party::Bob),
            world.party_location(Party::Eve),
        ];
        Session {
            world,
            coins,
            eve,
            transcript: if recording {
                Transcript::new()
            } else {
                Transcript::disabled()
            },
            knowledge: BTreeMap::new(),
            stats: Stats::default(),
            role: EveRole::Interceptor,
            labs,
            eve_pool: Vec::new(),
            decisions: 0,
            phase_counts: [0; 3],
        }
    }

    /// Home location of a party: Alice's and Bob's labs, Eve's post.
    pub fn home(&self, party: Party) -> Location {
        self.labs[party as usize]
    }

    /// Spare serials Eve may fill with her own objects.
    pub fn give_eve(&mut self, serials: Vec<Serial>) {
        self.eve_pool = serials;
    }

    fn sync(&mut self) {
        for e in self.world.drain_log() {
            self.transcript.push_world(e);
        }
    }

    /// Authenticated public message. Everybody, Eve included, sees it.
    pub fn message(&mut self, from: Party, to: Party, topic: &str, body: Value) {
        self.sync();
        self.world.tick();
        let tick = self.world.clock();
        self.transcript
            .push(tick, from.to_string(), "message", json!({ "to": to.to_string(), "topic": topic, "body": body }));
    }

    /// Public projection of an operator use: who, what, on which object.
    fn op(&mut self, actor: Party, name: &str, object: ObjectId) {
        self.sync();
        let tick = self.world.clock();
        self.transcript
            .push(tick, actor.to_string(), "op", json!({ "op": name, "object": object.to_string() }));
    }

    pub fn note(&mut self, actor: &str, kind: &str, payload: Value) {
        self.sync();
        let tick = self.world.clock();
        self.transcript.push(tick, actor, kind, payload);
    }

    fn decide(&mut self, phase: Phase, object: ObjectId) -> Result<Action> {
        let kind = self.world.record(object.serial).map_or("unknown", |r| r.payload.kind());
        let slot = phase as usize;
        let point = DecisionPoint {
            index: self.decisions,
            phase,
            ordinal: self.phase_counts[slot],
            object,
            kind,
        };
        self.decisions += 1;
        self.phase_counts[slot] += 1;
        self.eve.decide(&point).ok_or(Error::Halted)
    }

    fn observe(&mut self, obs: Observation) -> Result<()> {
        if self.eve.observe(obs) {
            Ok(())
        } else {
            Err(Error::Halted)
        }
    }

    /// Asks the committing adversary how to open `object`.
    pub fn committer_choice(&mut self, object: ObjectId) -> Result<Action> {
        let a = self.decide(Phase::Open, object)?;
        self.observe(0)?;
        Ok(a)
    }

    /// Moves `ids` from `from`'s lab to `to`'s lab through Eve's hands.
    /// Returns what arrives, in order; missing objects were kept by Eve and
    /// foreign ones are hers.
    pub fn send(&mut self, from: Party, to: Party, ids: &[ObjectId]) -> Result<Vec<ObjectId>> {
        let origin = self.home(from);
        let dest = self.home(to);
        let transit = self
            .world
            .graph()
            .common_neighbour(origin, dest)
            .ok_or_else(|| Error::invalid("world", "the labs need a shared transit node"))?;
        if self.world.party_location(Party::Eve) != transit {
            return Err(Error::invalid("world", "eve must wait at the transit node"));
        }
        self.stats.objects_sent += ids.len();
        (|| -> Result<()> {
            self.world.carry(from, ids, transit)?;
            for &id in ids {
                self.world.transfer_custody(from, id, Party::Eve)?;
            }
            self.world.move_party(from, origin)
        })()
        .map_err(|e| violation(from, e))?;
        let mut delivered = Vec::with_capacity(ids.len());
        for &id in ids {
            let arrived = if self.role == EveRole::Committer {
                Some(id)
            } else {
                self.eve_act(Phase::Transit, id)?
            };
            delivered.extend(arrived);
        }
        (|| -> Result<()> {
            self.world.carry(Party::Eve, &delivered, dest)?;
            for &id in &delivered {
                self.world.transfer_custody(Party::Eve, id, to)?;
            }
            self.world.move_party(Party::Eve, transit)
        })()
        .map_err(|e| violation(Party::Eve, e))?;
        self.sync();
        Ok(delivered)
    }

    /// Eve enters `owner`'s lab, takes temporary custody of everything there,
    /// acts once per unit in `units`, hands back what remains and leaves.
    /// Returns the swaps she made, `(original, replacement)`; for pairs the
    /// unit is half 0.
    pub fn intrude(&mut self, owner: Party, units: &[ObjectId]) -> Result<Vec<(ObjectId, ObjectId)>> {
        let lab = self.world.party_location(owner);
        let post = self.world.party_location(Party::Eve);
        self.note("eve", "intrusion", json!({ "lab": owner.to_string(), "state": "begin" }));
        self.world.move_party(Party::Eve, lab).map_err(|e| violation(Party::Eve, e))?;
        let inside: Vec<ObjectId> = self
            .world
            .held_by(owner)
            .into_iter()
            .filter(|&id| self.world.location_of(id) == Ok(lab))
            .collect();
        for &id in &inside {
            self.world.transfer_custody(owner, id, Party::Eve).map_err(|e| violation(owner, e))?;
        }
        let mut swaps = Vec::new();
        let mut loot = Vec::new();
        for &unit in units {
            self.intrusion_act(unit, &mut swaps, &mut loot)?;
        }
        let back: Vec<ObjectId> = self
            .world
            .held_by(Party::Eve)
            .into_iter()
            .filter(|id| self.world.location_of(*id) == Ok(lab) && !loot.contains(id))
            .collect();
        (|| -> Result<()> {
            for &id in &back {
                self.world.transfer_custody(Party::Eve, id, owner)?;
            }
            self.world.carry(Party::Eve, &loot, post)
        })()
        .map_err(|e| violation(Party::Eve, e))?;
        self.note("eve", "intrusion", json!({ "lab": owner.to_string(), "state": "end" }));
        Ok(swaps)
    }

    fn eve_act(&mut self, phase: Phase, id: ObjectId) -> Result<Option<ObjectId>> {
        let action = self.decide(phase, id)?;
        if action != Action::Pass {
            self.stats.eve_actions += 1;
            self.op(Party::Eve, action.name(), id);
        }
        let (obs, out) = self.transit_effect(id, action).map_err(|e| violation(Party::Eve, e))?;
        debug_assert!((obs as usize) < action.outcome_classes());
        self.observe(obs)?;
        Ok(out)
    }

    fn transit_effect(&mut self, id: ObjectId, action: Action) -> Result<(Observation, Option<ObjectId>)> {
        Ok(match action {
            Action::Pass => (0, Some(id)),
            Action::Delay => {
                self.world.tick();
                (0, Some(id))
            }
            Action::Withhold => (0, None),
            Action::Substitute => (0, Some(self.forge(id)?)),
            Action::MoveTo { location } => {
                let here = self.world.party_location(Party::Eve);
                self.world.carry(Party::Eve, &[id], Location(location))?;
                self.world.move_party(Party::Eve, here)?;
                (0, None)
            }
            Action::ReadReplace => {
                return Err(Error::invalid("action", "read_replace needs a whole pair in a lab"));
            }
            other => (self.inspect(id, other)?, Some(id)),
        })
    }

    fn intrusion_act(
        &mut self,
        unit: ObjectId,
        swaps: &mut Vec<(ObjectId, ObjectId)>,
        loot: &mut Vec<ObjectId>,
    ) -> Result<()> {
        let action = self.decide(Phase::Intrusion, unit)?;
        if action != Action::Pass {
            self.stats.eve_actions += 1;
            self.op(Party::Eve, action.name(), unit);
        }
        let obs = (|| -> Result<Observation> {
            Ok(match action {
                Action::Pass => 0,
                Action::Delay => {
                    self.world.tick();
                    0
                }
                Action::Withhold => {
                    loot.extend(self.unit_parts(unit));
                    0
                }
                Action::Substitute => {
                    let fake = self.forge(unit)?;
                    self.swap(unit, fake, swaps, loot);
                    0
                }
                Action::ReadReplace => {
                    let v = self.inspect(unit, Action::Value)?;
                    if v != 0 {
                        let bit = v == 2;
                        let fake = self.forge(unit)?;
                        self.world.lbp_prepare(Party::Eve, fake.serial, bit)?;
                        self.knowledge.insert(fake.serial, bit);
                        self.swap(unit, fake, swaps, loot);
                    }
                    v
                }
                Action::MoveTo { .. } => return Err(Error::invalid("action", "move_to is a transit action")),
                other => self.inspect(unit, other)?,
            })
        })()
        .map_err(|e| violation(Party::Eve, e))?;
        debug_assert!((obs as usize) < action.outcome_classes());
        self.observe(obs)
    }

    fn unit_parts(&self, unit: ObjectId) -> Vec<ObjectId> {
        match self.world.record(unit.serial).map(|r| &r.payload) {
            Some(Payload::Pair(_)) => vec![unit, unit.twin()],
            _ => vec![unit],
        }
    }

    fn swap(&mut self, unit: ObjectId, fake: ObjectId, swaps: &mut Vec<(ObjectId, ObjectId)>, loot: &mut Vec<ObjectId>) {
        loot.extend(self.unit_parts(unit));
        // Eve keeps the unused member of a forged RCP.
        if matches!(self.world.record(fake.serial).map(|r| &r.payload), Some(Payload::Rcp(_))) {
            loot.push(fake.twin());
        }
        swaps.push((unit, fake));
    }

    /// Read-type actions; returns the observation and updates Eve's ledger.
    fn inspect(&mut self, id: ObjectId, action: Action) -> Result<Observation> {
        match action {
            Action::TryOpen { guess } => {
                let len = self.combination_len(id)?;
                let guess = Combination::new(guess, len)?;
                let outcome = self.world.open_lockbox(Party::Eve, id, guess, self.coins)?;
                if !outcome.is_genuine() {
                    self.stats.boxes_destroyed += 1;
                }
                if let OpenOutcome::Revealed(b) = outcome {
                    self.knowledge.insert(id.serial, b);
                }
                Ok(outcome.bit().map_or(0, |b| b as u8))
            }
            Action::Flip => {
                self.world.lbp_flip(Party::Eve, id)?;
                Ok(0)
            }
            Action::Value => {
                let v = self.world.lbp_value(Party::Eve, id.serial)?;
                if v != 0 {
                    self.knowledge.insert(id.serial, v == 2);
                }
                Ok(v)
            }
            Action::OpenRcp => Ok(match self.world.open_rcp(Party::Eve, id, self.coins)? {
                RcpReading::Null => 0,
                RcpReading::Bit(b) => {
                    self.knowledge.insert(id.serial, b);
                    1 + b as u8
                }
            }),
            other => Err(Error::invalid("action", format!("{} is not a readout", other.name()))),
        }
    }

    fn combination_len(&self, id: ObjectId) -> Result<u32> {
        match self.world.record(id.serial).map(|r| &r.payload) {
            Some(Payload::Lockbox(b)) => Ok(b.combination_len()),
            Some(Payload::Dual(b)) => Ok(b.combinations().0.len()),
            _ => Err(Error::WrongObjectKind { object: id }),
        }
    }

    /// Fills one of Eve's spare serials with an object shaped like `like`,
    /// held by Eve where she stands. Returns the part matching `like`.
    fn forge(&mut self, like: ObjectId) -> Result<ObjectId> {
        let Some(serial) = self.eve_pool.pop() else {
            return Err(Error::invalid("eve", "no spare serials left to forge with"));
        };
        let payload = self
            .world
            .record(like.serial)
            .map(|r| r.payload.clone())
            .ok_or(Error::UnknownObject(like))?;
        let part = like.part;
        match payload {
            Payload::Lockbox(b) => {
                let combo = Combination::new(0, b.combination_len())?;
                self.knowledge.insert(serial, false);
                self.world.create_lockbox(Party::Eve, false, combo, serial)
            }
            Payload::Dual(b) => {
                let len = b.combinations().0.len();
                let dual = DualLockbox::new(false, Combination::new(0, len)?, Combination::new(1, len)?, serial)?;
                self.knowledge.insert(serial, false);
                self.world.create_dual_lockbox(Party::Eve, dual)
            }
            Payload::Pair(bits) => {
                self.world.create_pair(Party::Eve, serial, false, bits.read_once)?;
                if !bits.read_once {
                    self.knowledge.insert(serial, false);
                }
                Ok(ObjectId::half(serial, part))
            }
            Payload::Rcp(_) => {
                self.world.create_rcp(Party::Eve, serial)?;
                Ok(ObjectId::half(serial, part))
            }
            Payload::Trivial(_) => self.world.create_trivial(Party::Eve, serial),
        }
    }

    pub fn pair_state(&self, serial: Serial) -> Result<PairState> {
        self.world.pair_state(serial)
    }

    /// Records how much of a final key Eve holds.
    ///
    /// `raw` are the hashed positions, each with the serial of the object it
    /// came from and the true bit.
    pub fn assess_key(&mut self, raw: &[(Serial, bool)], hash: &HashSpec) {
        let known: Vec<bool> = raw.iter().map(|(s, b)| self.knowledge.get(s) == Some(b)).collect();
        let len = hash.output_len();
        self.stats.key_length = len;
        if len == 0 {
            self.stats.eve_known_key_bits = 0;
            self.stats.eve_knows_key = false;
            return;
        }
        self.stats.eve_known_key_bits = known.iter().filter(|&&k| k).count();
        self.stats.eve_knows_key = hash
            .rows()
            .iter()
            .all(|row| row.iter().zip(&known).all(|(&m, &k)| !m || k));
    }

    pub fn finish(mut self, verdict: Verdict) -> (Transcript, ProtocolOutcome) {
        let outcome = ProtocolOutcome {
            verdict,
            stats: self.stats.clone(),
        };
        self.note("harness", "outcome", serde_json::to_value(&outcome).expect("outcome serializes"));
        (self.transcript, outcome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chance::SeededCoins;
    use crate::world::LocationGraph;

    fn world() -> WorldState {
        WorldState::new(LocationGraph::line(3), Location(0), Location(2), Location(1)).unwrap()
    }

    #[test]
    fn passive_send_delivers_through_transit() {
        let mut w = world();
        let s = w.mint_serials(2, 0).unwrap();
        let ids: Vec<ObjectId> = s.iter().map(|&s| w.create_trivial(Party::Alice, s).unwrap()).collect();
        let mut coins = SeededCoins::new(0);
        let mut eve = Passive;
        let mut session = Session::new(w, &mut coins, &mut eve, true);
        let got = session.send(Party::Alice, Party::Bob, &ids).unwrap();
        assert_eq!(got, ids);
        for id in ids {
            assert_eq!(session.world.custodian_of(id).unwrap(), Party::Bob);
            assert_eq!(session.world.location_of(id).unwrap(), Location(2));
        }
        let kinds: Vec<&str> = session.transcript.events().iter().map(|e| e.kind.as_str()).collect();
        assert!(kinds.contains(&"custody") && kinds.contains(&"move"));
        // every custody change in the log passes through eve
        let custody: Vec<String> = session
            .transcript
            .events()
            .iter()
            .filter(|e| e.kind == "custody")
            .map(|e| format!("{}>{}", e.actor, e.payload["to"].as_str().unwrap()))
            .collect();
        assert_eq!(custody, ["alice>eve", "alice>eve", "eve>bob", "eve>bob"]);
    }

    #[test]
    fn illegal_eve_move_is_her_rule_violation() {
        let mut w = world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        let id = w.create_trivial(Party::Alice, s).unwrap();
        let mut coins = SeededCoins::new(0);
        let mut eve = FirstK {
            phase: Phase::Transit,
            count: 1,
            action: Action::MoveTo { location: 3 },
        };
        let mut session = Session::new(w, &mut coins, &mut eve, false);
        match session.send(Party::Alice, Party::Bob, &[id]) {
            Err(Error::RuleViolation { party, .. }) => assert_eq!(party, Party::Eve),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn withheld_objects_stay_with_eve() {
        let mut w = world();
        let s = w.mint_serials(2, 0).unwrap();
        let ids: Vec<ObjectId> = s.iter().map(|&s| w.create_trivial(Party::Alice, s).unwrap()).collect();
        let mut coins = SeededCoins::new(0);
        let mut eve = FirstK {
            phase: Phase::Transit,
            count: 1,
            action: Action::Withhold,
        };
        let mut session = Session::new(w, &mut coins, &mut eve, false);
        let got = session.send(Party::Alice, Party::Bob, &ids).unwrap();
        assert_eq!(got, vec![ids[1]]);
        assert_eq!(session.world.custodian_of(ids[0]).unwrap(), Party::Eve);
    }
}
