//! Locations, parties, serial numbers and custody.
//!
//! The world is the only place where physical facts live: which objects
//! exist, where each one is, and who holds it. Theory modules add operator
//! methods on [`WorldState`] that check custody here before touching a
//! payload.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lbp::PairBits;
use crate::lockbox::{CombinationLockbox, DualLockbox};
use crate::rcp::{RcpPair, TrivialBox};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Serial(pub u64);

impl fmt::Display for Serial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location(pub usize);

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "loc{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::Alice, Party::Bob, Party::Eve];

    fn index(self) -> usize {
        match self {
            Party::Alice => 0,
            Party::Bob => 1,
            Party::Eve => 2,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Eve => "eve",
        })
    }
}

/// One physical object. Single boxes use part 0; the two halves of a pair
/// (or the two members of an RCP) are parts 0 and 1 under one serial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId {
    pub serial: Serial,
    pub part: u8,
}

impl ObjectId {
    pub fn single(serial: Serial) -> Self {
        ObjectId { serial, part: 0 }
    }

    pub fn half(serial: Serial, part: u8) -> Self {
        debug_assert!(part < 2);
        ObjectId { serial, part }
    }

    pub fn twin(self) -> Self {
        ObjectId {
            serial: self.serial,
            part: 1 - self.part,
        }
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}.{}", self.serial, self.part)
    }
}

/// Undirected adjacency over `0..len`. One hop per tick is the speed limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationGraph {
    adjacency: Vec<BTreeSet<usize>>,
}

impl LocationGraph {
    pub fn new(len: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("locations", "at least one location is required"));
        }
        let mut adjacency = vec![BTreeSet::new(); len];
        for &(a, b) in edges {
            if a >= len {
                return Err(Error::UnknownLocation(Location(a)));
            }
            if b >= len {
                return Err(Error::UnknownLocation(Location(b)));
            }
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
        Ok(LocationGraph { adjacency })
    }

    /// `0 - 1 - ... - (len-1)`
    pub fn line(len: usize) -> Self {
        let edges: Vec<_> = (1..len).map(|i| (i - 1, i)).collect();
        Self::new(len, &edges).expect("line graph is valid")
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn contains(&self, loc: Location) -> bool {
        loc.0 < self.adjacency.len()
    }

    pub fn adjacent(&self, a: Location, b: Location) -> bool {
        self.adjacency
            .get(a.0)
            .is_some_and(|n| n.contains(&b.0))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adjacency.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    /// The lowest-numbered location adjacent to both `a` and `b`.
    pub fn common_neighbour(&self, a: Location, b: Location) -> Option<Location> {
        let na = self.adjacency.get(a.0)?;
        let nb = self.adjacency.get(b.0)?;
        na.intersection(nb).next().map(|&l| Location(l))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub location: Location,
    pub custodian: Party,
    /// Carried for completeness; nothing reads it.
    pub momentum: i64,
}

impl Placement {
    pub fn new(location: Location, custodian: Party) -> Self {
        Placement {
            location,
            custodian,
            momentum: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Lockbox(CombinationLockbox),
    Dual(DualLockbox),
    Pair(PairBits),
    Rcp(RcpPair),
    Trivial(TrivialBox),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Lockbox(_) => "lockbox",
            Payload::Dual(_) => "dual_lockbox",
            Payload::Pair(_) => "lbp",
            Payload::Rcp(_) => "rcp",
            Payload::Trivial(_) => "trivial",
        }
    }

    pub fn parts(&self) -> usize {
        match self {
            Payload::Pair(_) | Payload::Rcp(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectRecord {
    pub payload: Payload,
    pub parts: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WorldEvent {
    Moved {
        tick: u64,
        actor: Party,
        objects: Vec<ObjectId>,
        from: Location,
        to: Location,
    },
    Custody {
        tick: u64,
        object: ObjectId,
        from: Party,
        to: Party,
    },
}

/// Theory switches that change operator semantics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rules {
    /// A destroyed lockbox answers with an explicit marker instead of a coin flip.
    pub destroyed_returns_marker: bool,
    /// Opening one RCP member also uses up its twin.
    pub rcp_open_consumes_twin: bool,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub rules: Rules,
    clock: u64,
    graph: LocationGraph,
    parties: [Location; 3],
    objects: BTreeMap<Serial, ObjectRecord>,
    registry: BTreeSet<Serial>,
    minting_open: bool,
    log: Vec<WorldEvent>,
}

impl WorldState {
    pub fn new(graph: LocationGraph, alice: Location, bob: Location, eve: Location) -> Result<Self> {
        for loc in [alice, bob, eve] {
            if !graph.contains(loc) {
                return Err(Error::UnknownLocation(loc));
            }
        }
        Ok(WorldState {
            rules: Rules::default(),
            clock: 0,
            graph,
            parties: [alice, bob, eve],
            objects: BTreeMap::new(),
            registry: BTreeSet::new(),
            minting_open: true,
            log: Vec::new(),
        })
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn graph(&self) -> &LocationGraph {
        &self.graph
    }

    pub fn registry(&self) -> &BTreeSet<Serial> {
        &self.registry
    }

    pub fn log(&self) -> &[WorldEvent] {
        &self.log
    }

    /// Removes and returns the events logged since the last drain.
    pub fn drain_log(&mut self) -> Vec<WorldEvent> {
        std::mem::take(&mut self.log)
    }

    /// Mints `count` consecutive serials starting at `seed`. Only one batch
    /// can ever be minted, and only before the clock starts.
    pub fn mint_serials(&mut self, count: usize, seed: u64) -> Result<Vec<Serial>> {
        if !self.minting_open || self.clock > 0 {
            return Err(Error::InitializationClosed);
        }
        if count == 0 {
            return Err(Error::invalid("count", "must be positive"));
        }
        let end = seed
            .checked_add(count as u64)
            .ok_or_else(|| Error::invalid("seed", "serial range overflows"))?;
        let serials: Vec<Serial> = (seed..end).map(Serial).collect();
        self.registry.extend(serials.iter().copied());
        self.minting_open = false;
        Ok(serials)
    }

    pub fn register(&mut self, serial: Serial, payload: Payload, parts: Vec<Placement>) -> Result<()> {
        if !self.registry.contains(&serial) {
            return Err(Error::UnknownSerial(serial));
        }
        if self.objects.contains_key(&serial) {
            return Err(Error::DuplicateSerial(serial));
        }
        assert_eq!(payload.parts(), parts.len(), "placement count must match payload");
        for p in &parts {
            if !self.graph.contains(p.location) {
                return Err(Error::UnknownLocation(p.location));
            }
        }
        self.objects.insert(serial, ObjectRecord { payload, parts });
        Ok(())
    }

    pub fn record(&self, serial: Serial) -> Option<&ObjectRecord> {
        self.objects.get(&serial)
    }

    pub(crate) fn payload_mut(&mut self, serial: Serial) -> Option<&mut Payload> {
        self.objects.get_mut(&serial).map(|r| &mut r.payload)
    }

    pub fn objects(&self) -> impl Iterator<Item = (&Serial, &ObjectRecord)> {
        self.objects.iter()
    }

    fn placement(&self, id: ObjectId) -> Result<&Placement> {
        self.objects
            .get(&id.serial)
            .and_then(|r| r.parts.get(id.part as usize))
            .ok_or(Error::UnknownObject(id))
    }

    fn placement_mut(&mut self, id: ObjectId) -> Result<&mut Placement> {
        self.objects
            .get_mut(&id.serial)
            .and_then(|r| r.parts.get_mut(id.part as usize))
            .ok_or(Error::UnknownObject(id))
    }

    pub fn location_of(&self, id: ObjectId) -> Result<Location> {
        Ok(self.placement(id)?.location)
    }

    pub fn custodian_of(&self, id: ObjectId) -> Result<Party> {
        Ok(self.placement(id)?.custodian)
    }

    pub fn party_location(&self, party: Party) -> Location {
        self.parties[party.index()]
    }

    /// Every object part currently held by `party`, in id order.
    pub fn held_by(&self, party: Party) -> Vec<ObjectId> {
        let mut out = Vec::new();
        for (serial, rec) in &self.objects {
            for (i, p) in rec.parts.iter().enumerate() {
                if p.custodian == party {
                    out.push(ObjectId { serial: *serial, part: i as u8 });
                }
            }
        }
        out
    }

    /// Checks that `party` holds `id` and stands next to it; returns where.
    pub fn require_possession(&self, party: Party, id: ObjectId) -> Result<Location> {
        let p = self.placement(id)?;
        if p.custodian != party || p.location != self.party_location(party) {
            return Err(Error::NotInPossession { party, object: id });
        }
        Ok(p.location)
    }

    pub fn tick(&mut self) {
        self.clock += 1;
    }

    pub fn move_object(&mut self, actor: Party, id: ObjectId, dest: Location) -> Result<()> {
        self.carry(actor, &[id], dest)
    }

    /// `actor` walks one hop to `dest` carrying `ids`. Takes one tick.
    pub fn carry(&mut self, actor: Party, ids: &[ObjectId], dest: Location) -> Result<()> {
        if !self.graph.contains(dest) {
            return Err(Error::UnknownLocation(dest));
        }
        let from = self.party_location(actor);
        for &id in ids {
            self.require_possession(actor, id)?;
        }
        if !self.graph.adjacent(from, dest) {
            return Err(match ids.first() {
                Some(&object) => Error::SuperluminalMoveRejected { object, from, to: dest },
                None => Error::PartyMoveRejected { party: actor, from, to: dest },
            });
        }
        for &id in ids {
            self.placement_mut(id)?.location = dest;
        }
        self.parties[actor.index()] = dest;
        self.clock += 1;
        self.log.push(WorldEvent::Moved {
            tick: self.clock,
            actor,
            objects: ids.to_vec(),
            from,
            to: dest,
        });
        Ok(())
    }

    pub fn move_party(&mut self, party: Party, dest: Location) -> Result<()> {
        self.carry(party, &[], dest)
    }

    /// Hands `id` from `giver` to `to`. Both must stand where the object is.
    pub fn transfer_custody(&mut self, giver: Party, id: ObjectId, to: Party) -> Result<()> {
        let at = self.require_possession(giver, id)?;
        if self.party_location(to) != at {
            return Err(Error::NotColocated { giver, receiver: to });
        }
        self.placement_mut(id)?.custodian = to;
        self.clock += 1;
        self.log.push(WorldEvent::Custody {
            tick: self.clock,
            object: id,
            from: giver,
            to,
        });
        Ok(())
    }

    /// Ground-truth relocation used by search oracles that place objects by fiat.
    pub(crate) fn teleport(&mut self, id: ObjectId, to: Location, custodian: Party) -> Result<()> {
        let p = self.placement_mut(id)?;
        p.location = to;
        p.custodian = custodian;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rcp::TrivialBox;

    fn three_site_world() -> WorldState {
        WorldState::new(LocationGraph::line(3), Location(0), Location(2), Location(1)).unwrap()
    }

    fn trivial(world: &mut WorldState, serial: Serial, at: usize, who: Party) {
        world
            .register(
                serial,
                Payload::Trivial(TrivialBox { serial }),
                vec![Placement::new(Location(at), who)],
            )
            .unwrap();
    }

    #[test]
    fn minting_is_sequential_and_once_only() {
        let mut w = three_site_world();
        let s = w.mint_serials(3, 0).unwrap();
        assert_eq!(s, vec![Serial(0), Serial(1), Serial(2)]);
        assert_eq!(w.mint_serials(1, 0), Err(Error::InitializationClosed));
    }

    #[test]
    fn single_mint_then_closed() {
        let mut w = three_site_world();
        assert_eq!(w.mint_serials(1, 5).unwrap(), vec![Serial(5)]);
        assert_eq!(w.mint_serials(1, 6), Err(Error::InitializationClosed));
    }

    #[test]
    fn thousand_serials_are_distinct() {
        let mut w = three_site_world();
        let s = w.mint_serials(1000, 7).unwrap();
        let set: BTreeSet<_> = s.iter().collect();
        assert_eq!(set.len(), 1000);
        assert_eq!(w.registry().len(), 1000);
    }

    #[test]
    fn minting_after_clock_starts_is_rejected() {
        let mut w = three_site_world();
        w.tick();
        assert_eq!(w.mint_serials(2, 0), Err(Error::InitializationClosed));
    }

    #[test]
    fn adjacent_move_succeeds_one_tick_later() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 0, Party::Alice);
        let t = w.clock();
        w.move_object(Party::Alice, ObjectId::single(s), Location(1)).unwrap();
        assert_eq!(w.clock(), t + 1);
        assert_eq!(w.location_of(ObjectId::single(s)).unwrap(), Location(1));
        assert_eq!(w.custodian_of(ObjectId::single(s)).unwrap(), Party::Alice);
    }

    #[test]
    fn two_hop_move_is_superluminal() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 0, Party::Alice);
        let err = w.move_object(Party::Alice, ObjectId::single(s), Location(2)).unwrap_err();
        assert!(matches!(err, Error::SuperluminalMoveRejected { .. }));
        assert_eq!(w.location_of(ObjectId::single(s)).unwrap(), Location(0));
    }

    #[test]
    fn eve_cannot_move_what_she_does_not_hold() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 1, Party::Alice);
        let err = w.move_object(Party::Eve, ObjectId::single(s), Location(2)).unwrap_err();
        assert!(matches!(err, Error::NotInPossession { party: Party::Eve, .. }));
    }

    #[test]
    fn handoff_requires_colocation() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 0, Party::Alice);
        let id = ObjectId::single(s);
        assert_eq!(
            w.transfer_custody(Party::Alice, id, Party::Bob),
            Err(Error::NotColocated { giver: Party::Alice, receiver: Party::Bob })
        );
        w.move_object(Party::Alice, id, Location(1)).unwrap();
        w.transfer_custody(Party::Alice, id, Party::Eve).unwrap();
        assert_eq!(w.custodian_of(id).unwrap(), Party::Eve);
    }

    #[test]
    fn chained_handoff_replays_from_custody_log() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 1, Party::Alice);
        let id = ObjectId::single(s);
        // Alice walks to the transit node first; that move is not part of the chain.
        w.move_party(Party::Alice, Location(1)).unwrap();
        w.move_party(Party::Bob, Location(1)).unwrap();
        let t = w.clock();
        w.transfer_custody(Party::Alice, id, Party::Eve).unwrap();
        w.transfer_custody(Party::Eve, id, Party::Bob).unwrap();
        assert_eq!(w.clock(), t + 2);

        // Oracle: fold the custody events from the initial custodian.
        let mut holder = Party::Alice;
        for ev in w.log() {
            if let WorldEvent::Custody { object, from, to, .. } = ev {
                assert_eq!(*object, id);
                assert_eq!(*from, holder);
                holder = *to;
            }
        }
        assert_eq!(holder, Party::Bob);
        assert_eq!(w.custodian_of(id).unwrap(), Party::Bob);
    }

    #[test]
    fn duplicate_and_unknown_serials_rejected() {
        let mut w = three_site_world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        trivial(&mut w, s, 0, Party::Alice);
        let again = w.register(
            s,
            Payload::Trivial(TrivialBox { serial: s }),
            vec![Placement::new(Location(0), Party::Alice)],
        );
        assert_eq!(again, Err(Error::DuplicateSerial(s)));
        let forged = w.register(
            Serial(99),
            Payload::Trivial(TrivialBox { serial: Serial(99) }),
            vec![Placement::new(Location(0), Party::Eve)],
        );
        assert_eq!(forged, Err(Error::UnknownSerial(Serial(99))));
    }
}
