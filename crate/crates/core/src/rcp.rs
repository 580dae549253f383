//! Random correlated pairs and serial-only boxes.
//!
//! The two members of an RCP show the same uniformly random bit the first
//! time each is opened and nothing afterwards. No operation sets the bit.
//! A trivial box carries a serial and nothing else.

use serde::{Deserialize, Serialize};

use crate::chance::Coins;
use crate::error::{Error, Result};
use crate::world::{ObjectId, Party, Payload, Placement, Serial, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RcpReading {
    Null,
    Bit(bool),
}

impl RcpReading {
    pub fn bit(self) -> Option<bool> {
        match self {
            RcpReading::Bit(b) => Some(b),
            RcpReading::Null => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RcpPair {
    /// Drawn at the first open of either member.
    bound: Option<bool>,
    opened: [bool; 2],
}

impl RcpPair {
    pub fn new() -> Self {
        RcpPair::default()
    }

    /// Alternative that fixes the bit when the pair is made. Observationally
    /// the same as lazy binding.
    pub fn bound_at_creation(coins: &mut dyn Coins) -> Self {
        RcpPair {
            bound: Some(coins.bit()),
            opened: [false; 2],
        }
    }

    pub fn is_opened(&self, part: u8) -> bool {
        self.opened[part as usize]
    }

    pub fn open(&mut self, part: u8, coins: &mut dyn Coins, consumes_twin: bool) -> RcpReading {
        let i = part as usize;
        if self.opened[i] {
            return RcpReading::Null;
        }
        let bit = *self.bound.get_or_insert_with(|| coins.bit());
        self.opened[i] = true;
        if consumes_twin {
            self.opened[1 - i] = true;
        }
        RcpReading::Bit(bit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrivialBox {
    pub serial: Serial,
}

impl WorldState {
    pub fn create_rcp(&mut self, owner: Party, serial: Serial) -> Result<()> {
        let at = self.party_location(owner);
        self.register(
            serial,
            Payload::Rcp(RcpPair::new()),
            vec![Placement::new(at, owner), Placement::new(at, owner)],
        )
    }

    pub fn create_trivial(&mut self, owner: Party, serial: Serial) -> Result<ObjectId> {
        let at = self.party_location(owner);
        self.register(serial, Payload::Trivial(TrivialBox { serial }), vec![Placement::new(at, owner)])?;
        Ok(ObjectId::single(serial))
    }

    pub fn open_rcp(&mut self, actor: Party, id: ObjectId, coins: &mut dyn Coins) -> Result<RcpReading> {
        self.require_possession(actor, id)?;
        let twin = self.rules.rcp_open_consumes_twin;
        match self.payload_mut(id.serial) {
            Some(Payload::Rcp(pair)) => Ok(pair.open(id.part, coins, twin)),
            _ => Err(Error::WrongObjectKind { object: id }),
        }
    }

    /// Reads the serial off any object the actor holds.
    pub fn serial_of(&self, actor: Party, id: ObjectId) -> Result<Serial> {
        self.require_possession(actor, id)?;
        Ok(id.serial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chance::{for_each_path, Prob, SeededCoins};
    use crate::world::{Location, LocationGraph};
    use std::collections::BTreeMap;

    fn world() -> WorldState {
        WorldState::new(LocationGraph::line(3), Location(0), Location(2), Location(1)).unwrap()
    }

    #[test]
    fn members_agree_then_go_null() {
        let mut w = world();
        let s = w.mint_serials(1, 40).unwrap()[0];
        w.create_rcp(Party::Alice, s).unwrap();
        let mut coins = SeededCoins::new(3);
        let a = w.open_rcp(Party::Alice, ObjectId::half(s, 0), &mut coins).unwrap();
        let b = w.open_rcp(Party::Alice, ObjectId::half(s, 1), &mut coins).unwrap();
        assert_eq!(a, b);
        assert!(a.bit().is_some());
        assert_eq!(w.open_rcp(Party::Alice, ObjectId::half(s, 0), &mut coins).unwrap(), RcpReading::Null);
    }

    #[test]
    fn tampering_leaves_the_receiver_a_null() {
        let mut w = world();
        let s = w.mint_serials(1, 0).unwrap()[0];
        w.create_rcp(Party::Alice, s).unwrap();
        let half = ObjectId::half(s, 1);
        w.move_object(Party::Alice, half, Location(1)).unwrap();
        w.transfer_custody(Party::Alice, half, Party::Eve).unwrap();
        let mut coins = SeededCoins::new(0);
        assert!(w.open_rcp(Party::Eve, half, &mut coins).unwrap().bit().is_some());
        w.move_object(Party::Eve, half, Location(2)).unwrap();
        w.transfer_custody(Party::Eve, half, Party::Bob).unwrap();
        assert_eq!(w.open_rcp(Party::Bob, half, &mut coins).unwrap(), RcpReading::Null);
        // Alice's member is untouched by default.
        w.move_party(Party::Alice, Location(0)).unwrap();
        assert!(w.open_rcp(Party::Alice, half.twin(), &mut coins).unwrap().bit().is_some());
    }

    #[test]
    fn opening_can_use_up_the_twin() {
        let mut pair = RcpPair::new();
        let mut coins = SeededCoins::new(0);
        assert!(pair.open(0, &mut coins, true).bit().is_some());
        assert_eq!(pair.open(1, &mut coins, true), RcpReading::Null);
    }

    #[test]
    fn bit_is_uniform_whatever_happened_before() {
        // Reopening, opening the other member first, or opening only one:
        // the first genuine bit is 0 or 1 with probability exactly 1/2.
        type Plan = &'static [u8];
        let plans: [Plan; 3] = [&[0, 1], &[1, 0, 0], &[0, 0, 1]];
        for plan in plans {
            let mut dist = BTreeMap::new();
            for_each_path(
                |c| {
                    let mut pair = RcpPair::new();
                    plan.iter().map(|&p| pair.open(p, c, false)).collect::<Vec<_>>()
                },
                |p, readings| *dist.entry(readings[0]).or_insert(Prob::from_integer(0)) += p,
            );
            assert_eq!(dist[&RcpReading::Bit(false)], Prob::new(1, 2));
            assert_eq!(dist[&RcpReading::Bit(true)], Prob::new(1, 2));
        }
    }

    #[test]
    fn lazy_and_eager_binding_look_the_same() {
        let orders: [&[u8]; 4] = [&[0, 1], &[1, 0], &[0, 0, 1], &[1, 1, 0, 0]];
        for order in orders {
            let mut lazy = BTreeMap::new();
            let mut eager = BTreeMap::new();
            for_each_path(
                |c| {
                    let mut pair = RcpPair::new();
                    order.iter().map(|&p| pair.open(p, c, false)).collect::<Vec<_>>()
                },
                |p, r| *lazy.entry(r).or_insert(Prob::from_integer(0)) += p,
            );
            for_each_path(
                |c| {
                    let mut pair = RcpPair::bound_at_creation(c);
                    order.iter().map(|&p| pair.open(p, c, false)).collect::<Vec<_>>()
                },
                |p, r| *eager.entry(r).or_insert(Prob::from_integer(0)) += p,
            );
            assert_eq!(lazy, eager);
        }
    }

    #[test]
    fn trivial_box_only_has_a_serial() {
        let mut w = world();
        let s = w.mint_serials(2, 5).unwrap();
        let id = w.create_trivial(Party::Alice, s[0]).unwrap();
        assert_eq!(w.serial_of(Party::Alice, id).unwrap(), s[0]);
        assert!(w.serial_of(Party::Bob, id).is_err());
        assert_eq!(w.create_trivial(Party::Eve, s[0]), Err(Error::DuplicateSerial(s[0])));
        let mut coins = SeededCoins::new(0);
        assert_eq!(
            w.open_rcp(Party::Alice, id, &mut coins),
            Err(Error::WrongObjectKind { object: id })
        );
    }
}
