//! Combination lockboxes.
//!
//! A lockbox hides one bit behind a combination. The right combination shows
//! the bit and leaves the box intact; anything else destroys the bit for good,
//! after which every opening returns a fresh coin flip. A dual lockbox has a
//! second combination that shows the complement.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chance::Coins;
use crate::error::{Error, Result};
use crate::world::{ObjectId, Party, Payload, Placement, Serial, WorldState};

pub const MAX_COMBINATION_BITS: u32 = 32;

/// A fixed-length bit string, most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Combination {
    len: u32,
    value: u64,
}

impl Combination {
    pub fn new(value: u64, len: u32) -> Result<Self> {
        if len == 0 || len > MAX_COMBINATION_BITS {
            return Err(Error::BadCombinationLength(len));
        }
        if value >> len != 0 {
            return Err(Error::invalid("combination", format!("{value} does not fit in {len} bits")));
        }
        Ok(Combination { len, value })
    }

    pub fn random(coins: &mut dyn Coins, len: u32) -> Result<Self> {
        let space = Self::space(len)?;
        Self::new(coins.below(space), len)
    }

    /// Number of distinct combinations of this length.
    pub fn space(len: u32) -> Result<u64> {
        if len == 0 || len > MAX_COMBINATION_BITS {
            return Err(Error::BadCombinationLength(len));
        }
        Ok(1u64 << len)
    }

    pub fn len(self) -> u32 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Numeric value, used for ordering combinations.
    pub fn value(self) -> u64 {
        self.value
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.len as usize)
    }
}

impl FromStr for Combination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_COMBINATION_BITS as usize {
            return Err(Error::BadCombinationLength(s.len() as u32));
        }
        let value = u64::from_str_radix(s, 2)
            .map_err(|_| Error::invalid("combination", format!("`{s}` is not a bit string")))?;
        Combination::new(value, s.len() as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Intact,
    Destroyed,
}

/// Result of presenting a combination. Honest parties only ever see
/// [`OpenOutcome::bit`]; the variant is ground truth for checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenOutcome {
    Revealed(bool),
    /// The anti-combination of a dual lockbox was presented.
    Complement(bool),
    /// The box is (now) destroyed and answered with a coin flip.
    Garbled(bool),
    /// The box is destroyed and the world is configured to say so.
    DestroyedMarker,
}

impl OpenOutcome {
    pub fn bit(self) -> Option<bool> {
        match self {
            OpenOutcome::Revealed(b) | OpenOutcome::Complement(b) | OpenOutcome::Garbled(b) => Some(b),
            OpenOutcome::DestroyedMarker => None,
        }
    }

    pub fn is_genuine(self) -> bool {
        matches!(self, OpenOutcome::Revealed(_) | OpenOutcome::Complement(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinationLockbox {
    serial: Serial,
    bit: bool,
    combo: Combination,
    status: Status,
}

impl CombinationLockbox {
    pub fn new(bit: bool, combo: Combination, serial: Serial) -> Self {
        CombinationLockbox {
            serial,
            bit,
            combo,
            status: Status::Intact,
        }
    }

    pub fn serial(&self) -> Serial {
        self.serial
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn combination_len(&self) -> u32 {
        self.combo.len()
    }

    pub fn try_open(&mut self, guess: Combination, coins: &mut dyn Coins, marker: bool) -> OpenOutcome {
        if self.status == Status::Intact && guess == self.combo {
            return OpenOutcome::Revealed(self.bit);
        }
        self.status = Status::Destroyed;
        garbled(coins, marker)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLockbox {
    serial: Serial,
    bit: bool,
    combo: Combination,
    anti_combo: Combination,
    status: Status,
}

impl DualLockbox {
    pub fn new(bit: bool, combo: Combination, anti_combo: Combination, serial: Serial) -> Result<Self> {
        if combo == anti_combo {
            return Err(Error::IdenticalCombinations);
        }
        if combo.len() != anti_combo.len() {
            return Err(Error::invalid("anti_combo", "must have the same length as combo"));
        }
        Ok(DualLockbox {
            serial,
            bit,
            combo,
            anti_combo,
            status: Status::Intact,
        })
    }

    /// Fresh dual box with an anti-combination drawn uniformly from the
    /// remaining combinations of the same length.
    pub fn random(bit: bool, len: u32, serial: Serial, coins: &mut dyn Coins) -> Result<Self> {
        let space = Combination::space(len)?;
        if space < 2 {
            return Err(Error::BadCombinationLength(len));
        }
        let combo = coins.below(space);
        let mut anti = coins.below(space - 1);
        if anti >= combo {
            anti += 1;
        }
        Self::new(bit, Combination::new(combo, len)?, Combination::new(anti, len)?, serial)
    }

    pub fn serial(&self) -> Serial {
        self.serial
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn try_open(&mut self, guess: Combination, coins: &mut dyn Coins, marker: bool) -> OpenOutcome {
        if self.status == Status::Intact {
            if guess == self.combo {
                return OpenOutcome::Revealed(self.bit);
            }
            if guess == self.anti_combo {
                return OpenOutcome::Complement(!self.bit);
            }
        }
        self.status = Status::Destroyed;
        garbled(coins, marker)
    }

    pub(crate) fn combinations(&self) -> (Combination, Combination) {
        (self.combo, self.anti_combo)
    }
}

fn garbled(coins: &mut dyn Coins, marker: bool) -> OpenOutcome {
    if marker {
        OpenOutcome::DestroyedMarker
    } else {
        OpenOutcome::Garbled(coins.bit())
    }
}

impl WorldState {
    /// Fills the minted serial `serial` with a lockbox held by `creator` where she stands.
    pub fn create_lockbox(&mut self, creator: Party, bit: bool, combo: Combination, serial: Serial) -> Result<ObjectId> {
        let at = self.party_location(creator);
        self.register(
            serial,
            Payload::Lockbox(CombinationLockbox::new(bit, combo, serial)),
            vec![Placement::new(at, creator)],
        )?;
        Ok(ObjectId::single(serial))
    }

    pub fn create_dual_lockbox(&mut self, creator: Party, lockbox: DualLockbox) -> Result<ObjectId> {
        let at = self.party_location(creator);
        let serial = lockbox.serial();
        self.register(serial, Payload::Dual(lockbox), vec![Placement::new(at, creator)])?;
        Ok(ObjectId::single(serial))
    }

    /// Presents `guess` to a single or dual lockbox held by `actor`.
    pub fn open_lockbox(
        &mut self,
        actor: Party,
        id: ObjectId,
        guess: Combination,
        coins: &mut dyn Coins,
    ) -> Result<OpenOutcome> {
        self.require_possession(actor, id)?;
        let marker = self.rules.destroyed_returns_marker;
        match self.payload_mut(id.serial) {
            Some(Payload::Lockbox(b)) => Ok(b.try_open(guess, coins, marker)),
            Some(Payload::Dual(b)) => Ok(b.try_open(guess, coins, marker)),
            Some(_) => Err(Error::WrongObjectKind { object: id }),
            None => Err(Error::UnknownObject(id)),
        }
    }

    pub fn lockbox_status(&self, id: ObjectId) -> Result<Status> {
        match self.record(id.serial).map(|r| &r.payload) {
            Some(Payload::Lockbox(b)) => Ok(b.status()),
            Some(Payload::Dual(b)) => Ok(b.status()),
            Some(_) => Err(Error::WrongObjectKind { object: id }),
            None => Err(Error::UnknownObject(id)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chance::{for_each_path, Prob, SeededCoins};
    use crate::world::{Location, LocationGraph};
    use proptest::prelude::*;

    fn combo(s: &str) -> Combination {
        s.parse().unwrap()
    }

    fn world_with_serials(n: usize) -> (WorldState, Vec<Serial>) {
        let mut w = WorldState::new(LocationGraph::line(3), Location(0), Location(2), Location(1)).unwrap();
        let s = w.mint_serials(n, 0).unwrap();
        (w, s)
    }

    #[test]
    fn create_then_open_with_combination() {
        let (mut w, s) = world_with_serials(5);
        let id = w.create_lockbox(Party::Alice, true, combo("0101"), s[4]).unwrap();
        let mut coins = SeededCoins::new(0);
        let out = w.open_lockbox(Party::Alice, id, combo("0101"), &mut coins).unwrap();
        assert_eq!(out, OpenOutcome::Revealed(true));
        assert_eq!(w.lockbox_status(id).unwrap(), Status::Intact);
    }

    #[test]
    fn empty_combination_rejected() {
        assert_eq!("".parse::<Combination>(), Err(Error::BadCombinationLength(0)));
        assert_eq!(Combination::new(0, 0), Err(Error::BadCombinationLength(0)));
    }

    #[test]
    fn reused_serial_rejected() {
        let (mut w, s) = world_with_serials(1);
        w.create_lockbox(Party::Alice, false, combo("1"), s[0]).unwrap();
        assert_eq!(
            w.create_lockbox(Party::Alice, true, combo("0"), s[0]),
            Err(Error::DuplicateSerial(s[0]))
        );
    }

    #[test]
    fn correct_combination_reveals_and_keeps_box() {
        let mut b = CombinationLockbox::new(false, combo("110"), Serial(0));
        let mut coins = SeededCoins::new(1);
        assert_eq!(b.try_open(combo("110"), &mut coins, false), OpenOutcome::Revealed(false));
        assert_eq!(b.try_open(combo("110"), &mut coins, false), OpenOutcome::Revealed(false));
        assert_eq!(b.status(), Status::Intact);
    }

    #[test]
    fn wrong_combination_destroys_for_good() {
        let mut b = CombinationLockbox::new(true, combo("110"), Serial(0));
        let mut coins = SeededCoins::new(2);
        assert!(matches!(b.try_open(combo("111"), &mut coins, false), OpenOutcome::Garbled(_)));
        assert_eq!(b.status(), Status::Destroyed);
        assert!(matches!(b.try_open(combo("110"), &mut coins, false), OpenOutcome::Garbled(_)));
    }

    #[test]
    fn destroyed_box_answers_fair_coins() {
        let mut b = CombinationLockbox::new(true, combo("1010"), Serial(0));
        let mut coins = SeededCoins::new(7);
        b.try_open(combo("0000"), &mut coins, false);
        let ones = (0..10_000)
            .filter(|_| b.try_open(combo("1010"), &mut coins, false).bit().unwrap())
            .count();
        let mean = ones as f64 / 10_000.0;
        assert!((mean - 0.5).abs() <= 0.02, "mean {mean}");
    }

    #[test]
    fn marker_mode_flags_destroyed_boxes() {
        let mut b = CombinationLockbox::new(true, combo("10"), Serial(0));
        let mut coins = SeededCoins::new(0);
        assert_eq!(b.try_open(combo("01"), &mut coins, true), OpenOutcome::DestroyedMarker);
        assert_eq!(b.try_open(combo("10"), &mut coins, true).bit(), None);
    }

    #[test]
    fn dual_box_anti_combination_shows_complement() {
        let mut coins = SeededCoins::new(0);
        let mut b = DualLockbox::new(true, combo("0011"), combo("1001"), Serial(0)).unwrap();
        assert_eq!(b.try_open(combo("1001"), &mut coins, false), OpenOutcome::Complement(false));
        assert_eq!(b.try_open(combo("0011"), &mut coins, false), OpenOutcome::Revealed(true));
        assert!(matches!(b.try_open(combo("1111"), &mut coins, false), OpenOutcome::Garbled(_)));
        assert_eq!(b.status(), Status::Destroyed);
        assert!(!b.try_open(combo("0011"), &mut coins, false).is_genuine());
    }

    #[test]
    fn dual_box_requires_distinct_combinations() {
        assert_eq!(
            DualLockbox::new(false, combo("01"), combo("01"), Serial(0)),
            Err(Error::IdenticalCombinations)
        );
    }

    #[test]
    fn opening_requires_possession() {
        let (mut w, s) = world_with_serials(1);
        let id = w.create_lockbox(Party::Alice, true, combo("1"), s[0]).unwrap();
        let mut coins = SeededCoins::new(0);
        assert!(matches!(
            w.open_lockbox(Party::Eve, id, combo("1"), &mut coins),
            Err(Error::NotInPossession { .. })
        ));
    }

    /// Every strategy that does not know the combination: present one guess
    /// (or none), then announce a function of what came out. Success means the
    /// announced bit is right and the box survived.
    #[test]
    fn guessing_without_the_combination_is_bounded() {
        for len in 1..=3u32 {
            let space = 1u64 << len;
            let bound = Prob::new(1, 2) + Prob::new(1, space as u128);
            // guess: None or Some(g); rule: 0 const0, 1 const1, 2 copy, 3 negate
            for guess in std::iter::once(None).chain((0..space).map(Some)) {
                for rule in 0..4u8 {
                    let mut p = Prob::from_integer(0);
                    for_each_path(
                        |c| {
                            let bit = c.bit();
                            let secret = Combination::new(c.below(space), len).unwrap();
                            let mut b = CombinationLockbox::new(bit, secret, Serial(0));
                            let seen = guess.map(|g| {
                                b.try_open(Combination::new(g, len).unwrap(), c, false).bit().unwrap()
                            });
                            let said = match (rule, seen) {
                                (0, _) => false,
                                (1, _) => true,
                                (2, Some(s)) => s,
                                (3, Some(s)) => !s,
                                (_, None) => false,
                                _ => unreachable!(),
                            };
                            said == bit && b.status() == Status::Intact
                        },
                        |q, ok| {
                            if ok {
                                p += q
                            }
                        },
                    );
                    assert!(p <= bound, "len {len} guess {guess:?} rule {rule}: {p} > {bound}");
                }
            }
        }
    }

    /// Copying a box needs the combination: the best an outsider can do is one
    /// lucky guess, so two boxes that both reveal the bit under the real
    /// combination appear with probability at most the guess bound.
    #[test]
    fn copies_without_the_combination_are_bounded() {
        let len = 2u32;
        let space = 1u64 << len;
        let bound = Prob::new(1, 2) + Prob::new(1, space as u128);
        let mut best = Prob::from_integer(0);
        for guess in std::iter::once(None).chain((0..space).map(Some)) {
            for copy_combo in 0..space {
                for rule in 0..4u8 {
                    let mut p = Prob::from_integer(0);
                    for_each_path(
                        |c| {
                            let bit = c.bit();
                            let secret = Combination::new(c.below(space), len).unwrap();
                            let mut orig = CombinationLockbox::new(bit, secret, Serial(0));
                            let seen = guess.map(|g| {
                                orig.try_open(Combination::new(g, len).unwrap(), c, false).bit().unwrap()
                            });
                            let copy_bit = match (rule, seen) {
                                (1, _) => true,
                                (2, Some(s)) => s,
                                (3, Some(s)) => !s,
                                _ => false,
                            };
                            let mut copy = CombinationLockbox::new(copy_bit, Combination::new(copy_combo, len).unwrap(), Serial(1));
                            let a = orig.try_open(secret, c, false);
                            let b = copy.try_open(secret, c, false);
                            a == OpenOutcome::Revealed(bit) && b == OpenOutcome::Revealed(bit)
                        },
                        |q, ok| {
                            if ok {
                                p += q
                            }
                        },
                    );
                    best = best.max(p);
                }
            }
        }
        assert!(best <= bound);
        assert_eq!(best, Prob::new(1, space as u128), "one lucky guess is the optimum");
    }

    proptest! {
        #[test]
        fn status_never_returns_to_intact(guesses in proptest::collection::vec(0u64..8, 1..20), seed in any::<u64>()) {
            let secret = combo("101");
            let mut b = CombinationLockbox::new(true, secret, Serial(0));
            let mut coins = SeededCoins::new(seed);
            let mut destroyed = false;
            for g in guesses {
                b.try_open(Combination::new(g, 3).unwrap(), &mut coins, false);
                destroyed |= g != secret.value();
                prop_assert_eq!(b.status() == Status::Destroyed, destroyed);
            }
        }
    }
}
