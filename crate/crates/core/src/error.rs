use thiserror::Error;

use crate::world::{Location, ObjectId, Party, Serial};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("serials can only be minted while the world is being initialised")]
    InitializationClosed,

    #[error("serial {0} is already registered")]
    DuplicateSerial(Serial),

    #[error("serial {0} was never minted")]
    UnknownSerial(Serial),

    #[error("no object {0}")]
    UnknownObject(ObjectId),

    #[error("location {0} is not part of the world")]
    UnknownLocation(Location),

    #[error("{party} does not hold {object}")]
    NotInPossession { party: Party, object: ObjectId },

    #[error("{object} cannot jump from {from} to {to} in one tick")]
    SuperluminalMoveRejected {
        object: ObjectId,
        from: Location,
        to: Location,
    },

    #[error("{party} cannot move from {from} to {to} in one tick")]
    PartyMoveRejected {
        party: Party,
        from: Location,
        to: Location,
    },

    #[error("{giver} and {receiver} are not at the same location")]
    NotColocated { giver: Party, receiver: Party },

    #[error("combination must have between 1 and 32 bits, got {0}")]
    BadCombinationLength(u32),

    #[error("combination and anti-combination must differ")]
    IdenticalCombinations,

    #[error("{object} has the wrong kind for this operation")]
    WrongObjectKind { object: ObjectId },

    #[error("flip applied at {at}, but neither half of the pair is there")]
    NotAtBox { at: Location },

    #[error("expected a vector of length {expected}, got {actual}")]
    DimensionError { expected: usize, actual: usize },

    #[error("search space has {count} strategies, above the cap of {cap}")]
    BudgetExceeded { count: u128, cap: u128 },

    #[error("rule violation by {party}: {detail}")]
    RuleViolation { party: Party, detail: String },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Raised by search players to cut a run short; never escapes the search module.
    #[error("run halted by the search driver")]
    Halted,
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
