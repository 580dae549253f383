pub mod axioms;
pub mod chance;
pub mod engine;
pub mod error;
pub mod lbp;
pub mod lockbox;
pub mod pa;
pub mod protocols;
pub mod rcp;
pub mod scenario;
pub mod search;
pub mod stats;
pub mod transcript;
pub mod world;

pub use error::{Error, Result};

/// Default limit on the number of objects an exhaustive search may visit.
pub const DEFAULT_CAP: u128 = 10_000_000;
