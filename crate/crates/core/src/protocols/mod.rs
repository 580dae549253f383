//! The protocols and attacks, as honest-party code over a [`Session`].

mod bc;
mod kd;
mod ks;
mod trivial;

pub use bc::{bc_lbp_nogo, bc_single_concealment, NogoReport, SplitVerdict};
pub use trivial::{kd_trivial_impossible, trivial_bc_equivocable, TrivialBcReport, TrivialReport};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::chance::Coins;
use crate::engine::{Adversary, ProtocolOutcome, Session, Verdict, AbortReason};
use crate::error::{Error, Result};
use crate::transcript::Transcript;
use crate::world::{Rules, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryKind {
    Combination,
    Dual,
    Lbp,
    LbpReadOnce,
    Rcp,
    Trivial,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 6] = [
        TheoryKind::Combination,
        TheoryKind::Dual,
        TheoryKind::Lbp,
        TheoryKind::LbpReadOnce,
        TheoryKind::Rcp,
        TheoryKind::Trivial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoryKind::Combination => "combination",
            TheoryKind::Dual => "dual",
            TheoryKind::Lbp => "lbp",
            TheoryKind::LbpReadOnce => "lbp_read_once",
            TheoryKind::Rcp => "rcp",
            TheoryKind::Trivial => "trivial",
        }
    }
}

fn default_combination_bits() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySpec {
    pub kind: TheoryKind,
    #[serde(default = "default_combination_bits")]
    pub combination_bits: u32,
    #[serde(default)]
    pub destroyed_returns_marker: bool,
    #[serde(default)]
    pub rcp_open_consumes_twin: bool,
}

impl TheorySpec {
    pub fn new(kind: TheoryKind) -> Self {
        TheorySpec {
            kind,
            combination_bits: default_combination_bits(),
            destroyed_returns_marker: false,
            rcp_open_consumes_twin: false,
        }
    }

    pub fn with_bits(mut self, c: u32) -> Self {
        self.combination_bits = c;
        self
    }

    pub fn rules(&self) -> Rules {
        Rules {
            destroyed_returns_marker: self.destroyed_returns_marker,
            rcp_open_consumes_twin: self.rcp_open_consumes_twin,
        }
    }
}

fn yes() -> bool {
    true
}

fn one() -> u32 {
    1
}

fn confidence() -> f64 {
    0.95
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolSpec {
    KdCombination {
        n: usize,
        m: usize,
        #[serde(default)]
        sigma: usize,
        /// Draw a random full-rank hash; `false` uses the identity.
        #[serde(default = "yes")]
        hash: bool,
    },
    KdLbp {
        n: usize,
        m: usize,
        #[serde(default)]
        sigma: usize,
        #[serde(default = "yes")]
        hash: bool,
    },
    BcSingle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bit: Option<bool>,
        #[serde(default = "one")]
        verify_reads: u32,
        #[serde(default)]
        claim_flipped: bool,
    },
    BcDual {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bit: Option<bool>,
        #[serde(default)]
        claim_flipped: bool,
    },
    BcHarrow {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bit: Option<bool>,
        #[serde(default)]
        claim_flipped: bool,
    },
    BcLbpNogo {
        n: usize,
    },
    KsLbpPlain {
        n: usize,
    },
    KsReadonce {
        n: usize,
        w: usize,
        #[serde(default)]
        sigma: usize,
        #[serde(default = "confidence")]
        confidence: f64,
        #[serde(default = "yes")]
        hash: bool,
    },
    KsSerialList {
        n: usize,
    },
    KsRcp {
        n: usize,
        /// Most tampered pairs tolerated before aborting; default `n / 2`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threshold: Option<usize>,
    },
    KdTrivialImpossible {
        rounds: usize,
        boxes: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<u64>,
    },
}

impl ProtocolSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolSpec::KdCombination { .. } => "kd_combination",
            ProtocolSpec::KdLbp { .. } => "kd_lbp",
            ProtocolSpec::BcSingle { .. } => "bc_single",
            ProtocolSpec::BcDual { .. } => "bc_dual",
            ProtocolSpec::BcHarrow { .. } => "bc_harrow",
            ProtocolSpec::BcLbpNogo { .. } => "bc_lbp_nogo",
            ProtocolSpec::KsLbpPlain { .. } => "ks_lbp_plain",
            ProtocolSpec::KsReadonce { .. } => "ks_readonce",
            ProtocolSpec::KsSerialList { .. } => "ks_serial_list",
            ProtocolSpec::KsRcp { .. } => "ks_rcp",
            ProtocolSpec::KdTrivialImpossible { .. } => "kd_trivial_impossible",
        }
    }

    /// Theories the protocol can run on.
    pub fn theories(&self) -> &'static [TheoryKind] {
        use TheoryKind::*;
        match self {
            ProtocolSpec::KdCombination { .. } | ProtocolSpec::BcSingle { .. } => &[Combination],
            ProtocolSpec::KdLbp { .. } => &[Lbp, LbpReadOnce],
            ProtocolSpec::BcDual { .. } | ProtocolSpec::BcHarrow { .. } => &[Dual],
            ProtocolSpec::BcLbpNogo { .. } | ProtocolSpec::KsLbpPlain { .. } => &[Lbp],
            ProtocolSpec::KsReadonce { .. } | ProtocolSpec::KsSerialList { .. } => &[LbpReadOnce],
            ProtocolSpec::KsRcp { .. } => &[Rcp],
            ProtocolSpec::KdTrivialImpossible { .. } => &[Trivial],
        }
    }

    pub fn validate(&self, theory: &TheorySpec) -> Result<()> {
        if !self.theories().contains(&theory.kind) {
            return Err(Error::invalid(
                "theory.kind",
                format!("{} does not run on the {} theory", self.name(), theory.kind.name()),
            ));
        }
        let c = theory.combination_bits;
        if matches!(theory.kind, TheoryKind::Combination | TheoryKind::Dual)
            && !(1..=crate::lockbox::MAX_COMBINATION_BITS).contains(&c)
        {
            return Err(Error::BadCombinationLength(c));
        }
        match *self {
            ProtocolSpec::KdCombination { n, m, .. } | ProtocolSpec::KdLbp { n, m, .. } => {
                if !(n > m && m >= 1) {
                    return Err(Error::invalid("protocol.m", "need n > m >= 1"));
                }
            }
            ProtocolSpec::BcSingle { verify_reads: 0, .. } => {
                return Err(Error::invalid("protocol.verify_reads", "must be at least 1"));
            }
            ProtocolSpec::BcHarrow { k, .. } => {
                if k == 0 {
                    return Err(Error::invalid("protocol.k", "must be at least 1"));
                }
                if c < 2 {
                    return Err(Error::invalid("theory.combination_bits", "needs at least 2 bits"));
                }
            }
            ProtocolSpec::BcLbpNogo { n } if !(1..=4).contains(&n) => {
                return Err(Error::invalid("protocol.n", "between 1 and 4 pairs"));
            }
            ProtocolSpec::KsReadonce { n, w, confidence, .. } => {
                if w > n {
                    return Err(Error::invalid("protocol.w", "more marks than pairs"));
                }
                if !(confidence > 0.0 && confidence < 1.0) {
                    return Err(Error::invalid("protocol.confidence", "must lie strictly between 0 and 1"));
                }
            }
            ProtocolSpec::KdTrivialImpossible { boxes, .. } if boxes > 4 => {
                return Err(Error::invalid("protocol.boxes", "at most 4"));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Runs one protocol on a fresh world. Rule violations end the run with an
/// abort naming the offender; only [`Error::Halted`] and configuration
/// errors come back as `Err`.
pub fn run(
    mut world: WorldState,
    theory: &TheorySpec,
    protocol: &ProtocolSpec,
    coins: &mut dyn Coins,
    eve: &mut dyn Adversary,
    recording: bool,
) -> Result<(Transcript, ProtocolOutcome)> {
    protocol.validate(theory)?;
    world.rules = theory.rules();
    let c = theory.combination_bits;
    let mut s = Session::new(world, coins, eve, recording);
    s.note(
        "harness",
        "start",
        json!({ "protocol": protocol, "theory": theory }),
    );
    let read_once = theory.kind == TheoryKind::LbpReadOnce;
    let verdict = match *protocol {
        ProtocolSpec::KdCombination { n, m, sigma, hash } => kd::kd_combination(&mut s, n, m, c, sigma, hash),
        ProtocolSpec::KdLbp { n, m, sigma, hash } => kd::kd_lbp(&mut s, n, m, sigma, hash, read_once),
        ProtocolSpec::BcSingle {
            bit,
            verify_reads,
            claim_flipped,
        } => bc::bc_single(&mut s, bit, c, verify_reads, claim_flipped),
        ProtocolSpec::BcDual { bit, claim_flipped } => bc::bc_dual(&mut s, bit, c, claim_flipped),
        ProtocolSpec::BcHarrow { k, bit, claim_flipped } => bc::bc_harrow(&mut s, k, bit, c, claim_flipped),
        ProtocolSpec::BcLbpNogo { n } => bc_lbp_nogo(n).map(|r| r.verdict()),
        ProtocolSpec::KsLbpPlain { n } => ks::ks_lbp_plain(&mut s, n),
        ProtocolSpec::KsReadonce {
            n,
            w,
            sigma,
            confidence,
            hash,
        } => ks::ks_readonce(&mut s, n, w, sigma, confidence, hash),
        ProtocolSpec::KsSerialList { n } => ks::ks_serial_list(&mut s, n),
        ProtocolSpec::KsRcp { n, threshold } => ks::ks_rcp(&mut s, n, threshold.unwrap_or(n / 2)),
        ProtocolSpec::KdTrivialImpossible { rounds, boxes, cap } => {
            kd_trivial_impossible(rounds, boxes, cap.map_or(crate::DEFAULT_CAP, u128::from)).map(|r| r.verdict())
        }
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(Error::RuleViolation { party, detail }) => Verdict::Abort(AbortReason::RuleViolation { party, detail }),
        Err(e) => return Err(e),
    };
    Ok(s.finish(verdict))
}
