//! The theory-by-axiom grid, each cell backed by a small exhaustive check.

use serde::Serialize;

use crate::chance::{for_each_path, Prob};
use crate::engine::Passive;
use crate::error::{Error, Result};
use crate::lockbox::Combination;
use crate::protocols::{self, bc_lbp_nogo, bc_single_concealment, kd_trivial_impossible, trivial_bc_equivocable};
use crate::protocols::{ProtocolSpec, TheoryKind, TheorySpec};
use crate::rcp::RcpReading;
use crate::scenario::WorldSpec;
use crate::search::{best_attack, canned_games, ProtocolGame};
use crate::world::{ObjectId, Party};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    NoBroadcast,
    NoSignaling,
    NoBitCommitment,
    KeyDistribution,
    KeyStorage,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::NoBroadcast,
        Property::NoSignaling,
        Property::NoBitCommitment,
        Property::KeyDistribution,
        Property::KeyStorage,
    ];

    pub fn short(self) -> &'static str {
        match self {
            Property::NoBroadcast => "NB",
            Property::NoSignaling => "NS",
            Property::NoBitCommitment => "NBC",
            Property::KeyDistribution => "KD",
            Property::KeyStorage => "KS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Holds,
    Violated,
    /// No scenario in the suite speaks to this cell.
    Unchecked,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Holds => "✓",
            Mark::Violated => "✗",
            Mark::Unchecked => "-",
        }
    }

    fn of(holds: bool) -> Mark {
        if holds {
            Mark::Holds
        } else {
            Mark::Violated
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub property: Property,
    pub mark: Mark,
    pub witness: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Mark>,
}

impl Cell {
    pub fn mismatch(&self) -> bool {
        self.expected.is_some_and(|e| e != self.mark)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub theory: TheoryKind,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Matrix {
    pub rows: Vec<Row>,
}

impl Matrix {
    pub fn mismatches(&self) -> Vec<(TheoryKind, &Cell)> {
        self.rows
            .iter()
            .flat_map(|r| r.cells.iter().filter(|c| c.mismatch()).map(move |c| (r.theory, c)))
            .collect()
    }

    pub fn cell(&self, theory: TheoryKind, property: Property) -> &Cell {
        let row = self.rows.iter().find(|r| r.theory == theory).expect("every theory has a row");
        row.cells.iter().find(|c| c.property == property).expect("every property has a cell")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<14}", "theory");
        for p in Property::ALL {
            out += &format!(" {:<4}", p.short());
        }
        out.push('\n');
        for row in &self.rows {
            out += &format!("{:<14}", row.theory.name());
            for c in &row.cells {
                let flag = if c.mismatch() { "!" } else { "" };
                out += &format!(" {:<4}", format!("{}{}", c.mark.symbol(), flag));
            }
            out.push('\n');
        }
        out.push('\n');
        for row in &self.rows {
            for c in row.cells.iter().filter(|c| c.mark != Mark::Unchecked) {
                out += &format!(
                    "{} {}: {} ({})\n",
                    row.theory.name(),
                    c.property.short(),
                    c.witness,
                    c.detail
                );
            }
        }
        out
    }
}

fn cell(property: Property, mark: Mark, witness: &str, detail: String) -> Cell {
    Cell {
        property,
        mark,
        witness: witness.into(),
        detail,
        expected: None,
    }
}

fn unchecked(property: Property) -> Cell {
    cell(property, Mark::Unchecked, "", String::new())
}

fn canned(name: &str) -> ProtocolGame {
    canned_games()
        .into_iter()
        .find(|c| c.name == name)
        .expect("canned game exists")
        .game
}

fn fmt(p: Prob) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// Probability over all randomness that a passive run ends with both sides
/// holding the same non-empty key.
fn passive_agreement(theory: &TheorySpec, protocol: &ProtocolSpec) -> Result<Prob> {
    let mut total = Prob::from_integer(0);
    let mut failure = None;
    for_each_path(
        |coins| {
            let world = WorldSpec::default().build()?;
            protocols::run(world, theory, protocol, coins, &mut Passive, false)
        },
        |p, r| match r {
            Ok((_, o)) if o.verdict.keys_agree() == Some(true) && o.verdict.key_len() > 0 => total += p,
            Ok(_) => {}
            Err(e) => failure = Some(e),
        },
    );
    failure.map_or(Ok(total), Err)
}

/// Serials are minted once and registered once: a second object under an
/// existing serial, or a second minting, is refused.
fn serial_conservation(theory: TheoryKind) -> Result<bool> {
    let mut w = WorldSpec::default().build()?;
    let serials = w.mint_serials(1, 0)?;
    let x = serials[0];
    let make = |w: &mut crate::world::WorldState| -> Result<()> {
        match theory {
            TheoryKind::Combination => w.create_lockbox(Party::Alice, false, Combination::new(0, 2)?, x).map(drop),
            TheoryKind::Dual => w
                .create_dual_lockbox(
                    Party::Alice,
                    crate::lockbox::DualLockbox::new(false, Combination::new(0, 2)?, Combination::new(1, 2)?, x)?,
                )
                .map(drop),
            TheoryKind::Lbp => w.create_pair(Party::Alice, x, false, false),
            TheoryKind::LbpReadOnce => w.create_pair(Party::Alice, x, false, true),
            TheoryKind::Rcp => w.create_rcp(Party::Alice, x),
            TheoryKind::Trivial => w.create_trivial(Party::Alice, x).map(drop),
        }
    };
    make(&mut w)?;
    let second = make(&mut w);
    let remint = w.mint_serials(1, 0);
    Ok(matches!(second, Err(Error::DuplicateSerial(_))) && matches!(remint, Err(Error::InitializationClosed)))
}

fn no_broadcast(theory: TheoryKind) -> Result<Cell> {
    let conserved = serial_conservation(theory)?;
    if theory == TheoryKind::Combination {
        // a copy would also need the bit, which Eve cannot read reliably
        let c = 2;
        let guess = bc_single_concealment(c)?;
        let bound = Prob::new(1, 2) + Prob::new(1, 1 << c);
        return Ok(cell(
            Property::NoBroadcast,
            Mark::of(conserved && guess <= bound),
            "serial_conservation+bc_single_concealment",
            format!("duplicate serial refused; best bit guess {} at c={c}", fmt(guess)),
        ));
    }
    Ok(cell(
        Property::NoBroadcast,
        Mark::of(conserved),
        "serial_conservation",
        "duplicate serial refused".into(),
    ))
}

/// Opening one RCP member never changes the other member's distribution.
fn rcp_no_signaling() -> Result<bool> {
    let mut marginals = Vec::new();
    for remote_open in [false, true] {
        let mut ones = Prob::from_integer(0);
        let mut failure = None;
        for_each_path(
            |coins| -> Result<RcpReading> {
                let mut w = WorldSpec::default().build()?;
                let x = w.mint_serials(1, 0)?[0];
                w.create_rcp(Party::Alice, x)?;
                w.teleport(ObjectId::half(x, 1), w.party_location(Party::Bob), Party::Bob)?;
                if remote_open {
                    w.open_rcp(Party::Alice, ObjectId::half(x, 0), coins)?;
                }
                w.open_rcp(Party::Bob, ObjectId::half(x, 1), coins)
            },
            |p, r| match r {
                Ok(RcpReading::Bit(true)) => ones += p,
                Ok(_) => {}
                Err(e) => failure = Some(e),
            },
        );
        if let Some(e) = failure {
            return Err(e);
        }
        marginals.push(ones);
    }
    Ok(marginals[0] == marginals[1])
}

fn no_signaling(theory: TheoryKind) -> Result<Cell> {
    Ok(match theory {
        TheoryKind::Lbp | TheoryKind::LbpReadOnce => cell(
            Property::NoSignaling,
            Mark::of(crate::lbp::no_signaling_holds(3, 3)),
            "pair_no_signaling",
            "remote sequences up to length 3 on 3 locations".into(),
        ),
        TheoryKind::Rcp => cell(
            Property::NoSignaling,
            Mark::of(rcp_no_signaling()?),
            "rcp_marginal",
            "twin's reading is 1/2 whether or not the other member was opened".into(),
        ),
        _ => cell(
            Property::NoSignaling,
            Mark::Holds,
            "local_objects",
            "objects have a single site and no shared state".into(),
        ),
    })
}

fn no_bit_commitment(theory: TheoryKind) -> Result<Cell> {
    Ok(match theory {
        TheoryKind::Combination => {
            let game = canned("bc_single_equivocation");
            let cheat = best_attack(&game, crate::DEFAULT_CAP)?.probability();
            let c = game.theory.combination_bits;
            let guess = bc_single_concealment(c)?;
            let binding = cheat <= Prob::new(1, 1 << c);
            let concealing = guess <= Prob::new(1, 2) + Prob::new(1, 1 << c);
            cell(
                Property::NoBitCommitment,
                Mark::of(!(binding && concealing)),
                "bc_single",
                format!("equivocation {}, bit guess {} at c={c}", fmt(cheat), fmt(guess)),
            )
        }
        TheoryKind::Dual => {
            let single = best_attack(&canned("bc_dual_equivocation"), crate::DEFAULT_CAP)?.probability();
            let game = canned("bc_harrow_equivocation");
            let cheat = best_attack(&game, crate::DEFAULT_CAP)?.probability();
            let c = game.theory.combination_bits;
            cell(
                Property::NoBitCommitment,
                Mark::of(cheat > Prob::new(1, 1 << c)),
                "bc_harrow",
                format!("single box equivocates with {}, multi-box with {} at c={c}", fmt(single), fmt(cheat)),
            )
        }
        TheoryKind::Lbp => {
            let n = 3;
            let report = bc_lbp_nogo(n)?;
            cell(
                Property::NoBitCommitment,
                Mark::of(report.all_broken()),
                "bc_lbp_nogo",
                format!("{} splits of {n} pairs all broken", report.splits.len()),
            )
        }
        TheoryKind::Rcp => {
            // Alice's commitment is whatever the pair says, and it says a
            // fair coin regardless of what she does first.
            cell(
                Property::NoBitCommitment,
                Mark::of(rcp_no_signaling()?),
                "rcp_marginal",
                "committer cannot choose the bit".into(),
            )
        }
        TheoryKind::Trivial => {
            let boxes = 2;
            let r = trivial_bc_equivocable(boxes)?;
            cell(
                Property::NoBitCommitment,
                Mark::of(r.concealing == r.equivocable),
                "trivial_bc_equivocable",
                format!("{} of {} concealing schemes equivocable", r.equivocable, r.concealing),
            )
        }
        TheoryKind::LbpReadOnce => unchecked(Property::NoBitCommitment),
    })
}

fn key_distribution(theory: TheoryKind) -> Result<Cell> {
    Ok(match theory {
        TheoryKind::Combination => {
            let game = canned("kd_combination_full_key");
            let agree = passive_agreement(&game.theory, &game.protocol)?;
            let attack = best_attack(&game, crate::DEFAULT_CAP)?.probability();
            let (n, m) = match game.protocol {
                ProtocolSpec::KdCombination { n, m, .. } => (n, m),
                _ => unreachable!(),
            };
            let bound = Prob::new(1, 1 << (game.theory.combination_bits as usize * (n - m)));
            cell(
                Property::KeyDistribution,
                Mark::of(agree == Prob::from_integer(1) && attack <= bound),
                "kd_combination",
                format!("passive agreement {}, best full-key attack {} <= {}", fmt(agree), fmt(attack), fmt(bound)),
            )
        }
        TheoryKind::Lbp | TheoryKind::LbpReadOnce => {
            let mut game = canned("kd_lbp_full_key");
            game.theory = TheorySpec::new(theory);
            let agree = passive_agreement(&game.theory, &game.protocol)?;
            let attack = best_attack(&game, crate::DEFAULT_CAP)?.probability();
            cell(
                Property::KeyDistribution,
                Mark::of(agree == Prob::from_integer(1) && attack == Prob::from_integer(0)),
                "kd_lbp",
                format!("passive agreement {}, best full-key attack {}", fmt(agree), fmt(attack)),
            )
        }
        TheoryKind::Trivial => {
            let r = kd_trivial_impossible(1, 2, crate::DEFAULT_CAP)?;
            cell(
                Property::KeyDistribution,
                Mark::of(!r.impossible()),
                "kd_trivial_impossible",
                format!("{} of {} agreeing protocols fully seen by eve", r.witnessed, r.agreeing),
            )
        }
        TheoryKind::Dual | TheoryKind::Rcp => unchecked(Property::KeyDistribution),
    })
}

fn key_storage(theory: TheoryKind) -> Result<Cell> {
    let game = |name: &str| -> Result<(Prob, Prob)> {
        let g = canned(name);
        let agree = passive_agreement(&g.theory, &g.protocol)?;
        Ok((agree, best_attack(&g, crate::DEFAULT_CAP)?.probability()))
    };
    Ok(match theory {
        TheoryKind::Lbp => {
            let (agree, read) = game("ks_lbp_plain_read")?;
            cell(
                Property::KeyStorage,
                Mark::of(agree == Prob::from_integer(1) && read == Prob::from_integer(0)),
                "ks_lbp_plain",
                format!("undetected read {}", fmt(read)),
            )
        }
        TheoryKind::LbpReadOnce => {
            let (agree, read) = game("ks_serial_list_read")?;
            cell(
                Property::KeyStorage,
                Mark::of(agree == Prob::from_integer(1) && read == Prob::from_integer(0)),
                "ks_serial_list",
                format!("passive recovery {}, undetected read {}", fmt(agree), fmt(read)),
            )
        }
        TheoryKind::Rcp => {
            let (agree, read) = game("ks_rcp_read")?;
            cell(
                Property::KeyStorage,
                Mark::of(agree == Prob::from_integer(1) && read == Prob::from_integer(0)),
                "ks_rcp",
                format!("passive agreement {}, undetected read {}", fmt(agree), fmt(read)),
            )
        }
        TheoryKind::Trivial => cell(
            Property::KeyStorage,
            Mark::Violated,
            "trivial_box",
            "boxes hold no bit to store".into(),
        ),
        TheoryKind::Combination | TheoryKind::Dual => unchecked(Property::KeyStorage),
    })
}

/// The classification the checks are expected to reproduce.
pub fn expected(theory: TheoryKind, property: Property) -> Option<Mark> {
    use Mark::*;
    use Property::*;
    use TheoryKind::*;
    match (theory, property) {
        (_, NoBroadcast) | (_, NoSignaling) => Some(Holds),
        (Combination, NoBitCommitment) | (Dual, NoBitCommitment) => Some(Violated),
        (Combination, KeyDistribution) => Some(Holds),
        (Lbp, NoBitCommitment) | (Lbp, KeyDistribution) => Some(Holds),
        (Lbp, KeyStorage) => Some(Violated),
        (LbpReadOnce, KeyStorage) | (Rcp, KeyStorage) => Some(Holds),
        (Trivial, NoBitCommitment) => Some(Holds),
        (Trivial, KeyDistribution) | (Trivial, KeyStorage) => Some(Violated),
        _ => None,
    }
}

pub fn row(theory: TheoryKind) -> Result<Row> {
    let mut cells = vec![
        no_broadcast(theory)?,
        no_signaling(theory)?,
        no_bit_commitment(theory)?,
        key_distribution(theory)?,
        key_storage(theory)?,
    ];
    for c in &mut cells {
        c.expected = expected(theory, c.property);
    }
    Ok(Row { theory, cells })
}

pub fn axiom_matrix() -> Result<Matrix> {
    use rayon::prelude::*;
    let rows = TheoryKind::ALL.par_iter().map(|&t| row(t)).collect::<Result<Vec<_>>>()?;
    Ok(Matrix { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_row() {
        let r = row(TheoryKind::Trivial).unwrap();
        let marks: Vec<Mark> = r.cells.iter().map(|c| c.mark).collect();
        use Mark::*;
        assert_eq!(marks, vec![Holds, Holds, Holds, Violated, Violated]);
    }

    #[test]
    fn full_matrix_matches_classification() {
        let m = axiom_matrix().unwrap();
        assert!(m.mismatches().is_empty(), "{}", m.to_table());
        assert_eq!(m.cell(TheoryKind::Combination, Property::NoBitCommitment).witness, "bc_single");
        assert_eq!(m.cell(TheoryKind::Lbp, Property::KeyStorage).mark, Mark::Violated);
    }
}
