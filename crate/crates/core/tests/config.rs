use proptest::prelude::*;

use lockbox_core::engine::{Action, Phase};
use lockbox_core::protocols::{ProtocolSpec, TheoryKind, TheorySpec};
use lockbox_core::scenario::{Config, EveSpec, SearchSpec, Summary, Tally, WorldSpec};
use lockbox_core::search::{strategy_at, Objective};

#[test]
fn shipped_scenarios_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let config = Config::from_toml(&text).unwrap();
        assert_eq!(Config::from_toml(&config.to_toml()).unwrap(), config);
        seen += 1;
    }
    assert!(seen >= 5);
}

#[test]
fn errors_name_the_field() {
    let missing = Config::from_toml("[protocol]\nname = \"kd_lbp\"\nn = 3\nm = 1\n").unwrap_err();
    assert!(missing.0.contains("theory"), "{missing}");
    let unknown = Config::from_toml("[theory]\nkind = \"lbp\"\n[protocol]\nname = \"kd_lbp\"\nn = 3\nm = 1\nq = 2\n").unwrap_err();
    assert!(unknown.0.contains('q'), "{unknown}");
    let bad = Config::from_toml("[theory]\nkind = \"lbp\"\n[protocol]\nname = \"kd_lbp\"\nn = 3\nm = 3\n").unwrap_err();
    assert!(bad.0.contains("protocol.m"), "{bad}");
    let world = Config::from_toml("[world]\neve = 2\n[theory]\nkind = \"lbp\"\n[protocol]\nname = \"kd_lbp\"\nn = 3\nm = 1\n").unwrap_err();
    assert!(world.0.contains("world.eve"), "{world}");
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        Just(Action::Pass),
        (0u64..4).prop_map(|guess| Action::TryOpen { guess }),
        Just(Action::Flip),
        Just(Action::Value),
        Just(Action::Substitute),
        Just(Action::Withhold),
        Just(Action::Delay),
        Just(Action::OpenRcp),
        Just(Action::ReadReplace),
    ]
}

fn theory_and_protocol() -> impl Strategy<Value = (TheorySpec, ProtocolSpec)> {
    let bits = 1u32..9;
    prop_oneof![
        (bits.clone(), 2usize..12, any::<bool>()).prop_map(|(c, n, hash)| (
            TheorySpec::new(TheoryKind::Combination).with_bits(c),
            ProtocolSpec::KdCombination { n, m: n / 2, sigma: 0, hash }
        )),
        (2usize..12, 0usize..2, any::<bool>()).prop_map(|(n, sigma, ro)| (
            TheorySpec::new(if ro { TheoryKind::LbpReadOnce } else { TheoryKind::Lbp }),
            ProtocolSpec::KdLbp { n, m: 1, sigma, hash: true }
        )),
        (bits.clone(), proptest::option::of(any::<bool>()), 1u32..4).prop_map(|(c, bit, reads)| (
            TheorySpec::new(TheoryKind::Combination).with_bits(c),
            ProtocolSpec::BcSingle { bit, verify_reads: reads, claim_flipped: false }
        )),
        (2u32..9, 1usize..5, any::<bool>()).prop_map(|(c, k, flip)| (
            TheorySpec::new(TheoryKind::Dual).with_bits(c),
            ProtocolSpec::BcHarrow { k, bit: None, claim_flipped: flip }
        )),
        (4usize..20, 1usize..4, 0.5f64..0.99).prop_map(|(n, w, confidence)| (
            TheorySpec::new(TheoryKind::LbpReadOnce),
            ProtocolSpec::KsReadonce { n, w, sigma: 0, confidence, hash: false }
        )),
        (1usize..6, proptest::option::of(0usize..3), any::<bool>()).prop_map(|(n, threshold, twin)| {
            let mut t = TheorySpec::new(TheoryKind::Rcp);
            t.rcp_open_consumes_twin = twin;
            (t, ProtocolSpec::KsRcp { n, threshold })
        }),
    ]
}

fn eve() -> impl Strategy<Value = EveSpec> {
    prop_oneof![
        Just(EveSpec::Passive),
        (prop_oneof![Just(Phase::Transit), Just(Phase::Intrusion), Just(Phase::Open)], 0usize..5, action())
            .prop_map(|(phase, count, action)| EveSpec::FirstK { phase, count, action }),
        (0u128..10).prop_map(|i| EveSpec::Tree {
            tree: strategy_at(&[Action::Pass, Action::Value, Action::Flip], 2, i)
        }),
    ]
}

fn search() -> impl Strategy<Value = Option<SearchSpec>> {
    proptest::option::of(
        (
            prop_oneof![
                Just(Objective::KeyKnowledge),
                Just(Objective::Equivocation),
                Just(Objective::UndetectedRead)
            ],
            0usize..4,
            proptest::collection::vec(action(), 1..4),
            proptest::option::of(1u64..1_000_000),
        )
            .prop_map(|(objective, horizon, menu, cap)| SearchSpec { objective, horizon, menu, cap }),
    )
}

proptest! {
    #[test]
    fn generated_configs_round_trip((theory, protocol) in theory_and_protocol(), eve in eve(), search in search()) {
        let config = Config { world: WorldSpec::default(), theory, protocol, eve, search };
        prop_assume!(config.validate().is_ok());
        let text = config.to_toml();
        prop_assert_eq!(Config::from_toml(&text).unwrap(), config);
    }

    #[test]
    fn tally_merge_is_associative(xs in proptest::collection::vec((0u64..3, 0u64..3, 0u64..10), 3)) {
        let tallies: Vec<Tally> = xs
            .iter()
            .map(|&(a, d, k)| Tally { trials: 3, accepted: a, detected: d, key_bits: k, ..Tally::default() })
            .collect();
        let left = tallies[0].clone().merge(tallies[1].clone()).merge(tallies[2].clone());
        let right = tallies[0].clone().merge(tallies[1].clone().merge(tallies[2].clone()));
        let swapped = tallies[2].clone().merge(tallies[0].clone()).merge(tallies[1].clone());
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &swapped);
        prop_assert_eq!(Summary::from(&left), Summary::from(&right));
    }
}
