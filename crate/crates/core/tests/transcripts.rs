use std::path::PathBuf;

use lockbox_core::scenario::{outcome_from_events, run_trial, Config};
use lockbox_core::transcript::Transcript;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn golden_run() -> (Config, String) {
    let config = Config::from_toml(&std::fs::read_to_string(golden("kd_lbp_flip.toml")).unwrap()).unwrap();
    let text = run_trial(&config, 1, 0, true).unwrap().0.to_jsonl();
    (config, text)
}

/// Set `UPDATE_GOLDEN=1` to rewrite the expected file after an intended
/// change to the transcript format.
#[test]
fn matches_golden_file() {
    let (_, text) = golden_run();
    let path = golden("kd_lbp_flip.jsonl");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, expected);
}

#[test]
fn jsonl_round_trip() {
    let (_, text) = golden_run();
    let parsed = Transcript::from_jsonl(&text).unwrap();
    let again: String = parsed.iter().map(|e| serde_json::to_string(e).unwrap() + "\n").collect();
    assert_eq!(again, text);
}

#[test]
fn outcome_is_last_event_and_matches_run() {
    let (config, text) = golden_run();
    let events = Transcript::from_jsonl(&text).unwrap();
    assert_eq!(events.last().unwrap().kind, "outcome");
    let (_, outcome) = run_trial(&config, 1, 0, false).unwrap();
    assert_eq!(outcome_from_events(&events), Some(outcome));
}

#[test]
fn ticks_never_go_backwards() {
    let (_, text) = golden_run();
    let events = Transcript::from_jsonl(&text).unwrap();
    assert!(events.windows(2).all(|w| w[0].tick <= w[1].tick));
}

#[test]
fn unrecorded_runs_have_same_outcome() {
    let (config, _) = golden_run();
    for trial in 0..20 {
        let a = run_trial(&config, 5, trial, true).unwrap().1;
        let b = run_trial(&config, 5, trial, false).unwrap().1;
        assert_eq!(a, b);
    }
}
