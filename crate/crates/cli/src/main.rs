use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use lockbox_core::axioms::axiom_matrix;
use lockbox_core::engine::{ProtocolOutcome, Verdict};
use lockbox_core::scenario::{run_trial, Config, Summary, Tally};
use lockbox_core::search::{best_attack, ProtocolGame};

#[derive(Parser)]
#[command(name = "lockbox", version, about = "Simulate lockbox theories and the protocols built on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials of a scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Directory for transcripts, summary.json and witness.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check every theory against the axioms on the built-in scenarios.
    AxiomMatrix {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure kinds, mapped to exit codes.
enum Failure {
    Claim(String),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            out,
            format,
        } => run(&config, seed, trials, out.as_deref(), format),
        Command::AxiomMatrix { format, out } => matrix(format, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claim(msg)) => {
            eprintln!("claim failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_json(path: &Path, value: serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(&value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn transcript_name(trial: u64) -> String {
    format!("trial_{trial:06}.jsonl")
}

fn run(path: &Path, seed: u64, trials: u64, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = Config::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))?;
    let transcripts = out.map(|d| d.join("transcripts"));
    if let Some(dir) = &transcripts {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let outcomes: Vec<ProtocolOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<ProtocolOutcome> {
            let (transcript, outcome) = run_trial(&config, seed, i, transcripts.is_some())?;
            if let Some(dir) = &transcripts {
                let file = dir.join(transcript_name(i));
                fs::write(&file, transcript.to_jsonl()).with_context(|| format!("writing {}", file.display()))?;
            }
            Ok(outcome)
        })
        .collect::<Result<_>>()?;
    let tally = outcomes.iter().map(Tally::of).fold(Tally::default(), Tally::merge);
    let summary = Summary::from(&tally);

    let witness = match &config.search {
        Some(search) => {
            let game = ProtocolGame {
                world: config.world.clone(),
                theory: config.theory.clone(),
                protocol: config.protocol.clone(),
                objective: search.objective,
                menu: search.menu.clone(),
                horizon: search.horizon,
            };
            let cap = search.cap.map_or(lockbox_core::DEFAULT_CAP, u128::from);
            Some(best_attack(&game, cap).context("searching for the best attack")?)
        }
        None => None,
    };

    if let Some(dir) = out {
        write_json(&dir.join("summary.json"), json!(summary))?;
        if let Some(w) = &witness {
            write_json(&dir.join("witness.json"), json!(w))?;
        }
    }
    match format {
        Format::Json => {
            let report = json!({ "protocol": config.protocol.name(), "summary": summary, "witness": witness });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        Format::Table => {
            println!("protocol          {}", config.protocol.name());
            println!("trials            {}", summary.trials);
            println!("acceptance rate   {:.4}", summary.acceptance_rate);
            println!("mean key length   {:.3}", summary.mean_key_length);
            println!(
                "detection rate    {:.4}  [{:.4}, {:.4}]",
                summary.detection_rate, summary.detection_interval[0], summary.detection_interval[1]
            );
            println!("keys disagree     {}", summary.keys_disagree);
            for (reason, n) in &summary.aborts {
                println!("abort {reason:<12}{n}");
            }
            if let Some(w) = &witness {
                println!("best attack       {}/{}", w.numerator, w.denominator);
            }
        }
    }

    let failed = outcomes
        .iter()
        .filter(|o| matches!(o.verdict, Verdict::Analysis { holds: false, .. }))
        .count();
    if failed > 0 {
        return Err(Failure::Claim(format!("{failed} of {trials} trials contradict the analysed claim")));
    }
    Ok(())
}

fn matrix(format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let m = axiom_matrix().context("running the axiom suite")?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&m).expect("matrix serializes")),
        Format::Table => print!("{}", m.to_table()),
    }
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("axiom_matrix.json"), json!(m))?;
    }
    let bad = m.mismatches();
    if !bad.is_empty() {
        let cells: Vec<String> = bad
            .iter()
            .map(|(t, c)| format!("{} {}", t.name(), c.property.short()))
            .collect();
        return Err(Failure::Claim(format!("unexpected cells: {}", cells.join(", "))));
    }
    Ok(())
}
