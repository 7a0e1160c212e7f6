use std::path::{Path, PathBuf};

use clap::Args;
use otlab::protocol::{run_honest, OneTimeTable};
use otlab::rng::substream;
use serde::{Deserialize, Serialize};

use crate::output::{emit, CliError, Status};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TableArgs {
    /// Alice's input bit.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub x: u8,
    /// Bob's input bit.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub y: u8,
    /// Number of runs.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
}

#[derive(Debug, Serialize)]
struct Summary {
    n: u64,
    correct: u64,
    correctness_rate: f64,
    /// Fraction of runs with `e = 1`.
    e_ones_rate: f64,
    /// One binomial standard deviation of `e_ones_rate` around ½.
    sigma: f64,
}

#[derive(Serialize)]
struct SummaryLine {
    summary: Summary,
}

pub fn run(
    args: &TableArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<(Status, Vec<PathBuf>), CliError> {
    let mut rng = substream(seed, "table", 0);
    let (x, y) = (args.x == 1, args.y == 1);
    let mut text = String::new();
    let mut correct = 0;
    let mut ones = 0;
    for _ in 0..args.n {
        let (table, _) = run_honest(x, y, &mut rng);
        correct += u64::from(table.is_correct());
        ones += u64::from(table.e);
        text.push_str(&serde_json::to_string::<OneTimeTable>(&table).expect("table serializes"));
        text.push('\n');
    }
    let n = args.n as f64;
    let summary = Summary {
        n: args.n,
        correct,
        correctness_rate: correct as f64 / n,
        e_ones_rate: ones as f64 / n,
        sigma: (0.25 / n).sqrt(),
    };
    text.push_str(&serde_json::to_string(&SummaryLine { summary }).expect("summary serializes"));
    text.push('\n');
    let written = emit(&text, out)?;
    Ok((
        Status::from_violations((args.n - correct) as usize),
        written,
    ))
}
