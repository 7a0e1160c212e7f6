use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use otlab::checksim::*;
use otlab::security::CheatParams;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{emit, to_json, CliError, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliceChoice {
    Honest,
    LearnY,
    /// Amplitudes from `--a --b --c`, or `--alpha` for `(1, cos α, sin α)/√2`.
    Param,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BobChoice {
    Honest,
    Computational,
    /// Phase `e^{i angle}` on `|2>` after the honest gate.
    Phase,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ChecksimArgs {
    /// 2: only Bob checks; 3: both parties check.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub protocol: u8,
    #[arg(long, value_enum, default_value_t = AliceChoice::Honest)]
    pub alice: AliceChoice,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, conflicts_with_all = ["a", "b", "c"])]
    pub alpha: Option<f64>,
    /// Cheat on this fraction of instances and play honestly on the rest.
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long, value_enum, default_value_t = BobChoice::Honest)]
    pub bob: BobChoice,
    #[arg(long, default_value_t = 0.0)]
    pub angle: f64,
    /// Tables generated per attempt.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    /// Checked tables for each checking party.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long)]
    pub k_bob: Option<usize>,
    #[arg(long)]
    pub k_alice: Option<usize>,
    /// Size `m` and `k` for this many delivered tables with `k = ⌈L^1.1⌉`.
    #[arg(long, conflicts_with_all = ["m", "k", "k_bob", "k_alice"])]
    pub deliver: Option<usize>,
    /// Failures tolerated before aborting.
    #[arg(long, default_value_t = 0)]
    pub threshold: usize,
    #[arg(long)]
    pub threshold_alice: Option<usize>,
    /// Tolerate this fraction of checked tables instead of a fixed count.
    #[arg(long, conflicts_with_all = ["threshold", "threshold_alice"])]
    pub threshold_fraction: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 0)]
    pub max_restarts: usize,
    /// Include every checked table in the reports.
    #[arg(long)]
    pub record_checks: bool,
    /// Omit per-trial reports.
    #[arg(long)]
    pub summary_only: bool,
    /// Print abort probability against these check counts instead of a single run.
    #[arg(long, value_delimiter = ',')]
    pub detection: Option<Vec<usize>>,
}

fn alice_strategy(args: &ChecksimArgs) -> Result<AliceStrategy, CliError> {
    let kind = match args.alice {
        AliceChoice::Honest => AliceKind::Honest,
        AliceChoice::LearnY => AliceKind::LearnY,
        AliceChoice::Param => {
            let params = match (args.alpha, args.a, args.b, args.c) {
                (Some(alpha), ..) => CheatParams::example1(alpha)?,
                (None, Some(a), Some(b), Some(c)) => CheatParams::normalized(a, b, c)?,
                _ => {
                    return Err(CliError::Usage(
                        "--alice param needs --alpha or all of --a --b --c".into(),
                    ))
                }
            };
            AliceKind::Param(params)
        }
    };
    Ok(match args.phi {
        None => AliceStrategy {
            kind,
            report: ReportPolicy::Optimal,
        },
        Some(phi) if (0.0..=1.0).contains(&phi) => AliceStrategy::mixed(phi, kind),
        Some(phi) => return Err(CliError::Usage(format!("--phi {phi} outside [0, 1]"))),
    })
}

fn bob_strategy(args: &ChecksimArgs) -> BobStrategy {
    match args.bob {
        BobChoice::Honest => BobStrategy::Honest,
        BobChoice::Computational => BobStrategy::ComputationalBasis,
        BobChoice::Phase => BobStrategy::PhaseNoise(args.angle),
    }
}

fn config(args: &ChecksimArgs, seed: u64) -> CheckConfig {
    let sized = args.deliver.map(CheckConfig::for_delivered);
    let (m, k_bob, k_alice) = match &sized {
        Some(c) => (c.m, c.k_bob, c.k_alice),
        None => (
            args.m,
            args.k_bob.unwrap_or(args.k),
            args.k_alice.unwrap_or(args.k),
        ),
    };
    let (threshold_bob, threshold_alice) = match args.threshold_fraction {
        Some(f) => (Threshold::Fraction(f), Threshold::Fraction(f)),
        None => (
            Threshold::Count(args.threshold),
            Threshold::Count(args.threshold_alice.unwrap_or(args.threshold)),
        ),
    };
    CheckConfig {
        m,
        k_bob,
        k_alice,
        threshold_bob,
        threshold_alice,
        trials: args.trials,
        seed,
        c1: args.c1,
        max_restarts: args.max_restarts,
        record_checks: args.record_checks,
    }
}

/// Points where the abort probability drops by more than the combined 3σ noise.
fn monotonicity_breaks(points: &[DetectionPoint]) -> usize {
    let sigma = |p: &DetectionPoint| {
        let q = p.abort.probability;
        (q * (1.0 - q) / p.abort.trials as f64).sqrt()
    };
    let mut sorted: Vec<&DetectionPoint> = points.iter().collect();
    sorted.sort_by_key(|p| p.k);
    sorted
        .windows(2)
        .filter(|w| {
            let tol = 3.0 * (sigma(w[0]).powi(2) + sigma(w[1]).powi(2)).sqrt();
            w[1].abort.probability < w[0].abort.probability - tol
        })
        .count()
}

pub fn run(
    args: &ChecksimArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<(Status, Vec<PathBuf>), CliError> {
    let alice = alice_strategy(args)?;
    let bob = bob_strategy(args);
    if args.protocol == 2 && bob != BobStrategy::Honest {
        return Err(CliError::Usage(
            "only honest Bob is modeled in protocol 2".into(),
        ));
    }
    let honest = alice.is_honest() && bob == BobStrategy::Honest;

    if let Some(ks) = &args.detection {
        let threshold = match args.threshold_fraction {
            Some(f) => Threshold::Fraction(f),
            None => Threshold::Count(args.threshold),
        };
        let party = if args.protocol == 2 || bob == BobStrategy::Honest {
            Party::Alice(alice)
        } else {
            Party::Bob(bob)
        };
        let points = detection_curve(&party, ks, threshold, args.trials, seed)?;
        let breaks = monotonicity_breaks(&points);
        let honest_aborts: usize = if honest {
            points.iter().map(|p| p.abort.aborts).sum()
        } else {
            0
        };
        let text = to_json(&json!({
            "party": party,
            "threshold": threshold,
            "points": points,
            "monotonicity_breaks": breaks,
        }));
        let written = emit(&text, out)?;
        return Ok((Status::from_violations(breaks + honest_aborts), written));
    }

    let cfg = config(args, seed);
    let run = if args.protocol == 2 {
        run_protocol2(&cfg, &alice)?
    } else {
        run_protocol3(&cfg, &alice, bob)?
    };
    let aborts = run.summary.bob_abort.aborts + run.summary.alice_abort.map_or(0, |a| a.aborts);
    let violations = if honest { aborts } else { 0 };
    let text = if args.summary_only {
        to_json(&json!({ "config": cfg, "summary": run.summary }))
    } else {
        to_json(&json!({ "config": cfg, "reports": run.reports, "summary": run.summary }))
    };
    let written = emit(&text, out)?;
    Ok((Status::from_violations(violations), written))
}
