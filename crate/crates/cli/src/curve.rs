use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use otlab::security::{tradeoff_curve, TradeoffSample};
use serde::{Deserialize, Serialize};

use crate::output::{emit, sibling, to_json, CliError, Status};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    /// Haar samples of the two-qutrit input.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub bin_width: f64,
    /// Added to `1 - left edge` before evaluating the envelope `h(δ)`.
    #[arg(long, default_value_t = 0.005)]
    pub slack: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    n_samples: usize,
    bin_width: f64,
    seed: u64,
    bins: usize,
    /// Largest `χ_y + max(χ_r, χ_{y⊕r})`.
    max_sum: f64,
    argmax: TradeoffSample,
    envelope_slack: f64,
    envelope_violations: usize,
}

pub fn run(
    args: &CurveArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<(Status, Vec<PathBuf>), CliError> {
    if args.n < 1000 {
        return Err(CliError::Usage(format!(
            "--n must be at least 1000, got {}",
            args.n
        )));
    }
    if !(args.bin_width > 0.0 && args.bin_width <= 1.0) {
        return Err(CliError::Usage(format!(
            "--bin-width {} must lie in (0, 1]",
            args.bin_width
        )));
    }
    let curve = tradeoff_curve(args.n, args.bin_width, seed)?;
    let mut csv = String::from("bin_center,max_chi_y\n");
    for b in &curve.bins {
        writeln!(csv, "{},{}", b.center, b.max_h2).expect("string write");
    }
    let violations = curve.envelope_violations(args.slack, 1e-12).len();
    let summary = Summary {
        n_samples: curve.n_samples,
        bin_width: curve.bin_width,
        seed,
        bins: curve.bins.len(),
        max_sum: curve.max_sum,
        argmax: curve.argmax,
        envelope_slack: args.slack,
        envelope_violations: violations,
    };
    let summary_text = to_json(&summary);
    let mut written = emit(&csv, out)?;
    match out {
        Some(path) => written.extend(emit(&summary_text, Some(&sibling(path, ".summary.json")))?),
        None => {
            std::io::stderr()
                .write_all(summary_text.as_bytes())
                .map_err(|e| CliError::Io(format!("stderr: {e}")))?;
        }
    }
    Ok((Status::from_violations(violations), written))
}
