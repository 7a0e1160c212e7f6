use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use otlab::numerics::holevo;
use otlab::rng::substream;
use otlab::security::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{emit, to_json, CliError, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Information sums of single measurements stay at or below one bit.
    Prop1,
    /// Guessing probabilities stay inside the circles.
    Prop2,
    /// Holevo closed forms and the tradeoff bounds.
    Prop3,
    /// Qubit reduction of qutrit measurements.
    Lemma1,
    /// Guessing-probability bias sums.
    Thm3,
    /// Information carried by an error rate.
    Infodelta,
    /// Worked measurements and the two-measurement search.
    Examples,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Random parameter draws; each suite has its own default.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Report {
    suite: Suite,
    samples: u64,
    seed: u64,
    violations: usize,
    /// Smallest slack over all checked inequalities; negative means violated.
    min_margin: f64,
    details: serde_json::Value,
}

const STAT_TOL: f64 = 1e-10;
const INFO_TOL: f64 = 1e-9;

fn default_samples(suite: Suite) -> u64 {
    match suite {
        Suite::Prop1 => 10_000,
        Suite::Prop2 | Suite::Prop3 => 100_000,
        Suite::Lemma1 => 1_000,
        Suite::Thm3 | Suite::Infodelta | Suite::Examples => 1,
    }
}

fn prop1(n: u64, seed: u64) -> Result<(usize, f64, serde_json::Value), CliError> {
    let mut violations = 0;
    let mut max_sums = [0.0f64; 3];
    for i in 0..n {
        let mut rng = substream(seed, "verify-prop1", i);
        let p = CheatParams::random(&mut rng);
        let elements = 3 + (i % 4) as usize;
        let povm = random_real_povm(3, elements, &mut rng)?;
        let iy = information(&p, Label::Y, &povm)?;
        let ir = information(&p, Label::R, &povm)?;
        let ix = information(&p, Label::YxorR, &povm)?;
        let sums = [iy + ir, iy + ix, iy + ir.max(ix)];
        for (m, s) in max_sums.iter_mut().zip(sums) {
            *m = m.max(s);
        }
        violations += sums.iter().filter(|&&s| s > 1.0 + INFO_TOL).count();
    }
    let min_margin = 1.0 - max_sums.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok((
        violations,
        min_margin,
        json!({
            "max_y_plus_r": max_sums[0],
            "max_y_plus_yxr": max_sums[1],
            "max_y_plus_max": max_sums[2],
            "tolerance": INFO_TOL,
        }),
    ))
}

fn prop2(n: u64, seed: u64) -> (usize, f64, serde_json::Value) {
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut helstrom_dev = 0.0f64;
    for i in 0..n {
        let mut rng = substream(seed, "verify-prop2", i);
        let p = CheatParams::random(&mut rng);
        let g = guess_probs(&p);
        let (m1, m2) = g.circle_margins();
        min_margin = min_margin.min(m1).min(m2);
        violations += [m1, m2].iter().filter(|&&m| m < -1e-12).count();
        if i < 10_000 {
            for (label, want) in [
                (Label::Y, g.p_y),
                (Label::R, g.p_r),
                (Label::YxorR, g.p_yxr),
            ] {
                let got = helstrom_probability(&returned_ensemble(&p, label)).expect("binary");
                helstrom_dev = helstrom_dev.max((got - want).abs());
            }
        }
    }
    if helstrom_dev > STAT_TOL {
        violations += 1;
    }
    let locus = circle_equality_locus();
    (
        violations,
        min_margin,
        json!({
            "equality_locus_a2": locus,
            "max_helstrom_deviation": helstrom_dev,
            "tolerance": 1e-12,
        }),
    )
}

fn prop3(n: u64, seed: u64) -> (usize, f64, serde_json::Value) {
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    let mut inapplicable = 0;
    let mut closed_form_dev = 0.0f64;
    for i in 0..n {
        let mut rng = substream(seed, "verify-prop3", i);
        let p = CheatParams::random(&mut rng);
        let b = check_tradeoff_bounds(&p);
        match b.min_margin() {
            Some(m) => min_margin = min_margin.min(m),
            None => inapplicable += 1,
        }
        violations += b.violations(1e-12);
        if i < 10_000 {
            let t = holevo_triple(&p);
            for (label, want) in [
                (Label::Y, t.chi_y),
                (Label::R, t.chi_r),
                (Label::YxorR, t.chi_yxr),
            ] {
                closed_form_dev =
                    closed_form_dev.max((holevo(&returned_ensemble(&p, label)) - want).abs());
            }
        }
    }
    if closed_form_dev > STAT_TOL {
        violations += 1;
    }
    (
        violations,
        min_margin,
        json!({
            "inapplicable": inapplicable,
            "max_closed_form_deviation": closed_form_dev,
        }),
    )
}

fn lemma1(n: u64, seed: u64) -> Result<(usize, f64, serde_json::Value), CliError> {
    let mut stat_violations = 0;
    let mut info_violations = 0;
    let mut max_dev = 0.0f64;
    let mut max_info = 0.0f64;
    for i in 0..n {
        let mut rng = substream(seed, "verify-lemma1", i);
        let p = CheatParams::random(&mut rng);
        let povm = random_real_povm(3, 3 + (i % 4) as usize, &mut rng)?;
        let c = lemma1_check(&povm, &p)?;
        max_dev = max_dev.max(c.max_deviation);
        max_info = max_info.max(c.reduced_information);
        stat_violations += usize::from(c.max_deviation > STAT_TOL);
        info_violations += usize::from(c.reduced_information > 1.0 + INFO_TOL);
    }
    Ok((
        stat_violations + info_violations,
        (1.0 - max_info).min(STAT_TOL - max_dev),
        json!({
            "statistics_violations": stat_violations,
            "max_statistics_deviation": max_dev,
            "information_violations": info_violations,
            "max_reduced_information": max_info,
        }),
    ))
}

fn thm3() -> (usize, f64, serde_json::Value) {
    let r = theorem3_report();
    let margins = [r.input_bias_sum - 2.0, r.cheat_bias_sum - 2.0];
    let violations = margins.iter().filter(|&&m| m < -1e-12).count();
    (
        violations,
        margins[0].min(margins[1]),
        serde_json::to_value(r).expect("report serializes"),
    )
}

fn infodelta() -> Result<(usize, f64, serde_json::Value), CliError> {
    let grid: Vec<f64> = (0..100).map(|i| 0.001 + 0.098 * i as f64 / 99.0).collect();
    let rows = infodelta_check(&grid)?;
    let violations = rows.iter().filter(|r| !r.holds(1e-12)).count();
    let min_margin = rows
        .iter()
        .flat_map(|r| r.strict_margins)
        .fold(f64::INFINITY, f64::min);
    let max_residual = rows.iter().map(|r| r.equality_residual).fold(0.0, f64::max);
    Ok((
        violations,
        min_margin,
        json!({ "grid_points": rows.len(), "max_equality_residual": max_residual }),
    ))
}

fn examples(seed: u64) -> Result<(usize, f64, serde_json::Value), CliError> {
    let mut violations = 0;
    let mut max_dev = 0.0f64;
    for i in 0..100 {
        let alpha = (FRAC_PI_2 * i as f64 / 99.0).min(FRAC_PI_2);
        let p = CheatParams::example1(alpha)?;
        let m = example1_povm(alpha)?;
        let sum = information(&p, Label::Y, &m)? + information(&p, Label::R, &m)?;
        max_dev = max_dev.max((sum - 1.0).abs());
    }
    violations += usize::from(max_dev > STAT_TOL);

    let at_half = example3_value(FRAC_1_SQRT_2)?;
    violations += usize::from((at_half - 1.0).abs() > STAT_TOL);
    let mut example3_dev = 0.0f64;
    for i in 0..=20 {
        let a = i as f64 / 20.0;
        let bp = (1.0 - a * a).max(0.0).sqrt();
        for theta in [0.0, 0.4, 1.2] {
            let p = CheatParams::normalized(a, bp * f64::cos(theta), bp * f64::sin(theta))?;
            let m = example1_povm(theta)?;
            let direct = information(&p, Label::Y, &m)? + information(&p, Label::R, &m)?;
            example3_dev = example3_dev.max((direct - example3_value(a)?).abs());
        }
    }
    violations += usize::from(example3_dev > 1e-9);

    let p = CheatParams::new(FRAC_1_SQRT_2, 0.5, 0.5)?;
    let config = SearchConfig::default();
    let iy = accessible_info_search(
        &returned_ensemble(&p, Label::Y),
        &config,
        &mut substream(seed, "verify-search", 0),
    )?;
    let ir = accessible_info_search(
        &returned_ensemble(&p, Label::R),
        &config,
        &mut substream(seed, "verify-search", 1),
    )?;
    let two = iy.value + ir.value;
    violations += usize::from(two <= 1.2);
    Ok((
        violations,
        (STAT_TOL - max_dev).min(two - 1.2),
        json!({
            "example1_max_deviation": max_dev,
            "example3_at_half": at_half,
            "example3_max_deviation": example3_dev,
            "two_measurement_y": iy.value,
            "two_measurement_r": ir.value,
            "two_measurement_sum": two,
        }),
    ))
}

pub fn run(
    args: &VerifyArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<(Status, Vec<PathBuf>), CliError> {
    let samples = args.samples.unwrap_or_else(|| default_samples(args.suite));
    let (violations, min_margin, details) = match args.suite {
        Suite::Prop1 => prop1(samples, seed)?,
        Suite::Prop2 => prop2(samples, seed),
        Suite::Prop3 => prop3(samples, seed),
        Suite::Lemma1 => lemma1(samples, seed)?,
        Suite::Thm3 => thm3(),
        Suite::Infodelta => infodelta()?,
        Suite::Examples => examples(seed)?,
    };
    let report = Report {
        suite: args.suite,
        samples,
        seed,
        violations,
        min_margin,
        details,
    };
    let written = emit(&to_json(&report), out)?;
    Ok((Status::from_violations(violations), written))
}
