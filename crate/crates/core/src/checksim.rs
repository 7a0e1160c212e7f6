//! Monte Carlo simulation of table checking with abort.
//!
//! Each trial generates `m` tables, lets Bob (and in the two-sided variant also
//! Alice) test a uniformly chosen subset, and aborts when failures exceed the
//! threshold. Per-instance quantum behavior is exact: Born probabilities are
//! computed once per strategy and sampled with a single uniform draw.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Povm, PureState};
use crate::protocol::{alice_prepare, bob_gate, OneTimeTable};
use crate::rng::{substream, SimRng};
use crate::security::{binary_entropy, example1_povm, CheatParams, RY_ORDER};

/// Midpoint constant of the failure-rate estimator `c_mid (K_f + 1) / K`.
pub const C_MID: f64 = 1.0;
/// Lower and upper constants bracketing the estimator's order.
pub const C_A: f64 = 0.5;
pub const C_B: f64 = 2.0;

/// Abort when failures exceed this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Count(usize),
    /// Fraction of the checked count, rounded down.
    Fraction(f64),
}

impl Threshold {
    pub fn resolve(&self, checked: usize) -> usize {
        match *self {
            Threshold::Count(n) => n,
            Threshold::Fraction(f) => (f * checked as f64).floor() as usize,
        }
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Count(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Tables generated per attempt.
    pub m: usize,
    pub k_bob: usize,
    pub k_alice: usize,
    pub threshold_bob: Threshold,
    pub threshold_alice: Threshold,
    pub trials: usize,
    pub seed: u64,
    /// Constant in the leak bound `h(c1 ε)`.
    pub c1: f64,
    /// Fresh attempts allowed after an abort.
    pub max_restarts: usize,
    /// Keep every checked table in the reports.
    pub record_checks: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            m: 200,
            k_bob: 20,
            k_alice: 20,
            threshold_bob: Threshold::default(),
            threshold_alice: Threshold::default(),
            trials: 1000,
            seed: 0,
            c1: 1.0,
            max_restarts: 0,
            record_checks: false,
        }
    }
}

/// `⌈L^1.1⌉` checks for `L` delivered tables.
pub fn default_check_count(delivered: usize) -> usize {
    (delivered as f64).powf(1.1).ceil() as usize
}

impl CheckConfig {
    /// Sizes `m` and both check counts for `delivered` usable tables.
    pub fn for_delivered(delivered: usize) -> Self {
        let k = default_check_count(delivered);
        Self {
            m: delivered + k,
            k_bob: k,
            k_alice: k,
            ..Self::default()
        }
    }

    pub fn validate(&self, two_sided: bool) -> Result<()> {
        if self.k_bob > self.m || (two_sided && self.k_alice > self.m) {
            return Err(Error::Config(format!(
                "check counts ({}, {}) exceed the {} generated tables",
                self.k_bob, self.k_alice, self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::Config(format!("c1 = {} must be positive", self.c1)));
        }
        for t in [self.threshold_bob, self.threshold_alice] {
            if let Threshold::Fraction(f) = t {
                if !(0.0..=1.0).contains(&f) {
                    return Err(Error::Config(format!(
                        "threshold fraction {f} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// What Alice sends and how she measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceKind {
    Honest,
    /// `(|0> + |1>)/√2`, measured in `{(|0> ± |1>)/√2, |2>}`: learns `y`, nothing about `r`.
    LearnY,
    /// Arbitrary amplitudes measured with the four-outcome `y`/`r` measurement at `α = atan2(c, b)`.
    Param(CheatParams),
    /// Independently per instance, play each kind with the given weight.
    PerInstanceMix(Vec<(f64, AliceKind)>),
}

/// How a cheating Alice fills in `(a_j, e_j)` from her measurement outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportPolicy {
    /// Per outcome, the pair maximizing the exact pass probability.
    Optimal,
    /// Fixed pair per outcome index.
    Map(Vec<(bool, bool)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceStrategy {
    pub kind: AliceKind,
    pub report: ReportPolicy,
}

impl AliceStrategy {
    pub fn honest() -> Self {
        Self {
            kind: AliceKind::Honest,
            report: ReportPolicy::Optimal,
        }
    }

    pub fn learn_y() -> Self {
        Self {
            kind: AliceKind::LearnY,
            report: ReportPolicy::Optimal,
        }
    }

    pub fn param(params: CheatParams) -> Self {
        Self {
            kind: AliceKind::Param(params),
            report: ReportPolicy::Optimal,
        }
    }

    /// Cheats with `kind` on a fraction `phi` of instances and is honest otherwise.
    pub fn mixed(phi: f64, kind: AliceKind) -> Self {
        Self {
            kind: AliceKind::PerInstanceMix(vec![(phi, kind), (1.0 - phi, AliceKind::Honest)]),
            report: ReportPolicy::Optimal,
        }
    }

    pub fn is_honest(&self) -> bool {
        match &self.kind {
            AliceKind::Honest => true,
            AliceKind::PerInstanceMix(parts) => parts
                .iter()
                .all(|(w, k)| *w == 0.0 || matches!(k, AliceKind::Honest)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobStrategy {
    Honest,
    /// Measures the received qutrit in the computational basis, guesses `x`, returns the basis state.
    ComputationalBasis,
    /// Honest gate followed by a phase `e^{iθ}` on `|2>`.
    PhaseNoise(f64),
}

impl BobStrategy {
    fn validate(&self) -> Result<()> {
        if let BobStrategy::PhaseNoise(theta) = self {
            if !theta.is_finite() {
                return Err(Error::Config("phase angle must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Alice's reported `e` for one outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Report {
    Fixed(bool, bool),
    /// Input `a` with a fair coin for `e`.
    Coin(bool),
}

/// Bob's effect on one prepared state, with Alice's outcome distributions.
#[derive(Debug, Clone)]
enum BobBranch {
    /// Outcome probabilities per `(r, y)` in [`RY_ORDER`].
    Gate([Vec<f64>; 4]),
    /// `P(k)` of Bob's basis outcome and Alice's outcome probabilities after `|k>` is returned.
    Measure {
        p_k: [f64; 3],
        outcomes: [Vec<f64>; 3],
    },
}

#[derive(Debug, Clone)]
struct Prep {
    /// Alice's true input, for honest preparations.
    x: Option<bool>,
    reports: Vec<Report>,
    bob: BobBranch,
}

#[derive(Debug, Clone)]
struct CompiledKind {
    preps: Vec<Prep>,
}

#[derive(Debug, Clone)]
struct Compiled {
    kinds: Vec<(f64, CompiledKind)>,
}

fn branch(state: &PureState, povm: &Povm, bob: BobStrategy) -> Result<BobBranch> {
    match bob {
        BobStrategy::Honest | BobStrategy::PhaseNoise(_) => {
            let theta = if let BobStrategy::PhaseNoise(t) = bob {
                t
            } else {
                0.0
            };
            let mut phase = crate::numerics::CMatrix::identity(3, 3);
            phase[(2, 2)] = num_complex::Complex64::from_polar(1.0, theta);
            let probs = RY_ORDER.map(|(r, y)| {
                let returned = state.evolve(&(&phase * bob_gate(y, r))).expect("unitary");
                povm.pure_probabilities(&returned).expect("dim 3")
            });
            Ok(BobBranch::Gate(probs))
        }
        BobStrategy::ComputationalBasis => {
            let p_k = [0, 1, 2].map(|k| state.amplitude(k).norm_sqr());
            let outcomes = [0, 1, 2].map(|k| {
                povm.pure_probabilities(&PureState::basis(3, k))
                    .expect("dim 3")
            });
            Ok(BobBranch::Measure { p_k, outcomes })
        }
    }
}

fn honest_preps(bob: BobStrategy) -> Result<Vec<Prep>> {
    let mut preps = Vec::with_capacity(4);
    for x in [false, true] {
        for t in [false, true] {
            let basis = [
                alice_prepare(x, t),
                alice_prepare(x, !t),
                PureState::basis(3, usize::from(!x)),
            ];
            let povm = Povm::projective(&basis)?;
            preps.push(Prep {
                x: Some(x),
                reports: vec![
                    Report::Fixed(x, false),
                    Report::Fixed(x, true),
                    Report::Coin(x),
                ],
                bob: branch(&basis[0], &povm, bob)?,
            });
        }
    }
    Ok(preps)
}

/// Exact probability that honest Bob's check passes, for each outcome and report pair.
fn pass_table(probs: &[Vec<f64>; 4], outcome: usize, a: bool, e: bool) -> f64 {
    RY_ORDER
        .iter()
        .zip(probs.iter())
        .filter(|((r, y), _)| (a & *y) == (e ^ *r))
        .map(|(_, p)| 0.25 * p[outcome])
        .sum()
}

fn cheat_prep(
    state: PureState,
    povm: Povm,
    policy: &ReportPolicy,
    bob: BobStrategy,
) -> Result<Prep> {
    let n = povm.len();
    let reports = match policy {
        ReportPolicy::Map(map) => {
            if map.len() != n {
                return Err(Error::Config(format!(
                    "report map has {} entries for {n} outcomes",
                    map.len()
                )));
            }
            map.iter().map(|&(a, e)| Report::Fixed(a, e)).collect()
        }
        ReportPolicy::Optimal => {
            let BobBranch::Gate(honest) = branch(&state, &povm, BobStrategy::Honest)? else {
                unreachable!("honest Bob applies a gate")
            };
            (0..n)
                .map(|j| {
                    let mut best = (f64::NEG_INFINITY, false, false);
                    for (a, e) in [(false, false), (false, true), (true, false), (true, true)] {
                        let v = pass_table(&honest, j, a, e);
                        if v > best.0 + 1e-15 {
                            best = (v, a, e);
                        }
                    }
                    Report::Fixed(best.1, best.2)
                })
                .collect()
        }
    };
    Ok(Prep {
        x: None,
        reports,
        bob: branch(&state, &povm, bob)?,
    })
}

fn compile_kind(kind: &AliceKind, policy: &ReportPolicy, bob: BobStrategy) -> Result<CompiledKind> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let preps = match kind {
        AliceKind::Honest => honest_preps(bob)?,
        AliceKind::LearnY => {
            let plus = PureState::from_real(&[h, h, 0.0])?;
            let minus = PureState::from_real(&[h, -h, 0.0])?;
            let povm = Povm::projective(&[plus.clone(), minus, PureState::basis(3, 2)])?;
            vec![cheat_prep(plus, povm, policy, bob)?]
        }
        AliceKind::Param(p) => {
            let p = CheatParams::new(p.a, p.b, p.c)?;
            let alpha = p.c.atan2(p.b);
            vec![cheat_prep(p.state(), example1_povm(alpha)?, policy, bob)?]
        }
        AliceKind::PerInstanceMix(_) => {
            return Err(Error::Config(
                "nested per-instance mixtures are not supported".into(),
            ))
        }
    };
    Ok(CompiledKind { preps })
}

fn compile(alice: &AliceStrategy, bob: BobStrategy) -> Result<Compiled> {
    bob.validate()?;
    let kinds = match &alice.kind {
        AliceKind::PerInstanceMix(parts) => {
            if parts.is_empty() {
                return Err(Error::Config("empty mixture".into()));
            }
            if parts.iter().any(|(w, _)| !(*w >= 0.0 && w.is_finite())) {
                return Err(Error::Config("mixture weights must be nonnegative".into()));
            }
            let total: f64 = parts.iter().map(|(w, _)| w).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("mixture weights sum to {total}")));
            }
            parts
                .iter()
                .map(|(w, k)| Ok((*w, compile_kind(k, &alice.report, bob)?)))
                .collect::<Result<Vec<_>>>()?
        }
        other => vec![(1.0, compile_kind(other, &alice.report, bob)?)],
    };
    Ok(Compiled { kinds })
}

fn draw(probs: &[f64], rng: &mut SimRng) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (j, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// One generated table with Bob's guess of Alice's input, if he made one.
struct Instance {
    table: OneTimeTable,
    x_guess: Option<(bool, bool)>,
}

impl Compiled {
    fn instance(&self, rng: &mut SimRng) -> Instance {
        let kind = if self.kinds.len() == 1 {
            &self.kinds[0].1
        } else {
            let weights: Vec<f64> = self.kinds.iter().map(|(w, _)| *w).collect();
            &self.kinds[draw(&weights, rng)].1
        };
        let prep = &kind.preps[rng.random_range(0..kind.preps.len())];
        let y: bool = rng.random();
        let r: bool = rng.random();
        let (outcome, x_guess) = match &prep.bob {
            BobBranch::Gate(probs) => {
                let idx = 2 * usize::from(r) + usize::from(y);
                (draw(&probs[idx], rng), None)
            }
            BobBranch::Measure { p_k, outcomes } => {
                let k = draw(p_k, rng);
                let guess = match k {
                    0 => false,
                    1 => true,
                    _ => rng.random(),
                };
                (draw(&outcomes[k], rng), prep.x.map(|x| (guess, x)))
            }
        };
        let (a, e) = match prep.reports[outcome] {
            Report::Fixed(a, e) => (a, e),
            Report::Coin(a) => (a, rng.random()),
        };
        Instance {
            table: OneTimeTable { x: a, y, e, f: r },
            x_guess,
        }
    }
}

/// Failure-rate estimate `c_mid (K_f + 1) / K`, clipped to `[0, 1]`.
pub fn epsilon_estimate(failures: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::UndefinedEstimate("no tables were checked".into()));
    }
    Ok((C_MID * (failures as f64 + 1.0) / k as f64).clamp(0.0, 1.0))
}

/// `h(min(c1 ε, ½))` in bits.
pub fn leak_bound(est_epsilon: f64, c1: f64) -> f64 {
    let x = (c1 * est_epsilon.max(0.0)).min(0.5);
    binary_entropy(x).expect("argument in [0, 1/2]")
}

/// One checked table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub label: usize,
    pub table: OneTimeTable,
    pub passed: bool,
}

/// Result of one side's check in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub aborted: bool,
    pub failures: usize,
    pub checked: usize,
    /// `None` when nothing was checked.
    pub est_epsilon: Option<f64>,
    pub leak_bound_bits: Option<f64>,
    pub tables_delivered: usize,
    pub delivered_correct: usize,
    /// Attempts used, including restarts after aborts.
    pub attempts: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub records: Option<Vec<CheckRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: u64,
    pub bob_check: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alice_check: Option<CheckReport>,
    /// Instances in which Bob guessed Alice's input, and how many guesses were right.
    pub x_guesses: usize,
    pub x_guesses_correct: usize,
}

/// Abort frequency with a Wilson score interval at `z` standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbortStats {
    pub aborts: usize,
    pub trials: usize,
    pub probability: f64,
    pub z: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl AbortStats {
    pub fn new(aborts: usize, trials: usize, z: f64) -> Self {
        let n = trials as f64;
        let p = aborts as f64 / n;
        let z2 = z * z;
        let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            aborts,
            trials,
            probability: p,
            z,
            ci_low: (center - half).max(0.0),
            ci_high: (center + half).min(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub trials: usize,
    pub bob_abort: AbortStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alice_abort: Option<AbortStats>,
    /// Failures per checked table, pooled over trials.
    pub bob_failure_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alice_failure_rate: Option<f64>,
    pub bob_x_guess_rate: Option<f64>,
    pub c_mid: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub c1: f64,
    /// Cheater's pass probability summed over all allowed attempts, capped at 1.
    pub restart_pass_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRun {
    pub reports: Vec<TrialReport>,
    pub summary: CheckSummary,
}

struct SideCheck {
    failures: usize,
    checked: usize,
    labels: Vec<usize>,
}

fn check_side(tables: &[OneTimeTable], k: usize, rng: &mut SimRng) -> SideCheck {
    let labels = sample(rng, tables.len(), k).into_vec();
    let failures = labels.iter().filter(|&&j| !tables[j].is_correct()).count();
    SideCheck {
        failures,
        checked: k,
        labels,
    }
}

fn side_report(
    tables: &[OneTimeTable],
    side: &SideCheck,
    aborted: bool,
    delivered: &[bool],
    attempts: usize,
    config: &CheckConfig,
) -> CheckReport {
    let est_epsilon = epsilon_estimate(side.failures, side.checked).ok();
    let tables_delivered = if aborted {
        0
    } else {
        delivered.iter().filter(|d| **d).count()
    };
    let delivered_correct = if aborted {
        0
    } else {
        tables
            .iter()
            .zip(delivered)
            .filter(|(t, d)| **d && t.is_correct())
            .count()
    };
    CheckReport {
        aborted,
        failures: side.failures,
        checked: side.checked,
        est_epsilon,
        leak_bound_bits: est_epsilon.map(|e| leak_bound(e, config.c1)),
        tables_delivered,
        delivered_correct,
        attempts,
        records: config.record_checks.then(|| {
            side.labels
                .iter()
                .map(|&j| CheckRecord {
                    label: j,
                    table: tables[j],
                    passed: tables[j].is_correct(),
                })
                .collect()
        }),
    }
}

fn run_trial(
    compiled: &Compiled,
    config: &CheckConfig,
    two_sided: bool,
    component: &str,
    trial: u64,
) -> TrialReport {
    let mut rng = substream(config.seed, component, trial);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let mut x_guesses = 0;
        let mut x_guesses_correct = 0;
        let tables: Vec<OneTimeTable> = (0..config.m)
            .map(|_| {
                let inst = compiled.instance(&mut rng);
                if let Some((guess, x)) = inst.x_guess {
                    x_guesses += 1;
                    x_guesses_correct += usize::from(guess == x);
                }
                inst.table
            })
            .collect();
        let bob = check_side(&tables, config.k_bob, &mut rng);
        let alice = two_sided.then(|| check_side(&tables, config.k_alice, &mut rng));
        let bob_aborts = bob.failures > config.threshold_bob.resolve(bob.checked);
        let alice_aborts = alice
            .as_ref()
            .is_some_and(|a| a.failures > config.threshold_alice.resolve(a.checked));
        if (bob_aborts || alice_aborts) && attempts <= config.max_restarts {
            continue;
        }
        let mut delivered = vec![true; config.m];
        for side in std::iter::once(&bob).chain(alice.as_ref()) {
            for &j in &side.labels {
                delivered[j] = false;
            }
        }
        let aborted = bob_aborts || alice_aborts;
        return TrialReport {
            trial,
            bob_check: side_report(&tables, &bob, bob_aborts, &delivered, attempts, config),
            alice_check: alice.as_ref().map(|a| {
                side_report(
                    &tables,
                    a,
                    aborted && alice_aborts,
                    &delivered,
                    attempts,
                    config,
                )
            }),
            x_guesses,
            x_guesses_correct,
        };
    }
}

fn summarize(reports: &[TrialReport], config: &CheckConfig) -> CheckSummary {
    let z = 3.0;
    let n = reports.len();
    let rate = |sides: Vec<&CheckReport>| {
        let checked: usize = sides.iter().map(|r| r.checked).sum();
        let failures: usize = sides.iter().map(|r| r.failures).sum();
        (checked > 0).then(|| failures as f64 / checked as f64)
    };
    let bob_sides: Vec<&CheckReport> = reports.iter().map(|r| &r.bob_check).collect();
    let alice_sides: Vec<&CheckReport> = reports
        .iter()
        .filter_map(|r| r.alice_check.as_ref())
        .collect();
    let bob_abort = AbortStats::new(bob_sides.iter().filter(|r| r.aborted).count(), n, z);
    let alice_abort = (!alice_sides.is_empty())
        .then(|| AbortStats::new(alice_sides.iter().filter(|r| r.aborted).count(), n, z));
    let guesses: usize = reports.iter().map(|r| r.x_guesses).sum();
    let correct: usize = reports.iter().map(|r| r.x_guesses_correct).sum();
    let pass = 1.0 - bob_abort.probability;
    CheckSummary {
        trials: n,
        bob_abort,
        alice_abort,
        bob_failure_rate: rate(bob_sides),
        alice_failure_rate: if alice_sides.is_empty() {
            None
        } else {
            rate(alice_sides)
        },
        bob_x_guess_rate: (guesses > 0).then(|| correct as f64 / guesses as f64),
        c_mid: C_MID,
        c_a: C_A,
        c_b: C_B,
        c1: config.c1,
        restart_pass_bound: ((config.max_restarts + 1) as f64 * pass).min(1.0),
    }
}

fn run(
    config: &CheckConfig,
    alice: &AliceStrategy,
    bob: BobStrategy,
    two_sided: bool,
) -> Result<CheckRun> {
    config.validate(two_sided)?;
    let compiled = compile(alice, bob)?;
    let component = if two_sided { "protocol3" } else { "protocol2" };
    let reports: Vec<TrialReport> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&compiled, config, two_sided, component, t))
        .collect();
    let summary = summarize(&reports, config);
    Ok(CheckRun { reports, summary })
}

/// Bob checks `k_bob` tables against Alice's reports.
pub fn run_protocol2(config: &CheckConfig, alice: &AliceStrategy) -> Result<CheckRun> {
    run(config, alice, BobStrategy::Honest, false)
}

/// Bob checks `k_bob` tables and Alice independently checks `k_alice`.
pub fn run_protocol3(
    config: &CheckConfig,
    alice: &AliceStrategy,
    bob: BobStrategy,
) -> Result<CheckRun> {
    run(config, alice, bob, true)
}

/// Exact probability that one checked table generated with `alice` passes honest Bob's check.
pub fn pass_probability(alice: &AliceStrategy) -> Result<f64> {
    let compiled = compile(alice, BobStrategy::Honest)?;
    let mut total = 0.0;
    for (w, kind) in &compiled.kinds {
        let per_prep = 1.0 / kind.preps.len() as f64;
        for prep in &kind.preps {
            let BobBranch::Gate(probs) = &prep.bob else {
                unreachable!()
            };
            for (j, report) in prep.reports.iter().enumerate() {
                let p = match *report {
                    Report::Fixed(a, e) => pass_table(probs, j, a, e),
                    Report::Coin(a) => {
                        0.5 * (pass_table(probs, j, a, false) + pass_table(probs, j, a, true))
                    }
                };
                total += w * per_prep * p;
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice(AliceStrategy),
    Bob(BobStrategy),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionPoint {
    pub k: usize,
    pub abort: AbortStats,
}

/// Abort probability against the number of checked tables, with `m = k`.
pub fn detection_curve(
    party: &Party,
    k_values: &[usize],
    threshold: Threshold,
    trials: usize,
    seed: u64,
) -> Result<Vec<DetectionPoint>> {
    if trials < 100 {
        return Err(Error::Config(format!(
            "detection curves need at least 100 trials, got {trials}"
        )));
    }
    k_values
        .iter()
        .map(|&k| {
            let base = CheckConfig {
                m: k.max(1),
                trials,
                seed: seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                ..CheckConfig::default()
            };
            let (run, stats) = match party {
                Party::Alice(a) => {
                    let cfg = CheckConfig {
                        k_bob: k,
                        k_alice: 0,
                        threshold_bob: threshold,
                        ..base
                    };
                    let run = run_protocol2(&cfg, a)?;
                    let s = run.summary.bob_abort;
                    (run, s)
                }
                Party::Bob(b) => {
                    let cfg = CheckConfig {
                        k_bob: 0,
                        k_alice: k,
                        threshold_alice: threshold,
                        ..base
                    };
                    let run = run_protocol3(&cfg, &AliceStrategy::honest(), *b)?;
                    let s = run.summary.alice_abort.expect("two-sided run");
                    (run, s)
                }
            };
            drop(run);
            Ok(DetectionPoint { k, abort: stats })
        })
        .collect()
}
