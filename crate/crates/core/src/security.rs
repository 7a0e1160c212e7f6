//! Single-instance adversary analysis for the qutrit table protocol.
//!
//! A cheating Alice is summarized by the amplitudes `(a, b, c)` of the qutrit
//! she sends. Bob's four possible phase gates turn it into four returned states,
//! and every security quantity here is a function of how well those states can
//! be told apart: guessing probabilities, Holevo quantities, and mutual
//! information for concrete measurements.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    cr, haar_random_pure, holevo, mutual_information, mutual_information_from_joint,
    trace_distance, xlog2x, CMatrix, DensityOperator, Ensemble, Povm, PureState, NORM_TOL,
};
use crate::protocol::{alice_prepare, bob_gate};
use crate::rng::substream;

/// Amplitudes of the qutrit a (possibly cheating) Alice sends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CheatParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && c >= 0.0) || !(a + b + c).is_finite() {
            return Err(Error::InvalidState(format!(
                "amplitudes must be finite and nonnegative, got ({a}, {b}, {c})"
            )));
        }
        let norm2 = a * a + b * b + c * c;
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "a^2 + b^2 + c^2 = {norm2}, expected 1"
            )));
        }
        Ok(Self { a, b, c })
    }

    /// Rescales a nonzero nonnegative triple to unit norm.
    pub fn normalized(a: f64, b: f64, c: f64) -> Result<Self> {
        let n = (a * a + b * b + c * c).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidState("zero amplitude triple".into()));
        }
        Self::new(a / n, b / n, c / n)
    }

    /// From the weights `(a^2, b^2, c^2)`; tiny negative drift is clamped.
    pub fn from_squares(a2: f64, b2: f64, c2: f64) -> Result<Self> {
        Self::normalized(a2.max(0.0).sqrt(), b2.max(0.0).sqrt(), c2.max(0.0).sqrt())
    }

    /// The honest state for input `x`, up to the sign of `|2>`.
    pub fn honest(x: bool) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        if x {
            Self { a: 0.0, b: h, c: h }
        } else {
            Self { a: h, b: 0.0, c: h }
        }
    }

    /// `(|0> + cos α |1> + sin α |2>)/√2`.
    pub fn example1(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::normalized(h, h * alpha.cos(), h * alpha.sin())
    }

    /// Uniform on the positive octant of the unit sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let g: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal).abs());
            if let Ok(p) = Self::normalized(g[0], g[1], g[2]) {
                return p;
            }
        }
    }

    pub fn squares(&self) -> [f64; 3] {
        [self.a * self.a, self.b * self.b, self.c * self.c]
    }

    pub fn state(&self) -> PureState {
        PureState::from_real(&[self.a, self.b, self.c]).expect("validated amplitudes")
    }
}

/// Which of Bob's bits an ensemble is labelled by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Y,
    R,
    YxorR,
    /// Both bits: four classes.
    Joint,
}

/// Bob's `(r, y)` pairs in the order used for every four-state list.
pub const RY_ORDER: [(bool, bool); 4] =
    [(false, false), (false, true), (true, false), (true, true)];

fn class_of(label: Label, r: bool, y: bool) -> usize {
    match label {
        Label::Y => usize::from(y),
        Label::R => usize::from(r),
        Label::YxorR => usize::from(y ^ r),
        Label::Joint => 2 * usize::from(r) + usize::from(y),
    }
}

/// The four states returned by Bob, ordered as [`RY_ORDER`].
pub fn returned_states(params: &CheatParams) -> [PureState; 4] {
    let sent = params.state();
    RY_ORDER.map(|(r, y)| sent.evolve(&bob_gate(y, r)).expect("unitary gate"))
}

fn group(states: &[PureState; 4], label: Label) -> Ensemble {
    let classes = if label == Label::Joint { 4 } else { 2 };
    let dim = states[0].dim();
    let mut acc = vec![CMatrix::zeros(dim, dim); classes];
    for (k, &(r, y)) in RY_ORDER.iter().enumerate() {
        acc[class_of(label, r, y)] += states[k].projector();
    }
    let per_class = 1.0 / classes as f64;
    Ensemble::new(
        acc.into_iter()
            .map(|m| {
                let rho = DensityOperator::new(m.unscale(4.0 / classes as f64))
                    .expect("average of pure states");
                (per_class, rho)
            })
            .collect(),
    )
    .expect("equiprobable classes")
}

/// Equiprobable ensemble of Bob's returned states grouped by `label`.
pub fn returned_ensemble(params: &CheatParams, label: Label) -> Ensemble {
    group(&returned_states(params), label)
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    CMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

fn require_two_qutrit(state: &PureState) -> Result<()> {
    if state.dim() != 9 {
        return Err(Error::Shape(format!(
            "expected a two-qutrit state of dim 9, got {}",
            state.dim()
        )));
    }
    Ok(())
}

/// Returned states for an ancilla-assisted Alice; the sent qutrit is the second factor.
pub fn entangled_returned_states(state: &PureState) -> Result<[PureState; 4]> {
    require_two_qutrit(state)?;
    let id = CMatrix::identity(3, 3);
    Ok(RY_ORDER.map(|(r, y)| {
        state
            .evolve(&kron(&id, &bob_gate(y, r)))
            .expect("unitary gate")
    }))
}

pub fn entangled_returned_ensemble(state: &PureState, label: Label) -> Result<Ensemble> {
    Ok(group(&entangled_returned_states(state)?, label))
}

/// Amplitude triple whose returned states have the same Gram matrix as those of `state`.
pub fn params_from_two_qutrit(state: &PureState) -> Result<CheatParams> {
    require_two_qutrit(state)?;
    let weight = |k: usize| {
        (0..3)
            .map(|i| state.amplitude(3 * i + k).norm_sqr())
            .sum::<f64>()
    };
    CheatParams::from_squares(weight(0), weight(1), weight(2))
}

/// Optimal probabilities of guessing each of Bob's bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuessProbs {
    pub p_y: f64,
    pub p_r: f64,
    pub p_yxr: f64,
}

impl GuessProbs {
    /// `1/4 - (p_r - 1/2)^2 - (p_y - 1/2)^2` and the same with `p_yxr`.
    pub fn circle_margins(&self) -> (f64, f64) {
        let sq = |p: f64| (p - 0.5) * (p - 0.5);
        (
            0.25 - sq(self.p_r) - sq(self.p_y),
            0.25 - sq(self.p_yxr) - sq(self.p_y),
        )
    }
}

pub fn guess_probs(params: &CheatParams) -> GuessProbs {
    let CheatParams { a, b, c } = *params;
    GuessProbs {
        p_y: 0.5 + a * b,
        p_r: 0.5 + a * c,
        p_yxr: 0.5 + b * c,
    }
}

/// Optimal success probability for telling the two states of a binary ensemble apart.
pub fn helstrom_probability(ensemble: &Ensemble) -> Result<f64> {
    let [(p0, rho0), (p1, rho1)] = ensemble.entries() else {
        return Err(Error::Shape(format!(
            "discrimination needs two states, got {}",
            ensemble.len()
        )));
    };
    if (p0 - p1).abs() < 1e-15 {
        return Ok(0.5 * (1.0 + trace_distance(rho0, rho1)?));
    }
    let diff = rho0.matrix().scale(*p0) - rho1.matrix().scale(*p1);
    let norm: f64 = crate::numerics::hermitian_eigenvalues(&diff)
        .iter()
        .map(|l| l.abs())
        .sum();
    Ok(0.5 * (1.0 + norm))
}

/// Holevo quantities of the `y`, `r` and `y ⊕ r` ensembles, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolevoTriple {
    pub chi_y: f64,
    pub chi_r: f64,
    pub chi_yxr: f64,
}

impl HolevoTriple {
    pub fn h1(&self) -> f64 {
        self.chi_r.max(self.chi_yxr)
    }

    pub fn h2(&self) -> f64 {
        self.chi_y
    }
}

fn holevo_from_squares(a2: f64, b2: f64, c2: f64) -> HolevoTriple {
    HolevoTriple {
        chi_y: -xlog2x(a2) - xlog2x(b2) + xlog2x(1.0 - c2),
        chi_r: -xlog2x(a2) - xlog2x(c2) + xlog2x(1.0 - b2),
        chi_yxr: -xlog2x(b2) - xlog2x(c2) + xlog2x(1.0 - a2),
    }
}

pub fn holevo_triple(params: &CheatParams) -> HolevoTriple {
    let [a2, b2, c2] = params.squares();
    holevo_from_squares(a2, b2, c2)
}

/// `χ_y + χ_r` as a function of the squared amplitudes.
pub fn holevo_sum_from_squares(a2: f64, b2: f64, c2: f64) -> f64 {
    let t = holevo_from_squares(a2, b2, c2);
    t.chi_y + t.chi_r
}

pub fn binary_entropy(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!(
            "binary entropy argument {delta} outside [0, 1]"
        )));
    }
    Ok(-xlog2x(delta) - xlog2x(1.0 - delta))
}

/// One pair of information bounds driven by a single near-perfect quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    /// One minus the near-perfect Holevo quantity, clamped at zero.
    pub delta: f64,
    /// `h(delta)` minus each bounded quantity; `None` when `delta >= 1/2`.
    pub margins: Option<[f64; 2]>,
}

impl BoundPair {
    fn new(near_perfect: f64, bounded: [f64; 2]) -> Self {
        let delta = (1.0 - near_perfect).max(0.0);
        let margins = (delta < 0.5).then(|| {
            let h = binary_entropy(delta).expect("delta in [0, 1/2)");
            bounded.map(|q| h - q)
        });
        Self { delta, margins }
    }
}

/// `χ_y, χ_{y⊕r} ≤ h(1 - χ_r)` and `χ_r, χ_y ≤ h(1 - χ_{y⊕r})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffBounds {
    pub triple: HolevoTriple,
    pub from_r: BoundPair,
    pub from_yxr: BoundPair,
}

impl TradeoffBounds {
    pub fn min_margin(&self) -> Option<f64> {
        [self.from_r.margins, self.from_yxr.margins]
            .into_iter()
            .flatten()
            .flatten()
            .reduce(f64::min)
    }

    pub fn violations(&self, tol: f64) -> usize {
        [self.from_r.margins, self.from_yxr.margins]
            .into_iter()
            .flatten()
            .flatten()
            .filter(|&m| m < -tol)
            .count()
    }
}

pub fn check_tradeoff_bounds(params: &CheatParams) -> TradeoffBounds {
    let t = holevo_triple(params);
    TradeoffBounds {
        triple: t,
        from_r: BoundPair::new(t.chi_r, [t.chi_y, t.chi_yxr]),
        from_yxr: BoundPair::new(t.chi_yxr, [t.chi_r, t.chi_y]),
    }
}

/// Bloch vectors (unnormalized) of the qubit images of the four returned states.
const TETRAHEDRON: [[f64; 3]; 4] = [
    [1.0, 1.0, 1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
];

fn pauli() -> [CMatrix; 3] {
    let o = cr(0.0);
    let l = cr(1.0);
    let i = crate::numerics::c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// `s I + v·σ`.
fn qubit_operator(s: f64, v: [f64; 3]) -> CMatrix {
    let [sx, sy, sz] = pauli();
    CMatrix::identity(2, 2).scale(s) + sx.scale(v[0]) + sy.scale(v[1]) + sz.scale(v[2])
}

/// Qubit pure states at the corners of a regular tetrahedron, ordered as [`RY_ORDER`].
pub fn tetrahedron_states() -> [DensityOperator; 4] {
    let s = 1.0 / 3f64.sqrt();
    TETRAHEDRON.map(|n| {
        DensityOperator::new(qubit_operator(0.5, n.map(|x| 0.5 * x * s)))
            .expect("unit Bloch vector")
    })
}

/// Maps a qutrit POVM to a qubit POVM by the closed-form rule
/// `E = (a²f + b²g + c²h) I + √3 (ab u σx + ac v σy + bc w σz)`,
/// where `f, g, h` are the diagonal and `u, v, w` the `01, 02, 12` entries of
/// the real part of each element.
pub fn lemma1_reduce(povm3: &Povm, params: &CheatParams) -> Result<Povm> {
    if povm3.dim() != 3 {
        return Err(Error::InvalidMeasurement(format!(
            "expected a qutrit POVM, got dim {}",
            povm3.dim()
        )));
    }
    let CheatParams { a, b, c } = *params;
    let s3 = 3f64.sqrt();
    let elements = povm3
        .elements()
        .iter()
        .map(|m| {
            let re = |i: usize, j: usize| m[(i, j)].re;
            let scalar = a * a * re(0, 0) + b * b * re(1, 1) + c * c * re(2, 2);
            let vector = [
                s3 * a * b * re(0, 1),
                s3 * a * c * re(0, 2),
                s3 * b * c * re(1, 2),
            ];
            qubit_operator(scalar, vector)
        })
        .collect();
    Povm::new(elements)
}

/// How closely the qubit reduction reproduces the qutrit measurement statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Check {
    /// Largest `|Tr(M_j τ_k) - Tr(E_j ρ_k)|` over elements and the four states.
    pub max_deviation: f64,
    /// Joint `(r, y)` information of the original qutrit measurement.
    pub original_information: f64,
    /// Joint `(r, y)` information of the reduced qubit measurement on the tetrahedron states.
    pub reduced_information: f64,
}

pub fn lemma1_check(povm3: &Povm, params: &CheatParams) -> Result<Lemma1Check> {
    let reduced = lemma1_reduce(povm3, params)?;
    let taus = returned_states(params);
    let rhos = tetrahedron_states();
    let mut max_deviation = 0.0f64;
    for (tau, rho) in taus.iter().zip(rhos.iter()) {
        let original = povm3.pure_probabilities(tau)?;
        let image = reduced.probabilities(rho)?;
        for (p, q) in original.iter().zip(image.iter()) {
            max_deviation = max_deviation.max((p - q).abs());
        }
    }
    let original_information = mutual_information(&returned_ensemble(params, Label::Joint), povm3)?;
    let reduced_information = mutual_information(&Ensemble::uniform(rhos.to_vec())?, &reduced)?;
    Ok(Lemma1Check {
        max_deviation,
        original_information,
        reduced_information,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, pi/2]")));
    }
    Ok(())
}

/// Four rank-one elements `½(cos α|0> ± |1>)(..)` and `½(sin α|0> ± |2>)(..)`.
///
/// Outcomes 0 and 1 reveal `y`, outcomes 2 and 3 reveal `r`.
pub fn example1_povm(alpha: f64) -> Result<Povm> {
    check_alpha(alpha)?;
    let (s, c) = alpha.sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vectors = [
        [h * c, h, 0.0],
        [h * c, -h, 0.0],
        [h * s, 0.0, h],
        [h * s, 0.0, -h],
    ];
    Povm::new(
        vectors
            .iter()
            .map(|v| {
                let col = DVector::from_iterator(3, v.iter().map(|&x| cr(x)));
                &col * col.adjoint()
            })
            .collect(),
    )
}

/// Information about `label` from measuring Bob's returned state with `povm`.
pub fn information(params: &CheatParams, label: Label, povm: &Povm) -> Result<f64> {
    mutual_information(&returned_ensemble(params, label), povm)
}

/// `(a + b')² log₂(a + b') + (a - b')² log₂|a - b'|` with `b' = √(1 - a²)`.
pub fn example3_value(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("amplitude {a} outside [0, 1]")));
    }
    let bp = (1.0 - a * a).max(0.0).sqrt();
    let term = |s: f64| s * s * if s == 0.0 { 0.0 } else { s.log2() };
    Ok(term(a + bp) + term((a - bp).abs()))
}

/// Settings for the accessible-information search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Random starting points, in addition to `seeds`.
    pub starts: usize,
    pub min_elements: usize,
    pub max_elements: usize,
    pub initial_step: f64,
    pub min_step: f64,
    /// Objective evaluations allowed per start.
    pub max_evaluations: usize,
    /// Measurements polished before the random starts.
    pub seeds: Vec<Povm>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 32,
            min_elements: 4,
            max_elements: 9,
            initial_step: 0.25,
            min_step: 1e-10,
            max_evaluations: 100_000,
            seeds: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub povm: Povm,
    /// Holevo quantity of the ensemble, an upper bound on `value`.
    pub holevo: f64,
}

/// Real rank-one measurement `v_k = S^{-1/2} w_k` with `S = Σ w_k w_kᵀ`.
struct RealObjective {
    dim: usize,
    priors: Vec<f64>,
    states: Vec<DMatrix<f64>>,
}

impl RealObjective {
    fn new(ensemble: &Ensemble) -> Self {
        Self {
            dim: ensemble.dim(),
            priors: ensemble.entries().iter().map(|(p, _)| *p).collect(),
            states: ensemble
                .entries()
                .iter()
                .map(|(_, rho)| rho.matrix().map(|z| z.re))
                .collect(),
        }
    }

    fn complete(&self, params: &[f64]) -> Option<Vec<DVector<f64>>> {
        let d = self.dim;
        let ws: Vec<DVector<f64>> = params.chunks(d).map(DVector::from_column_slice).collect();
        let mut s = DMatrix::<f64>::zeros(d, d);
        for w in &ws {
            s += w * w.transpose();
        }
        let eig = SymmetricEigen::new(s);
        let top = eig.eigenvalues.max();
        if !(top.is_finite() && eig.eigenvalues.min() > 1e-12 * top) {
            return None;
        }
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose();
        Some(ws.iter().map(|w| &inv_sqrt * w).collect())
    }

    fn value(&self, params: &[f64]) -> f64 {
        let Some(vs) = self.complete(params) else {
            return f64::NEG_INFINITY;
        };
        let joint: Vec<Vec<f64>> = self
            .priors
            .iter()
            .zip(&self.states)
            .map(|(p, rho)| vs.iter().map(|v| p * v.dot(&(rho * v)).max(0.0)).collect())
            .collect();
        mutual_information_from_joint(&joint)
    }

    fn povm(&self, params: &[f64]) -> Option<Povm> {
        let vs = self.complete(params)?;
        Povm::new(
            vs.iter()
                .map(|v| {
                    let col = v.map(cr);
                    &col * col.adjoint()
                })
                .collect(),
        )
        .ok()
    }
}

/// Rank-one vectors `w` with `Σ w wᵀ = Re(Σ M)` for a measurement's real part.
fn seed_params(povm: &Povm, dim: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for m in povm.elements() {
        let eig = SymmetricEigen::new(m.map(|z| z.re));
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l > 1e-12 {
                out.extend(eig.eigenvectors.column(k).iter().map(|x| x * l.sqrt()));
            }
        }
    }
    debug_assert_eq!(out.len() % dim, 0);
    out
}

/// Coordinate pattern search with step halving.
fn pattern_search(obj: &RealObjective, start: Vec<f64>, config: &SearchConfig) -> (f64, Vec<f64>) {
    let mut x = start;
    let mut best = obj.value(&x);
    let mut step = config.initial_step;
    let mut evaluations = 1usize;
    while step >= config.min_step && evaluations < config.max_evaluations {
        let mut improved = false;
        for j in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[j];
                x[j] = old + dir * step;
                let v = obj.value(&x);
                evaluations += 1;
                if v > best {
                    best = v;
                    improved = true;
                    break;
                }
                x[j] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, x)
}

/// Lower bound on accessible information by multi-start local search over real rank-one POVMs.
pub fn accessible_info_search<R: Rng + ?Sized>(
    ensemble: &Ensemble,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchResult> {
    let dim = ensemble.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::Shape(format!(
            "search supports dims 2 and 3, got {dim}"
        )));
    }
    if config.min_elements < dim || config.min_elements > config.max_elements {
        return Err(Error::Config(format!(
            "element range {}..={} invalid for dim {dim}",
            config.min_elements, config.max_elements
        )));
    }
    let obj = RealObjective::new(ensemble);
    let mut starts: Vec<Vec<f64>> = config
        .seeds
        .iter()
        .filter(|p| p.dim() == dim)
        .map(|p| seed_params(p, dim))
        .collect();
    let span = config.max_elements - config.min_elements + 1;
    for s in 0..config.starts {
        let n = config.min_elements + s % span;
        starts.push((0..n * dim).map(|_| rng.sample(StandardNormal)).collect());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let (v, x) = pattern_search(&obj, start, config);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    }
    let (value, params) = best.ok_or_else(|| Error::Config("no starting points".into()))?;
    let povm = obj
        .povm(&params)
        .ok_or_else(|| Error::InvalidMeasurement("search ended on a singular frame".into()))?;
    Ok(SearchResult {
        value,
        povm,
        holevo: holevo(ensemble),
    })
}

/// Random real rank-one POVM with `elements` outcomes.
pub fn random_real_povm<R: Rng + ?Sized>(dim: usize, elements: usize, rng: &mut R) -> Result<Povm> {
    if elements < dim {
        return Err(Error::Config(format!(
            "{elements} rank-one elements cannot span dim {dim}"
        )));
    }
    let obj = RealObjective {
        dim,
        priors: Vec::new(),
        states: Vec::new(),
    };
    loop {
        let params: Vec<f64> = (0..elements * dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        if let Some(p) = obj.povm(&params) {
            return Ok(p);
        }
    }
}

/// Maximum of `χ_y + χ_r` with the symmetric and the unconstrained searches side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolevoSumMax {
    pub max_sum: f64,
    pub argmax: CheatParams,
    /// Maximum over `b = c` only.
    pub symmetric_max: f64,
    pub symmetric_argmax: CheatParams,
    /// Maximum over the full simplex of `(a², b², c²)`.
    pub unconstrained_max: f64,
    pub unconstrained_argmax: CheatParams,
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn simplex_sum(a2: f64, b2: f64) -> f64 {
    if a2 < 0.0 || b2 < 0.0 || a2 + b2 > 1.0 {
        return f64::NEG_INFINITY;
    }
    holevo_sum_from_squares(a2, b2, (1.0 - a2 - b2).max(0.0))
}

pub fn max_holevo_sum_search() -> HolevoSumMax {
    let sym = |b2: f64| holevo_sum_from_squares(1.0 - 2.0 * b2, b2, b2);
    let b2 = golden_section_max(sym, 0.0, 0.5, 1e-13);
    let symmetric_max = sym(b2);
    let symmetric_argmax =
        CheatParams::from_squares(1.0 - 2.0 * b2, b2, b2).expect("interior point");

    let grid = 400;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=grid {
        for j in 0..=(grid - i) {
            let (a2, b2) = (i as f64 / grid as f64, j as f64 / grid as f64);
            let v = simplex_sum(a2, b2);
            if v > best.0 {
                best = (v, a2, b2);
            }
        }
    }
    let (mut v, mut a2, mut b2) = best;
    let mut step = 1.0 / grid as f64;
    let dirs = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
    ];
    while step > 1e-14 {
        let mut improved = false;
        for (da, db) in dirs {
            let cand = simplex_sum(a2 + da * step, b2 + db * step);
            if cand > v {
                (v, a2, b2) = (cand, a2 + da * step, b2 + db * step);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let unconstrained_argmax =
        CheatParams::from_squares(a2, b2, 1.0 - a2 - b2).expect("simplex point");

    let (max_sum, argmax) = if symmetric_max >= v {
        (symmetric_max, symmetric_argmax)
    } else {
        (v, unconstrained_argmax)
    };
    HolevoSumMax {
        max_sum,
        argmax,
        symmetric_max,
        symmetric_argmax,
        unconstrained_max: v,
        unconstrained_argmax,
    }
}

/// `a²` maximizing `(P_r - ½)² + (P_y - ½)²`, found by golden-section search
/// with the remaining weight split evenly between `b²` and `c²`.
pub fn circle_equality_locus() -> f64 {
    let lhs = |a2: f64| {
        let p = CheatParams::from_squares(a2, (1.0 - a2) / 2.0, (1.0 - a2) / 2.0)
            .expect("simplex point");
        0.25 - guess_probs(&p).circle_margins().0
    };
    golden_section_max(lhs, 0.0, 1.0, 1e-12)
}

/// One Haar sample of the tradeoff study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSample {
    pub params: CheatParams,
    pub triple: HolevoTriple,
}

/// Largest `χ_y` among samples whose `max(χ_r, χ_{y⊕r})` falls in `[left, left + width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveBin {
    pub left: f64,
    pub center: f64,
    pub max_h2: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub n_samples: usize,
    pub bin_width: f64,
    pub seed: u64,
    pub bins: Vec<CurveBin>,
    /// Largest `χ_y + max(χ_r, χ_{y⊕r})` over all samples.
    pub max_sum: f64,
    pub argmax: TradeoffSample,
    #[serde(skip)]
    pub samples: Vec<TradeoffSample>,
}

impl TradeoffCurve {
    /// Bins whose maximum exceeds `h(min(1 - left + slack, ½))` by more than `tol`.
    pub fn envelope_violations(&self, slack: f64, tol: f64) -> Vec<CurveBin> {
        self.bins
            .iter()
            .filter(|b| {
                let delta = 1.0 - b.left + slack;
                delta < 0.5 && b.max_h2 > binary_entropy(delta.max(0.0)).expect("in range") + tol
            })
            .copied()
            .collect()
    }
}

pub fn tradeoff_curve(n_samples: usize, bin_width: f64, seed: u64) -> Result<TradeoffCurve> {
    if n_samples == 0 {
        return Err(Error::Config("need at least one sample".into()));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::Config(format!(
            "bin width {bin_width} must be positive"
        )));
    }
    let samples: Vec<TradeoffSample> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, "tradeoff", i);
            let psi = haar_random_pure(9, &mut rng).expect("dim 9");
            let params = params_from_two_qutrit(&psi).expect("normalized two-qutrit state");
            TradeoffSample {
                params,
                triple: holevo_triple(&params),
            }
        })
        .collect();

    let mut bins: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    let mut argmax = samples[0];
    let mut max_sum = f64::NEG_INFINITY;
    for s in &samples {
        let (h1, h2) = (s.triple.h1(), s.triple.h2());
        let k = (h1 / bin_width).floor() as i64;
        let entry = bins.entry(k).or_insert((f64::NEG_INFINITY, 0));
        entry.0 = entry.0.max(h2);
        entry.1 += 1;
        if h1 + h2 > max_sum {
            max_sum = h1 + h2;
            argmax = *s;
        }
    }
    let bins = bins
        .into_iter()
        .map(|(k, (max_h2, count))| CurveBin {
            left: k as f64 * bin_width,
            center: (k as f64 + 0.5) * bin_width,
            max_h2,
            count,
        })
        .collect();
    Ok(TradeoffCurve {
        n_samples,
        bin_width,
        seed,
        bins,
        max_sum,
        argmax,
        samples,
    })
}

/// Guessing probabilities at the extreme points of the two bias inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    /// Bob guessing honest Alice's input.
    pub p_b: f64,
    /// Bob telling an honest input from the `y`-learning cheat.
    pub p_b_prime: f64,
    /// Alice guessing one output while knowing the other.
    pub p_a: f64,
    /// Alice guessing `r` while knowing `y`.
    pub p_ar: f64,
    /// Alice guessing `y` while knowing `r`.
    pub p_ay: f64,
    /// `2 p_b + p_a`.
    pub input_bias_sum: f64,
    /// `2 p_b_prime + max(p_ar, p_ay)`.
    pub cheat_bias_sum: f64,
}

fn average(states: &[PureState]) -> DensityOperator {
    let parts: Vec<(f64, DensityOperator)> = states
        .iter()
        .map(|s| (1.0 / states.len() as f64, s.density()))
        .collect();
    Ensemble::new(parts).expect("uniform mixture").average()
}

fn guess(params: &CheatParams, label: Label) -> f64 {
    helstrom_probability(&returned_ensemble(params, label)).expect("binary label")
}

pub fn theorem3_report() -> Theorem3Report {
    let honest_avg = |x: bool| average(&[alice_prepare(x, false), alice_prepare(x, true)]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let learn_y_pair = [
        PureState::from_real(&[h, h, 0.0]).expect("unit"),
        PureState::from_real(&[h, -h, 0.0]).expect("unit"),
    ];
    let p_b = 0.5 * (1.0 + trace_distance(&honest_avg(false), &honest_avg(true)).expect("dim 3"));
    let p_b_prime =
        0.5 * (1.0 + trace_distance(&honest_avg(false), &average(&learn_y_pair)).expect("dim 3"));

    let learn_y = CheatParams::new(h, h, 0.0).expect("unit");
    let p_a = guess(&CheatParams::honest(false), Label::YxorR)
        .max(guess(&CheatParams::honest(true), Label::R));
    let p_ar = guess(&learn_y, Label::R);
    let p_ay = guess(&CheatParams::honest(false), Label::Y);
    Theorem3Report {
        p_b,
        p_b_prime,
        p_a,
        p_ar,
        p_ay,
        input_bias_sum: 2.0 * p_b + p_a,
        cheat_bias_sum: 2.0 * p_b_prime + p_ar.max(p_ay),
    }
}

/// Both sides of every step in the bound on information carried by an error rate `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoDeltaRow {
    pub delta: f64,
    /// The six expressions of the chain, first to last.
    pub lines: [f64; 6],
    /// Mutual information of the joint distribution `(½, 0, δ, ½ - δ)`.
    pub joint_information: f64,
    /// Largest deviation among the steps claimed as equalities.
    pub equality_residual: f64,
    /// `line4 - line3` and `line6 - line5`.
    pub strict_margins: [f64; 2],
}

impl InfoDeltaRow {
    pub fn holds(&self, tol: f64) -> bool {
        self.equality_residual <= tol && self.strict_margins.iter().all(|&m| m > 0.0)
    }
}

pub fn infodelta_check(grid: &[f64]) -> Result<Vec<InfoDeltaRow>> {
    grid.iter()
        .map(|&d| {
            if !(d > 0.0 && d < 0.1) {
                return Err(Error::Domain(format!("delta {d} outside (0, 0.1)")));
            }
            let l = d.log2();
            let lines = [
                0.5 + d * l - (0.5 + d) * (0.5 + d).log2(),
                0.5 + d * l - (0.5 + d) * ((1.0 + 2.0 * d).log2() - 1.0),
                1.0 + d + d * l - (0.5 + d) * (1.0 + 2.0 * d).log2(),
                1.0 + d + d * l,
                1.0 + d * (2.0 * d).log2(),
                1.0 - 2.0 * d,
            ];
            let joint_information =
                mutual_information_from_joint(&[vec![0.5, 0.0], vec![d, 0.5 - d]]);
            let equality_residual = [
                (lines[0] - lines[1]).abs(),
                (lines[1] - lines[2]).abs(),
                (lines[3] - lines[4]).abs(),
                (lines[0] - joint_information).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            Ok(InfoDeltaRow {
                delta: d,
                lines,
                joint_information,
                equality_residual,
                strict_margins: [lines[3] - lines[2], lines[5] - lines[4]],
            })
        })
        .collect()
}
