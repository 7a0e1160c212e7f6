//! Dense complex linear algebra on small Hilbert spaces and the
//! information-theoretic primitives built on it.
//!
//! Dimensions in this crate never exceed 9, so every routine works on dense
//! matrices and uses a Hermitian eigensolver. All information quantities are
//! in bits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance on the Euclidean norm of a pure state.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on Hermiticity and unit trace of a density operator.
pub const OPERATOR_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_TOL` count as numerical zero.
pub const PSD_TOL: f64 = 1e-10;
/// Entrywise tolerance on POVM completeness and element Hermiticity.
pub const POVM_TOL: f64 = 1e-10;
/// Tolerance on ensemble probabilities summing to one.
pub const PROB_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `x log2 x` with the continuous extension `0 log 0 = 0`.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlog2x(p)).sum::<f64>()
}

/// Entropy of a spectrum; eigenvalues in `[-PSD_TOL, 0)` are clamped to zero.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    if let Some(&bad) = eigenvalues.iter().find(|&&l| l < -PSD_TOL) {
        return Err(Error::InvalidOperator(format!(
            "negative eigenvalue {bad:e} below tolerance"
        )));
    }
    Ok(shannon_entropy(
        &eigenvalues.iter().map(|&l| l.max(0.0)).collect::<Vec<_>>(),
    ))
}

fn max_hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues below this fraction of the largest are round-off and taken as zero before a square root.
const EIGEN_NOISE: f64 = 1e-14;

fn noise_floor(values: &[f64]) -> f64 {
    EIGEN_NOISE * values.iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

fn root_of_eigenvalue(l: f64, floor: f64) -> f64 {
    if l <= floor {
        0.0
    } else {
        l.sqrt()
    }
}

/// Square root of a positive semidefinite matrix; round-off eigenvalues are dropped.
fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let floor = noise_floor(&values);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| cr(root_of_eigenvalue(l, floor))),
    );
    &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint()
}

fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Real part of `Tr(a b)`.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc.re
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(Self { amplitudes: v })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| cr(a)).collect())
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut v = CVector::zeros(dim);
        v[index] = cr(1.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `U|self>`; the result must stay normalized.
    pub fn evolve(&self, unitary: &CMatrix) -> Result<PureState> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::Shape(format!(
                "{}x{} operator on dim {}",
                unitary.nrows(),
                unitary.ncols(),
                self.dim()
            )));
        }
        let v = unitary * &self.amplitudes;
        PureState::new(v.iter().copied().collect())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut v = CVector::zeros(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                v[i * other.dim() + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        PureState { amplitudes: v }
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Shape(format!(
                "density operator must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = max_hermitian_defect(&matrix);
        if !(defect <= OPERATOR_TOL) {
            return Err(Error::InvalidOperator(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > OPERATOR_TOL || trace.im.abs() > OPERATOR_TOL {
            return Err(Error::InvalidOperator(format!("trace {trace} is not 1")));
        }
        let lowest = hermitian_eigenvalues(&matrix)[0];
        if lowest < -PSD_TOL {
            return Err(Error::InvalidOperator(format!(
                "not positive semidefinite (eigenvalue {lowest:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(weights.len(), weights.iter().map(|&w| cr(w)));
        Self::new(CMatrix::from_diagonal(&d))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).unscale(dim as f64),
        }
    }

    /// Convex combination `sum_i w_i rho_i`.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?
            .1
            .dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::Shape("mixture of different dimensions".into()));
            }
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative weight {w}")));
            }
            acc += rho.matrix.scale(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Spectrum in ascending order, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .map(|l| l.max(0.0))
            .collect()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix)
    }

    /// `Tr(A rho)` for Hermitian `A`.
    pub fn expectation(&self, observable: &CMatrix) -> f64 {
        trace_product(observable, &self.matrix)
    }
}

/// Finite list of positive semidefinite operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no elements".into()))?
            .nrows();
        let mut total = CMatrix::zeros(dim, dim);
        for (j, m) in elements.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidMeasurement(format!(
                    "element {j} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let defect = max_hermitian_defect(m);
            if !(defect <= POVM_TOL) {
                return Err(Error::InvalidMeasurement(format!(
                    "element {j} not Hermitian (defect {defect:e})"
                )));
            }
            let lowest = hermitian_eigenvalues(m)[0];
            if lowest < -PSD_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element {j} has negative eigenvalue {lowest:e}"
                )));
            }
            total += m;
        }
        let deviation = (total - identity(dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !(deviation <= POVM_TOL) {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to identity only within {deviation:e}"
            )));
        }
        Ok(Self { dim, elements })
    }

    /// Projective measurement onto an orthonormal list of states.
    pub fn projective(basis: &[PureState]) -> Result<Self> {
        Self::new(basis.iter().map(PureState::projector).collect())
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            dim,
            elements: (0..dim)
                .map(|i| PureState::basis(dim, i).projector())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// Outcome distribution on `rho`; tiny negative Born values are clamped.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::Shape(format!(
                "POVM of dim {} on state of dim {}",
                self.dim,
                rho.dim()
            )));
        }
        Ok(self
            .elements
            .iter()
            .map(|m| rho.expectation(m).max(0.0))
            .collect())
    }

    /// Outcome distribution on a pure state.
    pub fn pure_probabilities(&self, psi: &PureState) -> Result<Vec<f64>> {
        if psi.dim() != self.dim {
            return Err(Error::Shape(format!(
                "POVM of dim {} on state of dim {}",
                self.dim,
                psi.dim()
            )));
        }
        let v = psi.amplitudes();
        Ok(self
            .elements
            .iter()
            .map(|m| v.dotc(&(m * v)).re.max(0.0))
            .collect())
    }
}

/// Classical-quantum ensemble `{p_i, rho_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, DensityOperator)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityOperator)>) -> Result<Self> {
        let dim = entries
            .first()
            .ok_or_else(|| Error::Domain("empty ensemble".into()))?
            .1
            .dim();
        if entries.iter().any(|(_, rho)| rho.dim() != dim) {
            return Err(Error::Shape("ensemble states differ in dimension".into()));
        }
        if let Some((p, _)) = entries.iter().find(|(p, _)| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries })
    }

    /// Equiprobable ensemble.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityOperator)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }

    pub fn average(&self) -> DensityOperator {
        let dim = self.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (p, rho) in &self.entries {
            acc += rho.matrix().scale(*p);
        }
        DensityOperator { matrix: acc }
    }
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

fn require_same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "operators of dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// `D(rho, sigma) = 1/2 Tr|rho - sigma|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    require_same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let d = 0.5
        * hermitian_eigenvalues(&diff)
            .iter()
            .map(|l| l.abs())
            .sum::<f64>();
    Ok(d.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`, unsquared.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    require_same_dim(rho, sigma)?;
    let root = psd_sqrt(rho.matrix());
    let inner = &root * sigma.matrix() * &root;
    // symmetrize away round-off before the eigensolver
    let inner = (&inner + inner.adjoint()).unscale(2.0);
    let values = hermitian_eigenvalues(&inner);
    let floor = noise_floor(&values);
    let f: f64 = values.iter().map(|&l| root_of_eigenvalue(l, floor)).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    First,
    Second,
}

/// Reduced operator on `keep` of a state on `dims.0 x dims.1`.
pub fn partial_trace(
    state: &DensityOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<DensityOperator> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || d1 * d2 != state.dim() {
        return Err(Error::Shape(format!(
            "dimension {} does not factor as {d1} x {d2}",
            state.dim()
        )));
    }
    let m = state.matrix();
    let reduced = match keep {
        Subsystem::First => CMatrix::from_fn(d1, d1, |i, k| {
            (0..d2).map(|j| m[(i * d2 + j, k * d2 + j)]).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(d2, d2, |j, l| {
            (0..d1).map(|i| m[(i * d2 + j, i * d2 + l)]).sum()
        }),
    };
    DensityOperator::new(reduced)
}

/// Haar-distributed pure state: i.i.d. complex Gaussians, normalized.
pub fn haar_random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::Domain(format!(
            "Haar sampling needs dim >= 2, got {dim}"
        )));
    }
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                c(re, im)
            })
            .collect();
        if let Ok(state) = PureState::normalized(amps) {
            return Ok(state);
        }
    }
}

/// Joint distribution `P(i, j) = p_i Tr(M_j rho_i)`.
pub fn joint_distribution(ensemble: &Ensemble, povm: &Povm) -> Result<Vec<Vec<f64>>> {
    ensemble
        .entries()
        .iter()
        .map(|(p, rho)| {
            Ok(povm
                .probabilities(rho)?
                .into_iter()
                .map(|q| p * q)
                .collect())
        })
        .collect()
}

/// `I(X;J)` of a joint distribution given as rows `x`, columns `j`.
pub fn mutual_information_from_joint(joint: &[Vec<f64>]) -> f64 {
    let total: f64 = joint.iter().flatten().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let cols = joint.first().map_or(0, Vec::len);
    let row: Vec<f64> = joint
        .iter()
        .map(|r| r.iter().sum::<f64>() / total)
        .collect();
    let col: Vec<f64> = (0..cols)
        .map(|j| joint.iter().map(|r| r[j]).sum::<f64>() / total)
        .collect();
    let mut info = 0.0;
    for (i, r) in joint.iter().enumerate() {
        for (j, &pij) in r.iter().enumerate() {
            let pij = pij / total;
            if pij > 0.0 {
                info += pij * (pij / (row[i] * col[j])).log2();
            }
        }
    }
    info.max(0.0)
}

/// Classical mutual information between the ensemble label and the outcome.
pub fn mutual_information(ensemble: &Ensemble, povm: &Povm) -> Result<f64> {
    Ok(mutual_information_from_joint(&joint_distribution(
        ensemble, povm,
    )?))
}

/// Holevo quantity `S(sum p_i rho_i) - sum p_i S(rho_i)`.
pub fn holevo(ensemble: &Ensemble) -> f64 {
    let mixed = von_neumann_entropy(&ensemble.average());
    let conditional: f64 = ensemble
        .entries()
        .iter()
        .map(|(p, rho)| p * von_neumann_entropy(rho))
        .sum();
    (mixed - conditional).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(amps: &[f64]) -> PureState {
        PureState::from_real(amps).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityOperator::maximally_mixed(3)),
            3f64.log2(),
            epsilon = 1e-12
        );
        let s = 0.5f64.sqrt();
        assert_abs_diff_eq!(
            von_neumann_entropy(&ket(&[s, 0.0, s]).density()),
            0.0,
            epsilon = 1e-12
        );
        let dyadic = DensityOperator::diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&dyadic), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_operators() {
        let mut m = CMatrix::identity(2, 2).unscale(2.0);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::InvalidOperator(_))
        ));
        assert!(matches!(
            DensityOperator::diagonal(&[0.6, 0.6]),
            Err(Error::InvalidOperator(_))
        ));
        assert!(matches!(
            DensityOperator::diagonal(&[1.2, -0.2]),
            Err(Error::InvalidOperator(_))
        ));
        assert!(matches!(
            entropy_of_spectrum(&[1.0 + 1e-9, -1e-9]),
            Err(Error::InvalidOperator(_))
        ));
        assert_abs_diff_eq!(entropy_of_spectrum(&[1.0, -1e-11]).unwrap(), 0.0);
    }

    #[test]
    fn trace_distance_examples() {
        let rho0 = DensityOperator::diagonal(&[0.5, 0.0, 0.5]).unwrap();
        let rho1 = DensityOperator::diagonal(&[0.0, 0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(trace_distance(&rho0, &rho0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&rho0, &rho1).unwrap(), 0.5, epsilon = 1e-12);

        // returned y-ensemble at a = b = 1/sqrt 2, c = 0: two orthogonal pure states
        let s = 0.5f64.sqrt();
        let y0 = ket(&[s, s, 0.0]).density();
        let y1 = ket(&[s, -s, 0.0]).density();
        assert_abs_diff_eq!(trace_distance(&y0, &y1).unwrap(), 1.0, epsilon = 1e-12);

        let qubit = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            trace_distance(&rho0, &qubit),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        let s = 0.5f64.sqrt();
        let tau00 = ket(&[s, 0.0, s]).density();
        let tau10 = ket(&[0.0, s, s]).density();
        assert_abs_diff_eq!(fidelity(&tau00, &tau00).unwrap(), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(fidelity(&tau00, &tau10).unwrap(), 0.5, epsilon = 1e-7);
        let e0 = PureState::basis(3, 0).density();
        let e1 = PureState::basis(3, 1).density();
        assert_abs_diff_eq!(fidelity(&e0, &e1).unwrap(), 0.0, epsilon = 1e-7);
        let mixed = DensityOperator::maximally_mixed(3);
        assert_abs_diff_eq!(fidelity(&mixed, &mixed).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            fidelity(&mixed, &DensityOperator::maximally_mixed(2)),
            Err(Error::Shape(_))
        ));
    }

    /// Partial trace by explicit index bookkeeping over the pure amplitudes.
    fn reduce_second_oracle(psi: &PureState, d1: usize, d2: usize) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![c(0.0, 0.0); d2]; d2];
        for (j, row) in out.iter_mut().enumerate() {
            for (l, entry) in row.iter_mut().enumerate() {
                for i in 0..d1 {
                    *entry += psi.amplitude(i * d2 + j) * psi.amplitude(i * d2 + l).conj();
                }
            }
        }
        out
    }

    #[test]
    fn partial_trace_examples() {
        let product = PureState::basis(3, 0).tensor(&PureState::basis(3, 1));
        let first = partial_trace(&product.density(), (3, 3), Subsystem::First).unwrap();
        assert_abs_diff_eq!(
            trace_distance(&first, &PureState::basis(3, 0).density()).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        let s = 0.5f64.sqrt();
        let mut amps = vec![0.0; 9];
        amps[0] = s;
        amps[4] = s;
        let bell = ket(&amps);
        let second = partial_trace(&bell.density(), (3, 3), Subsystem::Second).unwrap();
        let expected = DensityOperator::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        assert_abs_diff_eq!(
            trace_distance(&second, &expected).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        // a|00> + b|11> + c|22> with a = c = 1/sqrt 2, b = 0
        let mut amps = vec![0.0; 9];
        amps[0] = s;
        amps[8] = s;
        let psi = ket(&amps);
        let reduced = partial_trace(&psi.density(), (3, 3), Subsystem::Second).unwrap();
        let oracle = reduce_second_oracle(&psi, 3, 3);
        for j in 0..3 {
            for l in 0..3 {
                assert_abs_diff_eq!(
                    reduced.matrix()[(j, l)].re,
                    oracle[j][l].re,
                    epsilon = 1e-14
                );
                assert_abs_diff_eq!(
                    reduced.matrix()[(j, l)].im,
                    oracle[j][l].im,
                    epsilon = 1e-14
                );
            }
        }
        assert_abs_diff_eq!(oracle[0][0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle[1][1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle[2][2].re, 0.5, epsilon = 1e-15);

        assert!(matches!(
            partial_trace(&psi.density(), (2, 4), Subsystem::First),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn partial_trace_matches_oracle_on_haar_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let psi = haar_random_pure(9, &mut rng).unwrap();
            let reduced = partial_trace(&psi.density(), (3, 3), Subsystem::Second).unwrap();
            let oracle = reduce_second_oracle(&psi, 3, 3);
            for j in 0..3 {
                for l in 0..3 {
                    assert!((reduced.matrix()[(j, l)] - oracle[j][l]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn haar_sampling_contract() {
        let a = haar_random_pure(9, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = haar_random_pure(9, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let other = haar_random_pure(9, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert_abs_diff_eq!(a.amplitudes().norm(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            haar_random_pure(1, &mut ChaCha8Rng::seed_from_u64(5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn haar_first_amplitude_weight_is_one_third() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| {
                haar_random_pure(3, &mut rng)
                    .unwrap()
                    .amplitude(0)
                    .norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn haar_is_unitarily_invariant_in_distribution() {
        // fixed unitary: discrete Fourier transform on C^3
        let w = std::f64::consts::TAU / 3.0;
        let f = CMatrix::from_fn(3, 3, |j, k| {
            Complex64::from_polar(1.0 / 3f64.sqrt(), w * (j * k) as f64)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 50_000;
        let (mut plain, mut rotated) = (0.0, 0.0);
        for _ in 0..n {
            let psi = haar_random_pure(3, &mut rng).unwrap();
            plain += psi.amplitude(0).norm_sqr().powi(2);
            rotated += psi.evolve(&f).unwrap().amplitude(0).norm_sqr().powi(2);
        }
        // E|psi_0|^4 = 2 / (d (d + 1)) = 1/6 for d = 3
        assert!((plain / n as f64 - 1.0 / 6.0).abs() < 0.005);
        assert!((rotated / n as f64 - 1.0 / 6.0).abs() < 0.005);
    }

    #[test]
    fn mutual_information_examples() {
        let e0 = PureState::basis(2, 0);
        let e1 = PureState::basis(2, 1);
        let ens = Ensemble::uniform(vec![e0.density(), e1.density()]).unwrap();
        let proj = Povm::projective(&[e0, e1]).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&ens, &proj).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let trivial = Povm::new(vec![CMatrix::identity(2, 2)]).unwrap();
        assert_abs_diff_eq!(
            mutual_information(&ens, &trivial).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            mutual_information(&ens, &Povm::computational(3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn povm_validation() {
        let half = CMatrix::identity(2, 2).unscale(2.0);
        assert!(matches!(
            Povm::new(vec![half.clone()]),
            Err(Error::InvalidMeasurement(_))
        ));
        let neg = CMatrix::from_diagonal(&DVector::from_vec(vec![cr(1.5), cr(-0.5)]));
        let comp = CMatrix::from_diagonal(&DVector::from_vec(vec![cr(-0.5), cr(1.5)]));
        assert!(matches!(
            Povm::new(vec![neg, comp]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(matches!(
            Povm::new(vec![]),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(Povm::new(vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn holevo_examples() {
        let single = Ensemble::uniform(vec![DensityOperator::maximally_mixed(3)]).unwrap();
        assert_abs_diff_eq!(holevo(&single), 0.0, epsilon = 1e-12);
        let ens = Ensemble::uniform(vec![
            PureState::basis(2, 0).density(),
            PureState::basis(2, 1).density(),
        ])
        .unwrap();
        assert_abs_diff_eq!(holevo(&ens), 1.0, epsilon = 1e-12);
        assert!(matches!(Ensemble::new(vec![]), Err(Error::Domain(_))));
    }

    #[test]
    fn holevo_of_y_ensemble_at_symmetric_optimum() {
        // (a|0> +- b|1>)(..) + c^2|2><2| with a^2 = sqrt5/5, b^2 = c^2 = (5 - sqrt5)/10
        let s5 = 5f64.sqrt();
        let a = (s5 / 5.0).sqrt();
        let b = ((5.0 - s5) / 10.0).sqrt();
        let c2 = b * b;
        let build = |sign: f64| {
            let v = CVector::from_vec(vec![cr(a), cr(sign * b), cr(0.0)]);
            let mut m = &v * v.adjoint();
            m[(2, 2)] = cr(c2);
            DensityOperator::new(m).unwrap()
        };
        let ens = Ensemble::uniform(vec![build(1.0), build(-1.0)]).unwrap();
        assert_abs_diff_eq!(holevo(&ens), 0.694_241_9, epsilon = 1e-6);
        assert_abs_diff_eq!(
            holevo(&ens),
            ((3.0 + s5).log2() - 1.0) / 2.0,
            epsilon = 1e-12
        );
    }
}
