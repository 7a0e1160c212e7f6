use otlab::numerics::*;
use otlab::rng::{substream, SimRng};
use proptest::prelude::*;
use rand::Rng;

fn random_density(dim: usize, rng: &mut SimRng) -> DensityOperator {
    let rank = rng.random_range(1..=dim);
    let states: Vec<DensityOperator> = (0..rank)
        .map(|_| haar_random_pure(dim, rng).unwrap().density())
        .collect();
    let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let parts: Vec<(f64, &DensityOperator)> =
        weights.iter().map(|w| w / total).zip(&states).collect();
    DensityOperator::mixture(&parts).unwrap()
}

/// Rank-one elements `S^{-1/2} |v_j><v_j| S^{-1/2}` with `S = Σ |v_j><v_j|`.
fn random_povm(dim: usize, elements: usize, rng: &mut SimRng) -> Povm {
    let raw: Vec<CMatrix> = (0..elements)
        .map(|_| haar_random_pure(dim, rng).unwrap().projector())
        .collect();
    let s = raw.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let (vals, vecs) = hermitian_eigen(&s);
    let inv_sqrt = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        vals.iter().map(|v| cr(1.0 / v.sqrt())),
    ));
    let w = &vecs * inv_sqrt * vecs.adjoint();
    Povm::new(raw.iter().map(|m| &w * m * &w).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn entropy_of_diagonal_matches_shannon(seed in any::<u64>(), dim in 1usize..=9) {
        let mut rng = substream(seed, "diag", 0);
        let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum::<f64>().max(1e-300);
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rho = DensityOperator::diagonal(&p).unwrap();
        let direct: f64 = -p.iter().filter(|&&q| q > 0.0).map(|q| q * q.log2()).sum::<f64>();
        prop_assert!((von_neumann_entropy(&rho) - direct).abs() <= 1e-10);
    }

    #[test]
    fn mutual_information_never_exceeds_holevo(seed in any::<u64>(), n in 2usize..=4, elements in 3usize..=6) {
        let mut rng = substream(seed, "dpi", 0);
        let states: Vec<DensityOperator> = (0..n).map(|_| random_density(3, &mut rng)).collect();
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = weights.iter().sum();
        let ensemble = Ensemble::new(weights.iter().map(|w| w / total).zip(states).collect()).unwrap();
        let povm = random_povm(3, elements, &mut rng);
        prop_assert!(mutual_information(&ensemble, &povm).unwrap() <= holevo(&ensemble) + 1e-9);
    }

    #[test]
    fn trace_distance_bounded_by_fidelity(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = substream(seed, "fid", 0);
        let rho = random_density(dim, &mut rng);
        let sigma = random_density(dim, &mut rng);
        let d = trace_distance(&rho, &sigma).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert!(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn partial_trace_is_a_state(seed in any::<u64>()) {
        let mut rng = substream(seed, "ptrace", 0);
        let psi = haar_random_pure(9, &mut rng).unwrap().density();
        for keep in [Subsystem::First, Subsystem::Second] {
            let reduced = partial_trace(&psi, (3, 3), keep).unwrap();
            let trace: f64 = (0..3).map(|i| reduced.matrix()[(i, i)].re).sum();
            prop_assert!((trace - 1.0).abs() <= 1e-12);
            prop_assert!(hermitian_eigenvalues(reduced.matrix())[0] >= -1e-12);
        }
        let a = partial_trace(&psi, (3, 3), Subsystem::First).unwrap();
        let b = partial_trace(&psi, (3, 3), Subsystem::Second).unwrap();
        prop_assert!((von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() <= 1e-9);
    }
}
