use otlab::numerics::{haar_random_pure, holevo};
use otlab::rng::substream;
use otlab::security::*;
use proptest::prelude::*;

fn params(seed: u64) -> CheatParams {
    CheatParams::random(&mut substream(seed, "params", 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn closed_forms_match_ensembles(seed in any::<u64>()) {
        let p = params(seed);
        let t = holevo_triple(&p);
        let g = guess_probs(&p);
        for (label, chi, guess) in [
            (Label::Y, t.chi_y, g.p_y),
            (Label::R, t.chi_r, g.p_r),
            (Label::YxorR, t.chi_yxr, g.p_yxr),
        ] {
            let ens = returned_ensemble(&p, label);
            prop_assert!((holevo(&ens) - chi).abs() <= 1e-10);
            prop_assert!((helstrom_probability(&ens).unwrap() - guess).abs() <= 1e-10);
        }
    }

    #[test]
    fn guessing_stays_inside_circles(seed in any::<u64>()) {
        let (m1, m2) = guess_probs(&params(seed)).circle_margins();
        prop_assert!(m1 >= -1e-12 && m2 >= -1e-12);
    }

    #[test]
    fn tradeoff_bounds_hold(seed in any::<u64>()) {
        prop_assert_eq!(check_tradeoff_bounds(&params(seed)).violations(1e-12), 0);
    }

    #[test]
    fn holevo_sum_never_exceeds_the_maximum(seed in any::<u64>()) {
        let t = holevo_triple(&params(seed));
        let max = (3.0 + 5f64.sqrt()).log2() - 1.0;
        prop_assert!(t.chi_y + t.chi_r <= max + 1e-12);
        prop_assert!(t.h1() + t.h2() <= max + 1e-12);
    }

    #[test]
    fn two_qutrit_reduction_keeps_holevo_quantities(seed in any::<u64>()) {
        let psi = haar_random_pure(9, &mut substream(seed, "ent", 0)).unwrap();
        let t = holevo_triple(&params_from_two_qutrit(&psi).unwrap());
        for (label, chi) in [(Label::Y, t.chi_y), (Label::R, t.chi_r), (Label::YxorR, t.chi_yxr)] {
            let direct = holevo(&entangled_returned_ensemble(&psi, label).unwrap());
            prop_assert!((direct - chi).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_measurement_information_sums_at_most_one(seed in any::<u64>(), elements in 3usize..=7) {
        let mut rng = substream(seed, "povm", 0);
        let p = CheatParams::random(&mut rng);
        let m = random_real_povm(3, elements, &mut rng).unwrap();
        let iy = information(&p, Label::Y, &m).unwrap();
        let ir = information(&p, Label::R, &m).unwrap();
        let ix = information(&p, Label::YxorR, &m).unwrap();
        prop_assert!(iy + ir.max(ix) <= 1.0 + 1e-9);
        prop_assert!(information(&p, Label::Joint, &m).unwrap() <= holevo(&returned_ensemble(&p, Label::Joint)) + 1e-9);
    }

    #[test]
    fn reduced_measurement_carries_at_most_one_bit(seed in any::<u64>(), elements in 3usize..=6) {
        let mut rng = substream(seed, "lemma", 0);
        let p = CheatParams::random(&mut rng);
        let m = random_real_povm(3, elements, &mut rng).unwrap();
        prop_assert!(lemma1_check(&m, &p).unwrap().reduced_information <= 1.0 + 1e-9);
    }
}
