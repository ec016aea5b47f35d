mod common;

use ppid_core::decomposition::{rmin_minus, rmin_plus, two_event_invariance_check};
use ppid_core::verify::{self, run_suite};
use ppid_core::{decompose, DecomposeOptions, Measures};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

#[test]
fn random_suite_has_no_violations() {
    for (k, d) in common::random_suite(11, common::RANDOM_INSTANCES, false)
        .iter()
        .enumerate()
    {
        for c in run_suite(d, &DecomposeOptions::default(), TOL).unwrap() {
            assert!(c.passed, "instance {k}: {c:?}");
        }
    }
}

#[test]
fn random_composite_suite_has_no_violations() {
    for (k, d) in common::random_suite(12, common::RANDOM_INSTANCES, true)
        .iter()
        .enumerate()
    {
        for c in run_suite(d, &DecomposeOptions::default(), TOL).unwrap() {
            assert!(c.passed, "instance {k}: {c:?}");
        }
    }
}

#[test]
fn parallel_decomposition_is_identical() {
    for d in common::random_suite(13, 20, true) {
        let a = decompose(&d, &DecomposeOptions::default()).unwrap();
        let b = decompose(
            &d,
            &DecomposeOptions {
                jobs: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a.averages(), b.averages());
        for (x, y) in a.realisations().iter().zip(b.realisations()) {
            assert_eq!(x.atoms, y.atoms);
        }
    }
}

#[test]
fn recombined_average_is_not_always_non_negative() {
    let negative = common::random_suite(14, 200, false).iter().any(|d| {
        decompose(d, &DecomposeOptions::default())
            .unwrap()
            .averages()
            .iter()
            .any(|a| a.pi < -1e-6)
    });
    assert!(negative);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pointwise_atoms_are_non_negative(seed in any::<u64>(), n in 1usize..=3, composite in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_distribution(&mut rng, n, composite);
        let t = decompose(&d, &DecomposeOptions::default()).unwrap();
        prop_assert!(verify::non_negativity(&t, TOL).passed);
        prop_assert!(verify::monotonicity(&t, TOL).passed);
    }

    #[test]
    fn coarsening_leaves_redundancy_alone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_distribution(&mut rng, 2, false);
        let t = decompose(&d, &DecomposeOptions::default()).unwrap();
        for r in d.realisations() {
            for node in t.nodes() {
                prop_assert!(two_event_invariance_check(&d, node, r, TOL).is_ok());
            }
        }
    }

    #[test]
    fn table_matches_direct_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_distribution(&mut rng, 3, false);
        let t = decompose(&d, &DecomposeOptions::default()).unwrap();
        let m = Measures::new(&d);
        for ra in t.realisations() {
            for (node, a) in t.nodes().iter().zip(&ra.atoms) {
                prop_assert_eq!(rmin_plus(&m, node, &ra.realisation).unwrap().value, a.r_plus);
                prop_assert_eq!(rmin_minus(&m, node, &ra.realisation).unwrap().value, a.r_minus);
            }
        }
    }
}
