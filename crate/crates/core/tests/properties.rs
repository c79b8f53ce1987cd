use barron_core::fixtures::{random_points, random_sum};
use barron_core::{canonicalize, partial_derivative, precondition, product, AtomSum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sum_from_seed(seed: u64, dim: usize, n: usize) -> AtomSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sum(&mut rng, dim, n, 4, true)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(seed in any::<u64>(), dim in 1usize..4, n in 1usize..20) {
        let s = sum_from_seed(seed, dim, n);
        let again = canonicalize(dim, true, s.atoms().to_vec()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn product_is_bilinear(seed in any::<u64>(), lambda in -3.0f64..3.0) {
        let f = sum_from_seed(seed, 2, 6);
        let g = sum_from_seed(seed ^ 1, 2, 6);
        let h = sum_from_seed(seed ^ 2, 2, 6);
        let lhs = product(&f.scale(lambda).add(&g).unwrap(), &h).unwrap();
        let rhs = product(&f, &h).unwrap().scale(lambda).add(&product(&g, &h).unwrap()).unwrap();
        let gap = lhs.sub(&rhs).unwrap().h1_norm_torus().unwrap();
        prop_assert!(gap <= 1e-12 * (1.0 + rhs.h1_norm_torus().unwrap()));
    }

    #[test]
    fn norms_are_ordered(seed in any::<u64>(), dim in 1usize..5) {
        let s = sum_from_seed(seed, dim, 12);
        let l2 = s.l2_norm_torus().unwrap();
        let h1 = s.h1_norm_torus().unwrap();
        let hm1 = s.h_minus1_norm_torus().unwrap();
        prop_assert!(hm1 <= l2 * (1.0 + 1e-15) && l2 <= h1 * (1.0 + 1e-15));
        prop_assert!(h1 <= s.tracked_norm() * (1.0 + s.support_radius().powi(2)).sqrt() * (1.0 + 1e-12));
        prop_assert!(precondition(&s).tracked_norm() <= s.tracked_norm());
    }

    #[test]
    fn add_preserves_pointwise_values(seed in any::<u64>()) {
        let f = sum_from_seed(seed, 3, 10);
        let g = sum_from_seed(seed.wrapping_add(7), 3, 10);
        let s = f.add(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in random_points(&mut rng, 3, 20) {
            let expect = f.value_at(&x) + g.value_at(&x);
            prop_assert!((s.value_at(&x) - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_radius_is_unchanged(seed in any::<u64>(), axis in 0usize..3) {
        let s = sum_from_seed(seed, 3, 10);
        let d = partial_derivative(&s, axis).unwrap();
        prop_assert!(d.support_radius() <= s.support_radius());
        prop_assert!(d.tracked_norm() <= s.support_radius() * s.tracked_norm() * (1.0 + 1e-15));
    }
}
