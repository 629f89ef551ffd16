//! Property tests over randomly drawn groups, subgroups, and functions.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gconv_core::convolution::{convolve_def4, ProductMode};
use gconv_core::fourier::{convolve_fourier, fourier, inverse_fourier};
use gconv_core::group::{
    build_group, coset_space, lift, project, subgroup_from_generators, translate, QuotientKind,
    Space, SpaceFunction,
};
use gconv_core::repr::build_irrep_system;

const GROUP_POOL: &[&str] = &["Z6", "Z12", "D4", "S3", "S4", "Z3xZ2", "D3"];

fn arb_group() -> impl Strategy<Value = &'static str> {
    prop::sample::select(GROUP_POOL)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn project_after_lift_is_identity(spec in arb_group(), gen in 0usize..24, seed in 0u64..1000) {
        let g = build_group(spec).unwrap();
        let h = subgroup_from_generators(&g, &[gen % g.order]).unwrap();
        let kind = match seed % 3 {
            0 => QuotientKind::Left,
            1 => QuotientKind::Right,
            _ => QuotientKind::Double,
        };
        let k = if kind == QuotientKind::Double { Some(&h) } else { None };
        let x = coset_space(kind, &h, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SpaceFunction::random(Space::Quotient(x.clone()), (1, 1), &mut rng);
        let back = project(&lift(&f), &x).unwrap();
        prop_assert!(back.max_diff(&f) < 1e-12);
    }

    #[test]
    fn translation_is_an_action(spec in arb_group(), seed in 0u64..1000) {
        let g = build_group(spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let g1 = (seed as usize * 7 + 3) % g.order;
        let g2 = (seed as usize * 13 + 5) % g.order;
        let two_step = translate(g2, &translate(g1, &f).unwrap()).unwrap();
        let one_step = translate(g.mul(g2, g1), &f).unwrap();
        prop_assert_eq!(two_step.max_diff(&one_step), 0.0);
    }

    #[test]
    fn fourier_round_trip(spec in arb_group(), seed in 0u64..1000) {
        let g = build_group(spec).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SpaceFunction::random(Space::Group(g), (1, 1), &mut rng);
        let back = inverse_fourier(&fourier(&f, &sys).unwrap());
        prop_assert!(back.max_diff(&f) < 1e-9);
    }

    #[test]
    fn convolution_theorem_on_random_pairs(spec in arb_group(), seed in 0u64..1000) {
        let g = build_group(spec).unwrap();
        let sys = build_irrep_system(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SpaceFunction::random(Space::Group(g.clone()), (1, 1), &mut rng);
        let h = SpaceFunction::random(Space::Group(g), (1, 1), &mut rng);
        let spatial = convolve_def4(&f, &h, ProductMode::Scalar).unwrap();
        let viaft = convolve_fourier(&f, &h, &sys).unwrap();
        prop_assert!(spatial.max_diff(&viaft) < 1e-8);
    }
}
