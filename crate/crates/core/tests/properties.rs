//! Seed-driven property tests: proptest picks the seeds, the generators in
//! `random` build the inputs.

use std::sync::Arc;

use compers_core::component::{classify, component_split, extend_module, extension_split, is_interval};
use compers_core::encoding::{build_encoding, validate_encoding};
use compers_core::pmodule::{fitting_split, hom_space, is_isomorphic, IsoOptions};
use compers_core::random::{self, rng};
use compers_core::{Field, Matrix, NaturalTransformation};
use proptest::prelude::*;

const BIG_PRIME: u32 = 2_147_483_647;

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rationals),
        Just(Field::prime(2).unwrap()),
        Just(Field::prime(3).unwrap()),
        Just(Field::prime(BIG_PRIME).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity(seed in any::<u64>(), rows in 0usize..6, cols in 0usize..6, field in fields()) {
        let mut r = rng(seed);
        let m = Matrix::from_fn(field, rows, cols, |_, _| field.from_i64(rand::Rng::gen_range(&mut r, -2..=2)));
        let null = m.nullspace();
        prop_assert_eq!(m.rank() + null.len(), cols);
        for v in null {
            prop_assert!(m.apply(&v).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn split_then_extend_returns_the_input(seed in any::<u64>(), field in fields()) {
        let mut r = rng(seed);
        let m = random::random_component_module(&mut r, 7, 3, field);
        let cs = classify(&m).unwrap();
        let (g, _) = cs.minimal_generator().unwrap();
        let s = component_split(&cs).unwrap();
        prop_assert!(is_interval(&s.interval.module));
        prop_assert!(s.idempotent.is_idempotent());
        prop_assert!(s.sum_witness().unwrap().is_isomorphism());
        let ext = Arc::new(extend_module(&s.semi.module, Some(g)).unwrap());
        let iso = is_isomorphic(&ext, &m, IsoOptions::default()).unwrap();
        prop_assert!(iso.is_isomorphic());
    }

    #[test]
    fn extension_split_inverts_extension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let semi = random::random_semi_component_module(&mut r, 6, 3, Field::Rationals);
        let bounded = semi.poset().minimal_elements().len() == 1;
        prop_assume!(bounded);
        let ext = Arc::new(extend_module(&semi, None).unwrap());
        let back = extension_split(&classify(&ext).unwrap()).unwrap();
        prop_assert_eq!(&*back.semi, &*semi);
        prop_assert!(back.witness.is_isomorphism());
    }

    #[test]
    fn fitting_summands_resum(seed in any::<u64>(), field in fields()) {
        let mut r = rng(seed);
        let n = rand::Rng::gen_range(&mut r, 1..=5);
        let p = Arc::new(random::random_poset(&mut r, n, 0.5));
        let m = random::random_module(&mut r, &p, field, 4);
        let basis = hom_space(&m, &m).unwrap();
        let coeffs: Vec<_> = basis.iter().map(|_| field.from_i64(rand::Rng::gen_range(&mut r, -2..=2))).collect();
        let f = if basis.is_empty() { NaturalTransformation::zero(&m, &m) } else { NaturalTransformation::linear_combination(&basis, &coeffs) };
        let s = fitting_split(&m, &f).unwrap();
        prop_assert_eq!(s.kernel.module.total_dim() + s.image.module.total_dim(), m.total_dim());
        let proj_incl = s.kernel.projection.compose(&s.kernel.inclusion).unwrap();
        prop_assert!(proj_incl.is_identity());
        let proj_incl = s.image.projection.compose(&s.image.inclusion).unwrap();
        prop_assert!(proj_incl.is_identity());
    }

    #[test]
    fn encodings_validate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = rand::Rng::gen_range(&mut r, 1..=6);
        let p = Arc::new(random::random_bounded_poset(&mut r, n, 0.4));
        let m = random::random_module(&mut r, &p, Field::Rationals, 3);
        let enc = build_encoding(&m).unwrap();
        prop_assert!(validate_encoding(&enc, &m).is_ok());
    }
}
