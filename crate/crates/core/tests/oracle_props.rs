use proptest::prelude::*;

use steinberg_core::homology::build_complex;
use steinberg_core::linalg::Field;
use steinberg_core::oracle::{heilbronn_merel, manin_dim, manin_hecke};
use steinberg_core::selfcheck::field_matmul;

#[test]
fn dimensions_match_the_voronoi_pipeline() {
    for level in 1..=60 {
        let h0 = build_complex(2, level, Field::Rational).unwrap().homology(0).unwrap().dimension;
        assert_eq!(manin_dim(level).unwrap(), h0, "N = {level}");
    }
}

#[test]
fn merel_set_sizes() {
    let sizes: Vec<usize> = [2u64, 3, 5, 7].iter().map(|&l| heilbronn_merel(l).len()).collect();
    assert_eq!(sizes[0], 4);
    assert!(sizes.windows(2).all(|w| w[0] < w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hecke_operators_commute(level in 1u64..=60, a in prop::sample::select(vec![2u64, 3, 5, 7]), b in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(level % a != 0 && level % b != 0);
        let f = Field::Rational;
        let (ma, pa) = manin_hecke(level, a).unwrap();
        let (mb, _) = manin_hecke(level, b).unwrap();
        prop_assert_eq!(field_matmul(f, &ma, &mb), field_matmul(f, &mb, &ma));
        prop_assert!(pa.coeffs.iter().all(|c| c.is_integer()));
        prop_assert!(pa.coeffs.last().is_none_or(|c| *c == f.one()));
    }

    #[test]
    fn eisenstein_eigenvalue_present(level in 1u64..=60, ell in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(level % ell != 0 && level > 1);
        let (_, p) = manin_hecke(level, ell).unwrap();
        let f = Field::Rational;
        prop_assert!(p.eval(&f.from_int(ell as i64 + 1)) == f.zero());
    }
}
