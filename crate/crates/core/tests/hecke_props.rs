mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use steinberg_core::hecke::{
    gaussian_binomial, hecke_cosets, hecke_in_basis, hecke_on_h0, hecke_on_h1_n2, verify_eigen_chain,
};
use steinberg_core::homology::build_complex;
use steinberg_core::linalg::{Coeff, Field, IntMatrix};
use steinberg_core::oracle::manin_hecke;
use steinberg_core::selfcheck::field_matmul;
use steinberg_core::Error;

use common::sl_matrix;

/// Whether `s^{-1} a` is an integral matrix.
fn left_divides(s: &IntMatrix, a: &IntMatrix) -> bool {
    let inv = s.inverse_rational().unwrap();
    (0..a.rows()).all(|i| {
        (0..a.cols()).all(|j| {
            let x: Coeff = (0..a.rows()).map(|k| &inv[i][k] * Coeff::from_integer(a.get(k, j).clone())).sum();
            x.is_integer()
        })
    })
}

fn central(n: usize, ell: u64, k: usize) -> IntMatrix {
    let d: Vec<i64> = (0..n).map(|i| if i + k >= n { ell as i64 } else { 1 }).collect();
    IntMatrix::diagonal(&d)
}

#[test]
fn coset_counts_and_distinctness() {
    for n in 2..=3 {
        for ell in [2u64, 3, 5] {
            for k in 1..=n {
                let op = hecke_cosets(n, ell, k).unwrap();
                assert_eq!(op.representatives.len() as u64, gaussian_binomial(n, k, ell));
                for (i, s) in op.representatives.iter().enumerate() {
                    assert_eq!(s.det().abs(), BigInt::from(ell).pow(k as u32));
                    for (j, t) in op.representatives.iter().enumerate() {
                        assert_eq!(left_divides(s, t), i == j, "n={n} l={ell} k={k}");
                    }
                }
            }
        }
    }
    assert!(matches!(hecke_cosets(2, 6, 1), Err(Error::InvalidInput(_))));
    assert!(matches!(hecke_cosets(2, 3, 0), Err(Error::InvalidInput(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_coset_is_tiled(
        (n, ell, k, g, h) in (2usize..=3).prop_flat_map(|n| (Just(n), prop::sample::select(vec![2u64, 3]), 1..=n, sl_matrix(n), sl_matrix(n)))
    ) {
        let a = g.mul(&central(n, ell, k)).mul(&h);
        let op = hecke_cosets(n, ell, k).unwrap();
        let hits: Vec<usize> = (0..op.representatives.len()).filter(|&i| left_divides(&op.representatives[i], &a)).collect();
        prop_assert_eq!(hits.len(), 1);
        prop_assert_eq!(op.coset_of(&a), Some(hits[0]));
    }

    #[test]
    fn adapted_representatives_stay_in_their_cosets(level in 1u64..=30, ell in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(level % ell != 0);
        for n in 2..=3 {
            let op = hecke_cosets(n, ell, 1).unwrap();
            let adapted = op.adapted(level).unwrap();
            for (s, t) in op.representatives.iter().zip(&adapted) {
                prop_assert!(left_divides(s, t) && left_divides(t, s));
                prop_assert!((1..n).all(|j| (t.get(0, j) % BigInt::from(level)).is_zero()));
            }
        }
    }

    #[test]
    fn basis_independence(seed in any::<u64>(), level in prop::sample::select(vec![11u64, 23, 29, 35])) {
        let c = build_complex(2, level, Field::Rational).unwrap();
        let h = c.homology(0).unwrap();
        let op = hecke_cosets(2, 3, 1).unwrap();
        let a = hecke_in_basis(&c, &op, &h, 0).unwrap();
        let b = hecke_in_basis(&c, &op, &h.with_random_basis(seed).unwrap(), 0).unwrap();
        prop_assert_eq!(a.char_poly, b.char_poly);
    }
}

#[test]
fn commutativity() {
    let mut cases = vec![(2usize, 11u64, vec![2u64, 3, 5, 7])];
    cases.extend((1..=5).map(|l| (3, l, vec![2, 3])));
    for (n, level, ells) in cases {
        let c = build_complex(n, level, Field::Rational).unwrap();
        let h = c.homology(0).unwrap();
        let ms: Vec<_> = ells
            .iter()
            .filter(|&&l| level % l != 0)
            .map(|&l| hecke_in_basis(&c, &hecke_cosets(n, l, 1).unwrap(), &h, 0).unwrap().matrix)
            .collect();
        for a in &ms {
            for b in &ms {
                assert_eq!(field_matmul(c.field, a, b), field_matmul(c.field, b, a), "n={n} N={level}");
            }
        }
    }
}

#[test]
fn oracle_agreement_beyond_squarefree_levels() {
    for level in [4u64, 8, 9, 12, 16, 18, 20, 25, 27, 28, 32, 36, 45, 49] {
        for ell in [2u64, 3, 5, 7] {
            if level % ell == 0 {
                continue;
            }
            let r = hecke_on_h0(2, level, Field::Rational, ell, 1).unwrap();
            assert_eq!(r.char_poly, manin_hecke(level, ell).unwrap().1, "N={level} l={ell}");
        }
    }
}

#[test]
fn prime_field_reports_reduce_the_rational_ones() {
    let q = hecke_on_h0(2, 11, Field::Rational, 2, 1).unwrap();
    let f = Field::Prime(7);
    let p = hecke_on_h0(2, 11, f, 2, 1).unwrap();
    let reduced: Vec<Coeff> = q.char_poly.coeffs.iter().map(|x| f.reduce(x.clone())).collect();
    assert_eq!(p.char_poly.coeffs, reduced);
}

#[test]
fn central_operator_is_the_identity() {
    for level in [1u64, 11, 15] {
        let r = hecke_on_h0(2, level, Field::Rational, 2, 2).unwrap();
        for (i, row) in r.matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(x.is_one(), i == j);
                assert!(i == j || x.is_zero());
            }
        }
    }
}

#[test]
fn bad_primes_rejected() {
    assert!(matches!(hecke_on_h0(2, 22, Field::Rational, 2, 1), Err(Error::Precondition(_))));
    assert!(matches!(hecke_on_h1_n2(33, Field::Rational, 3, 64), Err(Error::Precondition(_))));
}

/// A cusp form of level 11 with eigenvalue `a_l` contributes classes with
/// eigenvalues `l^2 + a_l` and `1 + l a_l` to `H_0` for `n = 3`.
#[test]
fn level_eleven_classes_for_n3() {
    let f = Field::Rational;
    for ell in [2u64, 3, 5] {
        let (_, p) = manin_hecke(11, ell).unwrap();
        let (roots, _) = p.split_roots();
        let a = roots.iter().find(|(_, m)| *m == 2).unwrap().0.clone();
        let l = f.from_int(ell as i64);
        let mut want = vec![(&l * &l + &a, 1usize), (f.one() + &l * &a, 1)];
        want.sort();
        let r = hecke_on_h0(3, 11, f, ell, 1).unwrap();
        let mut got = r.eigenvalues.clone();
        got.sort();
        assert_eq!(got, want, "l = {ell}");
    }
}

#[test]
fn h1_paths_agree() {
    let f = Field::Rational;
    for level in [1u64, 11, 14, 15, 23] {
        let c = build_complex(2, level, f).unwrap();
        let x = c.homology(1).unwrap().cycles[0].clone();
        for ell in [2u64, 3, 5] {
            if level % ell == 0 {
                continue;
            }
            let r = hecke_on_h1_n2(level, f, ell, 256).unwrap();
            assert_eq!(r.matrix.len(), 1);
            let a = r.matrix[0][0].clone();
            assert_eq!(a, f.from_int(ell as i64 + 1));
            let op = hecke_cosets(2, ell, 1).unwrap();
            let w = verify_eigen_chain(&c, &x, &op, &a, 256).unwrap();
            assert!(w.check().unwrap());
            let wrong = verify_eigen_chain(&c, &x, &op, &(a + f.one()), 256);
            assert!(matches!(wrong, Err(Error::Undetermined(_))), "N={level} l={ell}");
        }
    }
}

#[test]
fn zero_cycle_has_a_trivial_witness() {
    let f = Field::Rational;
    let c = build_complex(2, 11, f).unwrap();
    let zero = vec![Coeff::zero(); c.rank(1)];
    let w = verify_eigen_chain(&c, &zero, &hecke_cosets(2, 2, 1).unwrap(), &f.from_int(5), 16).unwrap();
    assert!(w.y.is_zero() && w.u.is_empty() && w.check().unwrap());
}

#[test]
fn non_cycles_rejected() {
    let f = Field::Rational;
    let c = build_complex(2, 11, f).unwrap();
    let mut x = vec![Coeff::zero(); c.rank(1)];
    let mut found = false;
    for i in 0..x.len() {
        x.iter_mut().for_each(|v| *v = Coeff::zero());
        x[i] = f.one();
        if c.boundary(1).mul_vec(&x).iter().any(|v| !v.is_zero()) {
            found = true;
            break;
        }
    }
    assert!(found);
    let r = verify_eigen_chain(&c, &x, &hecke_cosets(2, 2, 1).unwrap(), &f.from_int(3), 16);
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}
