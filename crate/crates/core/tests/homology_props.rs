use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

use steinberg_core::homology::{build_complex, build_complex_seeded, GammaComplex};
use steinberg_core::linalg::{snf, Field, IntMatrix};
use steinberg_core::Error;

fn field(p: u64) -> Field {
    if p == 0 {
        Field::Rational
    } else {
        Field::Prime(p)
    }
}

fn integral_boundary(c: &GammaComplex, k: usize) -> IntMatrix {
    let b = c.boundary(k);
    let mut m = IntMatrix::zeros(b.rows(), b.cols());
    for (r, col, x) in b.triplets() {
        assert!(x.is_integer());
        m.set(r, col, x.to_integer());
    }
    m
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn kronecker_minus(d: i64, p: u64) -> i64 {
    // (-d / p) for an odd prime p, using Euler's criterion
    let p = p as i64;
    let a = (-d).rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r = 1i64;
    let (mut b, mut e) = (a, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// `2g + c - 1` for `Gamma_0(N)`, from the classical index, elliptic and
/// cusp counts.
fn classical_h0(n: u64) -> i64 {
    let ps = prime_factors(n);
    let mu12: i64 = ps.iter().fold(n as i64, |acc, &p| acc / p as i64 * (p as i64 + 1));
    let nu2: i64 = if n.is_multiple_of(4) {
        0
    } else {
        ps.iter().map(|&p| if p == 2 { 1 } else { 1 + kronecker_minus(1, p) }).product()
    };
    let nu3: i64 = if n.is_multiple_of(9) {
        0
    } else {
        ps.iter()
            .map(|&p| match p {
                2 => 0,
                3 => 1,
                _ => 1 + kronecker_minus(3, p),
            })
            .product()
    };
    let phi = |m: u64| (1..=m).filter(|k| k.gcd(&m) == 1).count() as i64;
    let c: i64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| phi(d.gcd(&(n / d)))).sum();
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let twelve_g = 12 + mu12 - 3 * nu2 - 4 * nu3 - 6 * c;
    assert_eq!(twelve_g % 12, 0);
    2 * (twelve_g / 12) + c - 1
}

#[test]
fn h0_matches_classical_genus_formula() {
    for n in 1..=80u64 {
        let c = build_complex(2, n, Field::Rational).unwrap();
        assert_eq!(c.homology(0).unwrap().dimension as i64, classical_h0(n), "N = {n}");
        assert_eq!(c.homology(1).unwrap().dimension, 1, "N = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_characteristic(
        (n, level) in prop_oneof![(Just(2usize), 1u64..=30), (Just(3usize), 1u64..=5)],
        p in prop::sample::select(vec![0u64, 3, 5, 7, 11]),
    ) {
        match build_complex(n, level, field(p)) {
            Ok(c) => {
                let b = c.betti_numbers().unwrap();
                let chi: i64 = b.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
                prop_assert_eq!(chi, c.euler_characteristic());
            }
            Err(Error::Precondition(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn seeded_builds_agree(
        (n, level) in prop_oneof![(Just(2usize), 1u64..=30), (Just(3usize), 1u64..=5)],
        seed in any::<u64>(),
    ) {
        let a = build_complex(n, level, Field::Rational).unwrap();
        let b = build_complex_seeded(n, level, Field::Rational, Some(seed)).unwrap();
        prop_assert_eq!(a.betti_numbers().unwrap(), b.betti_numbers().unwrap());
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let (ha, hb) = (a.homology(0).unwrap(), b.homology(0).unwrap());
        prop_assert_eq!(ha.cycles, hb.cycles);
    }

    #[test]
    fn prime_field_agrees_with_q_off_torsion(
        (n, level) in prop_oneof![(Just(2usize), 1u64..=30), (Just(3usize), 1u64..=5)],
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
    ) {
        let q = build_complex(n, level, Field::Rational).unwrap();
        let Ok(fp) = build_complex(n, level, Field::Prime(p)) else { return Ok(()) };
        let bad = (1..=q.max_degree()).any(|k| {
            snf(&integral_boundary(&q, k)).iter().any(|d| !d.is_zero() && (d % BigInt::from(p)).is_zero())
        });
        if !bad {
            prop_assert_eq!(q.betti_numbers().unwrap(), fp.betti_numbers().unwrap());
        }
    }
}

#[test]
fn json_round_trip() {
    for (n, level, p) in [(2, 11, 0), (2, 30, 7), (3, 5, 5), (3, 4, 0)] {
        let c = build_complex(n, level, field(p)).unwrap();
        let v = c.to_json().unwrap();
        let back = GammaComplex::from_json(&v).unwrap();
        assert_eq!(back.to_json().unwrap(), v);
    }
}

#[test]
fn precondition_rejections() {
    assert!(matches!(build_complex(2, 5, Field::Prime(2)), Err(Error::Precondition(_))));
    assert!(matches!(build_complex(3, 1, Field::Prime(3)), Err(Error::Precondition(_))));
    assert!(matches!(build_complex(2, 1, Field::Prime(3)), Err(Error::Precondition(_))));
    assert!(build_complex(2, 1, Field::Prime(5)).is_ok());
}
