mod common;

use proptest::prelude::*;

use steinberg_core::congruence::{act, proj_points, split_orbits, Gamma0, ProjPoint};
use steinberg_core::voronoi::{cell_stabilizer, CellComplexTable, CellOrbit};

use common::{gamma0_matrix, sl_matrix};

fn legendre(a: i64, p: i64) -> i64 {
    let r = (0..p).filter(|x| (x * x - a).rem_euclid(p) == 0).count();
    r as i64 - 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn orbit_sizes_partition_the_points((n, level) in (2usize..=3).prop_flat_map(|n| (Just(n), 1u64..=if n == 2 { 40 } else { 9 }))) {
        let total = proj_points(n, level).unwrap().len();
        for o in CellComplexTable::cached(n).unwrap().degrees.iter().flatten() {
            let s = split_orbits(o, level).unwrap();
            prop_assert_eq!(s.orbits.iter().map(|x| x.size).sum::<usize>(), total);
        }
    }

    #[test]
    fn splitting_is_independent_of_the_representative(
        (n, level, g, which) in (2usize..=3).prop_flat_map(|n| (Just(n), 1u64..=if n == 2 { 30 } else { 7 }, sl_matrix(n), 0usize..8))
    ) {
        let t = CellComplexTable::cached(n).unwrap();
        let all: Vec<&CellOrbit> = t.degrees.iter().flatten().collect();
        let o = all[which % all.len()];
        let moved = o.representative.act(&g);
        let (gl, sl) = cell_stabilizer(&moved).unwrap();
        let translated = CellOrbit {
            representative: moved,
            dim: o.dim,
            orientation_basis: o.orientation_basis.clone(),
            gl_stabilizer_order: gl.len(),
            stabilizer: sl,
            facets: Vec::new(),
        };
        let a = split_orbits(o, level).unwrap();
        let b = split_orbits(&translated, level).unwrap();
        prop_assert_eq!(a.orbits.len(), b.orbits.len());
        let mut hit = vec![false; b.orbits.len()];
        for x in &a.orbits {
            let (j, _) = b.classify(&act(&x.point, &g).unwrap());
            prop_assert!(!hit[j]);
            hit[j] = true;
            prop_assert_eq!(x.size, b.orbits[j].size);
            prop_assert_eq!(x.orientation_ok, b.orbits[j].orientation_ok);
            prop_assert_eq!(x.effective_stabilizer.len(), b.orbits[j].effective_stabilizer.len());
        }
    }

    #[test]
    fn gamma0_fixes_the_first_point((n, level, g) in (2usize..=3, 1u64..=20).prop_flat_map(|(n, l)| (Just(n), Just(l), gamma0_matrix(n, l)))) {
        prop_assert!(Gamma0::new(n, level).unwrap().contains(&g));
        let e1 = ProjPoint::e1(n, level);
        prop_assert_eq!(act(&e1, &g).unwrap(), e1);
    }
}

/// For prime N >= 5 the elliptic points of Gamma_0(N) are the split orbits
/// with a nontrivial effective stabilizer: 1 + (-1/N) on the edge orbit and
/// 1 + (-3/N) on the triangle orbit.
#[test]
fn elliptic_points_for_prime_level() {
    let t = CellComplexTable::cached(2).unwrap();
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43] {
        let count = |o: &CellOrbit| split_orbits(o, p).unwrap().orbits.iter().filter(|x| x.effective_stabilizer.len() > 2).count() as i64;
        assert_eq!(count(&t.degrees[0][0]), 1 + legendre(-1, p as i64), "nu_2 at {p}");
        assert_eq!(count(&t.degrees[1][0]), 1 + legendre(-3, p as i64), "nu_3 at {p}");
        let edge = split_orbits(&t.degrees[0][0], p).unwrap();
        let bad = edge.orbits.iter().filter(|x| !x.orientation_ok).count() as i64;
        assert_eq!(bad, 1 + legendre(-1, p as i64));
        assert!(split_orbits(&t.degrees[1][0], p).unwrap().orbits.iter().all(|x| x.orientation_ok));
    }
}
