//! Named end-to-end consistency checks, run by `steinberg verify`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::congruence::Gamma0;
use crate::error::{Error, Result};
use crate::hecke::{hecke_cosets, hecke_in_basis, hecke_on_h0, hecke_on_h1_n2, verify_eigen_chain, SymbolLocator};
use crate::homology::{build_complex, build_complex_seeded, GammaComplex};
use crate::linalg::{Coeff, Field, IntMatrix};
use crate::oracle::{manin_dim, manin_hecke};
use crate::sharbly::{ar_reduce, theta, SharblyChain};
use crate::voronoi::CellComplexTable;

pub struct Check {
    pub name: &'static str,
    pub run: fn(u64) -> Result<String>,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invariant(msg()))
    }
}

pub fn field_matmul(f: Field, a: &[Vec<Coeff>], b: &[Vec<Coeff>]) -> Vec<Vec<Coeff>> {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).fold(Coeff::zero(), |acc, (x, r)| f.add(&acc, &f.mul(x, &r[j]))))
                .collect()
        })
        .collect()
}

fn cell_structure(_: u64) -> Result<String> {
    let mut out = Vec::new();
    for n in 2..=3 {
        let t = CellComplexTable::cached(n)?;
        ensure(t.degrees[0].len() == 1, || format!("n = {n}: {} orbits of (n-1)-cells", t.degrees[0].len()))?;
        for orbits in &t.degrees {
            for o in orbits {
                ensure(o.representative.is_simplex(), || format!("n = {n}: non-simplicial cell"))?;
            }
        }
        out.push(format!("n={n} {:?}", t.orbit_counts()));
    }
    Ok(out.join("; "))
}

fn accepted_complexes() -> impl Iterator<Item = (usize, u64, Field)> {
    let fields = [Field::Rational, Field::Prime(3), Field::Prime(5), Field::Prime(7)];
    let n2 = (1..=30u64).flat_map(move |level| fields.into_iter().map(move |f| (2, level, f)));
    let n3 = (1..=5u64).flat_map(move |level| fields.into_iter().map(move |f| (3, level, f)));
    n2.chain(n3)
}

fn boundary_squares(_: u64) -> Result<String> {
    let (mut built, mut rejected) = (0, 0);
    for (n, level, f) in accepted_complexes() {
        match build_complex(n, level, f) {
            Ok(c) => {
                c.check_boundaries()?;
                let b = c.betti_numbers()?;
                let euler: i64 = b.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
                ensure(euler == c.euler_characteristic(), || format!("Euler characteristic mismatch at n={n} N={level} {f}"))?;
                built += 1;
            }
            Err(Error::Precondition(_)) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(format!("{built} complexes with d^2 = 0, {rejected} rejected by the field precondition"))
}

fn oracle_dimensions(_: u64) -> Result<String> {
    for level in 1..=30 {
        let c = build_complex(2, level, Field::Rational)?;
        let h0 = c.homology(0)?.dimension;
        let m = manin_dim(level)?;
        ensure(h0 == m, || format!("N = {level}: dim H0 = {h0}, oracle {m}"))?;
    }
    Ok("dim H0 = oracle for N <= 30".into())
}

fn squarefree(n: u64) -> bool {
    (2..=n).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
}

fn oracle_hecke(_: u64) -> Result<String> {
    let mut count = 0;
    for level in (1..=30).filter(|&n| squarefree(n)) {
        for ell in [2, 3, 5, 7] {
            if level % ell == 0 {
                continue;
            }
            let r = hecke_on_h0(2, level, Field::Rational, ell, 1)?;
            let (_, p) = manin_hecke(level, ell)?;
            ensure(r.char_poly == p, || {
                format!("N = {level}, l = {ell}: {} vs oracle {}", r.char_poly.render(), p.render())
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} characteristic polynomials agree"))
}

fn nofake_level_eleven(_: u64) -> Result<String> {
    let f = Field::Rational;
    let c = build_complex(2, 11, f)?;
    let x = c.homology(1)?.cycles[0].clone();
    let t2 = hecke_cosets(2, 2, 1)?;
    let w = verify_eigen_chain(&c, &x, &t2, &f.from_int(3), 256)?;
    ensure(w.check()?, || "witness identity fails".into())?;
    let r = hecke_on_h1_n2(11, f, 2, 256)?;
    ensure(r.matrix == vec![vec![f.from_int(3)]], || format!("H1 matrix {:?}", r.matrix))?;
    Ok(format!("witness with {} terms in y, {} identifications; H1 eigenvalue 3", w.y.len(), w.u.len()))
}

fn commutativity(_: u64) -> Result<String> {
    let mut cases = vec![(2usize, 11u64, vec![2u64, 3, 5, 7])];
    cases.extend((1..=5).map(|level| (3, level, vec![2, 3])));
    let mut count = 0;
    for (n, level, ells) in cases {
        let c = build_complex(n, level, Field::Rational)?;
        let h = c.homology(0)?;
        let ops: Vec<_> = ells
            .iter()
            .filter(|&&l| level % l != 0)
            .map(|&l| hecke_in_basis(&c, &hecke_cosets(n, l, 1)?, &h, 0))
            .collect::<Result<_>>()?;
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                let ab = field_matmul(c.field, &ops[i].matrix, &ops[j].matrix);
                let ba = field_matmul(c.field, &ops[j].matrix, &ops[i].matrix);
                ensure(ab == ba, || format!("n={n} N={level}: T{} T{} do not commute", ops[i].ell, ops[j].ell))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} commuting pairs"))
}

fn basis_independence(seed: u64) -> Result<String> {
    for (n, level, ell) in [(2usize, 11u64, 2u64), (2, 23, 3), (3, 4, 3)] {
        let c = build_complex(n, level, Field::Rational)?;
        let h = c.homology(0)?;
        let op = hecke_cosets(n, ell, 1)?;
        let a = hecke_in_basis(&c, &op, &h, 0)?;
        let b = hecke_in_basis(&c, &op, &h.with_random_basis(seed)?, 0)?;
        ensure(a.char_poly == b.char_poly, || format!("n={n} N={level}: char poly depends on the basis"))?;
    }
    Ok("characteristic polynomials survive a random change of basis".into())
}

fn determinism(seed: u64) -> Result<String> {
    for (n, level) in [(2usize, 30u64), (3, 5)] {
        let a = build_complex(n, level, Field::Rational)?;
        let b = build_complex_seeded(n, level, Field::Rational, Some(seed))?;
        ensure(a.to_json()? == b.to_json()?, || format!("n={n} N={level}: seeded build differs"))?;
    }
    Ok("seeded builds are identical".into())
}

fn theta_chain_map(_: u64) -> Result<String> {
    let mut count = 0;
    for n in 2..=3 {
        let t = CellComplexTable::cached(n)?;
        let f = Field::Rational;
        for k in 1..t.degrees.len() {
            for o in &t.degrees[k] {
                let s = theta(&o.representative)?;
                let mut c = SharblyChain::new(f, n, k);
                c.add_sharbly(&s, &f.one());
                let lhs = c.boundary()?;
                let mut rhs = SharblyChain::new(f, n, k - 1);
                for rec in &o.facets {
                    let inv = rec.gamma.inverse_unimodular().expect("facet maps are unimodular");
                    let img = theta(&t.degrees[k - 1][rec.orbit].representative)?.act(&inv)?;
                    rhs.add_element(&img, &f.from_int(rec.sign as i64));
                }
                ensure(lhs == rhs, || format!("n={n}: theta fails to intertwine boundaries in degree {k}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} orbit representatives"))
}

/// A random word in elementary generators of `Gamma_0(N)`.
pub fn random_gamma0(rng: &mut impl Rng, n: usize, level: u64, len: usize) -> IntMatrix {
    let mut g = IntMatrix::identity(n);
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut t = BigInt::from(rng.gen_range(1..=2i64) * if rng.gen_bool(0.5) { 1 } else { -1 });
        if i == 0 {
            t *= level;
        }
        g.add_row_multiple(i, j, &t);
    }
    g
}

/// A random integer matrix with `1 <= |det| <= max_det`.
pub fn random_matrix(rng: &mut impl Rng, n: usize, max_det: i64) -> IntMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let m = IntMatrix::from_i64(&refs);
        let d = m.det();
        if !d.is_zero() && d.magnitude() <= &num_bigint::BigUint::from(max_det as u64) {
            return m;
        }
    }
}

fn coords_in_h0(c: &GammaComplex, chain: &SharblyChain) -> Result<Vec<Coeff>> {
    let mut loc = SymbolLocator::new(c);
    let v = loc.coordinates(chain)?;
    Ok(c.homology(0)?.express_cycle(&v)?.coords)
}

fn ar_equivariance(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for (level, field) in [(11u64, Field::Rational), (7, Field::Prime(5)), (15, Field::Rational)] {
        let c = build_complex(2, level, field)?;
        let group = Gamma0::new(2, level)?;
        for _ in 0..100 {
            let x = random_matrix(&mut rng, 2, 50);
            let g = random_gamma0(&mut rng, 2, level, 4);
            ensure(group.contains(&g), || "random element left the group".into())?;
            let a = ar_reduce(&x)?;
            ensure(a.terms().all(|(s, _)| s.is_unimodular()), || "ar_reduce left a non-unimodular term".into())?;
            let b = ar_reduce(&x.mul(&g))?;
            let (a, b) = (a.reduce_into(field)?, b.reduce_into(field)?);
            ensure(coords_in_h0(&c, &a)? == coords_in_h0(&c, &b)?, || format!("class of {x:?} moves under {g:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} random symbols"))
}

fn field_rejection(_: u64) -> Result<String> {
    ensure(matches!(build_complex(2, 11, Field::Prime(2)), Err(Error::Precondition(_))), || "F2 accepted".into())?;
    ensure(matches!(build_complex(3, 1, Field::Prime(3)), Err(Error::Precondition(_))), || "F3 accepted for n = 3".into())?;
    Ok("F2 and stabilizer-dividing primes rejected".into())
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { name: "cell structure", run: cell_structure },
        Check { name: "boundary squares to zero", run: boundary_squares },
        Check { name: "oracle dimensions", run: oracle_dimensions },
        Check { name: "oracle Hecke polynomials", run: oracle_hecke },
        Check { name: "chain-level eigenvector, N = 11", run: nofake_level_eleven },
        Check { name: "Hecke commutativity", run: commutativity },
        Check { name: "basis independence", run: basis_independence },
        Check { name: "build determinism", run: determinism },
        Check { name: "theta chain map", run: theta_chain_map },
        Check { name: "reduction equivariance", run: ar_equivariance },
        Check { name: "field preconditions", run: field_rejection },
    ]
}
