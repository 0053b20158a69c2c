//! Reduction of modular symbols to unimodular ones, and of `n = 2`
//! one-sharbly cycles to Voronoi-supported ones.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chain::{normalize, Sharbly, SharblyChain, SharblyElement};
use crate::error::{Error, Result};
use crate::linalg::matrix::{normalize_line, IntMatrix, Vector};
use crate::linalg::{Coeff, Field};

fn centered(x: &BigRational) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    let mut y = x - x.floor();
    if y > half {
        y -= BigRational::one();
    }
    y
}

/// Nonzero elements of `Z^n X^{-1} / Z^n`, each as its representative in
/// `(-1/2, 1/2]^n`.
fn dual_quotient(x: &IntMatrix) -> Vec<Vec<BigRational>> {
    let inv = x.inverse_rational().expect("nonsingular");
    let gens: Vec<Vec<BigRational>> = inv.iter().map(|r| r.iter().map(centered).collect()).collect();
    let n = x.rows();
    let zero = vec![BigRational::zero(); n];
    let mut seen: BTreeSet<Vec<BigRational>> = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(a) = frontier.pop() {
        for g in &gens {
            let b: Vec<BigRational> = a.iter().zip(g).map(|(p, q)| centered(&(p + q))).collect();
            if seen.insert(b.clone()) {
                frontier.push(b);
            }
        }
    }
    seen.into_iter().filter(|a| a.iter().any(|c| !c.is_zero())).collect()
}

fn combine(a: &[BigRational], rows: &[Vector]) -> Vector {
    let n = rows[0].len();
    (0..n)
        .map(|j| {
            let s: BigRational = a.iter().zip(rows).map(|(c, r)| c * BigRational::from_integer(r[j].clone())).sum();
            s.to_integer()
        })
        .collect()
}

fn score(a: &[BigRational]) -> BigRational {
    a.iter().map(|c| c.abs()).max().unwrap()
}

/// Auxiliary point for a non-unimodular `X`: `w = a X` with `a` minimizing
/// `max |a_i|`, ties broken by the sorted `|a_i|` and then by `a`.
pub fn ar_point(x: &IntMatrix) -> (Vector, Vec<BigRational>) {
    let rows = x.row_vectors();
    let best = dual_quotient(x)
        .into_iter()
        .min_by(|p, q| {
            let key = |a: &Vec<BigRational>| {
                let mut abs: Vec<BigRational> = a.iter().map(|c| c.abs()).collect();
                abs.sort_by(|u, v| v.cmp(u));
                (score(a), abs)
            };
            key(p).cmp(&key(q)).then_with(|| p.cmp(q))
        })
        .expect("|det X| > 1 gives a nonzero element");
    (combine(&best, &rows), best)
}

/// `[[X]]` as a sum of unimodular symbols: replace row `i` by the auxiliary
/// point for each `i` with `a_i != 0`, and recurse.
pub fn ar_reduce(x: &IntMatrix) -> Result<SharblyChain> {
    let n = x.rows();
    if !x.is_square() || x.det().is_zero() {
        return Err(Error::InvalidInput(format!("modular symbol of a singular matrix {x}")));
    }
    let f = Field::Rational;
    let mut out = SharblyChain::new(f, n, 0);
    let mut stack: Vec<(IntMatrix, Coeff)> = vec![(x.clone(), f.one())];
    while let Some((m, c)) = stack.pop() {
        let d = m.det().abs();
        if d.is_one() {
            out.add_vectors(&m.row_vectors(), &c)?;
            continue;
        }
        let (w, a) = ar_point(&m);
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            let mut rows = m.row_vectors();
            rows[i] = w.clone();
            let next = IntMatrix::from_rows(&rows);
            if next.det().abs() >= d {
                return Err(Error::Invariant("reduction step did not lower the determinant".into()));
            }
            stack.push((next, c.clone()));
        }
    }
    Ok(out)
}

/// `|det(u, v)|` for two vectors in `Z^2`.
fn det2(u: &[BigInt], v: &[BigInt]) -> BigInt {
    (&u[0] * &v[1] - &u[1] * &v[0]).abs()
}

/// Lines `t` with `t = a u + b v`, `(a,b)` a nonzero class of
/// `Z^2 X^{-1} / Z^2` represented in `[-1/2, 1/2]^2` with `max(|a|,|b|)`
/// minimal. Depends only on the lines of `u` and `v`, so the choice commutes
/// with `GL(2,Z)`.
pub fn edge_split_points(u: &Vector, v: &Vector) -> Vec<Vector> {
    let x = IntMatrix::from_rows(&[u.clone(), v.clone()]);
    let rows = x.row_vectors();
    let half = BigRational::new(1.into(), 2.into());
    let mut cands: Vec<Vec<BigRational>> = Vec::new();
    for a in dual_quotient(&x) {
        // both signs at the boundary value 1/2
        let mut variants = vec![a.clone()];
        for i in 0..a.len() {
            if a[i] == half {
                let more: Vec<Vec<BigRational>> = variants
                    .iter()
                    .map(|b| {
                        let mut b = b.clone();
                        b[i] = -half.clone();
                        b
                    })
                    .collect();
                variants.extend(more);
            }
        }
        cands.extend(variants);
    }
    let best = cands.iter().map(|a| score(a)).min().expect("nonzero class");
    let lines: BTreeSet<Vector> = cands
        .iter()
        .filter(|a| score(a) == best)
        .filter_map(|a| normalize_line(&combine(a, &rows)))
        .collect();
    lines.into_iter().collect()
}

/// Outcome of [`one_sharbly_reduce_n2`]:
/// `input = reduced + flats + boundary(homotopy)` exactly.
#[derive(Clone, Debug)]
pub struct OneSharblyReduction {
    pub reduced: SharblyChain,
    pub flats: SharblyChain,
    pub homotopy: SharblyChain,
    pub rounds: usize,
}

fn is_voronoi_triangle(s: &Sharbly) -> bool {
    let v = s.vectors();
    det2(&v[0], &v[1]).is_one() && det2(&v[0], &v[2]).is_one() && det2(&v[1], &v[2]).is_one()
}

/// Splits the edge `(e0, e1)` of the oriented triangle `[e0, e1, z]`:
/// `[e0,e1,z] = [e0,t,z] + [t,e1,z] + [t,e0,e1] + d[t,e0,e1,z]`, averaged over
/// the split points.
fn split_triangle(
    tri: &[Vector; 3],
    c: &Coeff,
    f: Field,
    pieces: &mut Vec<([Vector; 3], Coeff)>,
    flats: &mut SharblyChain,
    homotopy: &mut SharblyChain,
) -> Result<()> {
    let [e0, e1, z] = tri;
    let ts = edge_split_points(e0, e1);
    let m = f
        .inv(&f.from_int(ts.len() as i64))
        .ok_or_else(|| Error::Precondition(format!("cannot average over {} split points in {f}", ts.len())))?;
    let w = f.mul(c, &m);
    for t in ts {
        pieces.push(([e0.clone(), t.clone(), z.clone()], w.clone()));
        pieces.push(([t.clone(), e1.clone(), z.clone()], w.clone()));
        flats.add_vectors(&[t.clone(), e0.clone(), e1.clone()], &w)?;
        homotopy.add_vectors(&[t, e0.clone(), e1.clone(), z.clone()], &w)?;
    }
    Ok(())
}

fn same_line(a: &Vector, b: &Vector) -> bool {
    normalize_line(a) == normalize_line(b)
}

/// Cyclically rotates the triangle so the edge `{p, q}` sits in the first two
/// slots. Cyclic rotations of three entries are even.
fn rotate_to_edge(tri: &[Vector; 3], p: &Vector, q: &Vector) -> Option<[Vector; 3]> {
    let [a, b, c] = tri;
    let has = |x: &Vector, y: &Vector| (same_line(x, p) && same_line(y, q)) || (same_line(x, q) && same_line(y, p));
    if has(a, b) {
        Some([a.clone(), b.clone(), c.clone()])
    } else if has(b, c) {
        Some([b.clone(), c.clone(), a.clone()])
    } else if has(c, a) {
        Some([c.clone(), a.clone(), b.clone()])
    } else {
        None
    }
}

/// Rewrites a chain of `n = 2` one-sharblies as a chain of Voronoi triangles,
/// plus flat terms `[t, u, v]` attached to the split edges, plus a boundary.
/// The flats of a chain whose boundary vanishes modulo a group cancel modulo
/// that group, because the split points commute with `GL(2,Z)`.
pub fn one_sharbly_reduce_n2(input: &SharblyChain, budget: usize) -> Result<OneSharblyReduction> {
    if input.n() != 2 {
        return Err(Error::Undetermined(format!(
            "one-sharbly reduction is implemented for n = 2 only, got n = {}",
            input.n()
        )));
    }
    if input.k() != 1 {
        return Err(Error::InvalidInput("one-sharbly reduction needs a chain of 1-sharblies".into()));
    }
    let f = input.field();
    let mut current = input.clone();
    let mut flats = SharblyChain::new(f, 2, 1);
    let mut homotopy = SharblyChain::new(f, 2, 2);
    let mut rounds = 0;
    loop {
        if current.terms().all(|(s, _)| is_voronoi_triangle(s)) {
            return Ok(OneSharblyReduction { reduced: current, flats, homotopy, rounds });
        }
        if rounds == budget {
            return Err(Error::Undetermined(format!("one-sharbly reduction exceeded {budget} rounds")));
        }
        rounds += 1;
        let mut next = SharblyChain::new(f, 2, 1);
        for (s, c) in current.terms() {
            let v = s.vectors();
            let bad: Vec<(Vector, Vector)> = [(0, 1), (1, 2), (0, 2)]
                .iter()
                .filter(|&&(i, j)| det2(&v[i], &v[j]) > BigInt::one())
                .map(|&(i, j)| (v[i].clone(), v[j].clone()))
                .collect();
            let mut pieces: Vec<([Vector; 3], Coeff)> = vec![([v[0].clone(), v[1].clone(), v[2].clone()], c.clone())];
            for (p, q) in &bad {
                let mut out = Vec::new();
                for (tri, w) in pieces {
                    match rotate_to_edge(&tri, p, q) {
                        Some(rot) => split_triangle(&rot, &w, f, &mut out, &mut flats, &mut homotopy)?,
                        None => out.push((tri, w)),
                    }
                }
                pieces = out;
            }
            for (tri, w) in pieces {
                if let SharblyElement::Term { sign, sharbly } = normalize(2, &tri)? {
                    let w = if sign < 0 { f.neg(&w) } else { w };
                    next.add_sharbly(&sharbly, &w);
                }
            }
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vector;

    #[test]
    fn unimodular_input_is_returned() {
        let x = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let r = ar_reduce(&x).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn diagonal_scaling() {
        let r = ar_reduce(&IntMatrix::from_i64(&[&[1, 0], &[0, 2]])).unwrap();
        let mut expect = SharblyChain::new(Field::Rational, 2, 0);
        expect.add_vectors(&[vector(&[1, 0]), vector(&[0, 1])], &Field::Rational.one()).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn example_split() {
        let r = ar_reduce(&IntMatrix::from_i64(&[&[1, 0], &[1, 2]])).unwrap();
        let f = Field::Rational;
        let mut expect = SharblyChain::new(f, 2, 0);
        expect.add_vectors(&[vector(&[1, 0]), vector(&[1, 1])], &f.one()).unwrap();
        expect.add_vectors(&[vector(&[1, 1]), vector(&[1, 2])], &f.one()).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn singular_rejected() {
        assert!(ar_reduce(&IntMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn split_points_of_a_det_two_edge() {
        let pts = edge_split_points(&vector(&[1, 0]), &vector(&[1, 2]));
        assert_eq!(pts, vec![vector(&[0, 1]), vector(&[1, 1])]);
    }

    #[test]
    fn one_sharbly_identity() {
        let f = Field::Rational;
        let mut c = SharblyChain::new(f, 2, 1);
        c.add_vectors(&[vector(&[1, 0]), vector(&[0, 1]), vector(&[1, 2])], &f.one()).unwrap();
        let r = one_sharbly_reduce_n2(&c, 10).unwrap();
        let mut total = r.reduced.clone();
        total.add_chain(&r.flats, &f.one());
        total.add_chain(&r.homotopy.boundary().unwrap(), &f.one());
        assert_eq!(total, c);
    }
}
