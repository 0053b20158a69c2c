//! Hecke operators: coset representatives, the action on `H_0` through
//! modular-symbol reduction, the action on `H_1` for `n = 2`, and chain-level
//! eigenvector certificates.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::congruence::{lift_to_sl, Gamma0, ProjPoint};
use crate::error::{Error, Result};
use crate::homology::{build_complex, GammaComplex, HomologyResult};
use crate::linalg::field::is_prime;
use crate::linalg::matrix::{IntMatrix, Vector};
use crate::linalg::{char_poly, hnf, snf, Coeff, Field, Poly};
use crate::sharbly::chain::gamma0_stabilizer;
use crate::sharbly::{
    ar_reduce, gamma0_equivalence, normalize, one_sharbly_reduce_n2, Sharbly, SharblyChain, SharblyElement,
};
use crate::voronoi::complex::locate;
use crate::voronoi::search::det_profile;
use crate::voronoi::VoronoiCell;

/// `T(l, k)`: the double coset of `diag(1, ..., 1, l, ..., l)` with `k`
/// entries `l`, as a union of cosets `s_i SL(n,Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeOperator {
    pub n: usize,
    pub ell: u64,
    pub k: usize,
    pub representatives: Vec<IntMatrix>,
}

/// Upper triangular row Hermite forms with the given diagonal.
fn hermite_with_diagonal(diag: &[u64]) -> Vec<IntMatrix> {
    let n = diag.len();
    let mut out = vec![IntMatrix::diagonal(&diag.iter().map(|&d| d as i64).collect::<Vec<_>>())];
    for j in 0..n {
        for i in 0..j {
            let mut next = Vec::new();
            for m in &out {
                for x in 0..diag[j] {
                    let mut m = m.clone();
                    m.set(i, j, BigInt::from(x));
                    next.push(m);
                }
            }
            out = next;
        }
    }
    out
}

/// `(n choose k)` in base `q`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u64 {
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

pub fn hecke_cosets(n: usize, ell: u64, k: usize) -> Result<HeckeOperator> {
    if !is_prime(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut expect = vec![BigInt::one(); n - k];
    expect.extend(std::iter::repeat_n(BigInt::from(ell), k));
    let mut reps = Vec::new();
    // diagonals are 0/1 patterns with k entries l
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let diag: Vec<u64> = (0..n).map(|i| if mask & (1 << i) != 0 { ell } else { 1 }).collect();
        for h in hermite_with_diagonal(&diag) {
            if snf(&h) == expect {
                // h SL-row classes correspond to transposes in column classes
                reps.push(h.transpose());
            }
        }
    }
    reps.sort();
    Ok(HeckeOperator { n, ell, k, representatives: reps })
}

impl HeckeOperator {
    /// Representatives of the same cosets adjusted so that each first row is
    /// congruent to `(*, 0, ..., 0)` mod `N`.
    pub fn adapted(&self, level: u64) -> Result<Vec<IntMatrix>> {
        if level.is_multiple_of(self.ell) {
            return Err(Error::Precondition(format!("l = {} divides the level {level}", self.ell)));
        }
        self.representatives
            .iter()
            .map(|s| {
                let pt = ProjPoint::new(level, s.row(0))?;
                let a = lift_to_sl(&pt);
                let adj = s.mul(&a.inverse_unimodular().expect("unimodular"));
                let m = BigInt::from(level);
                debug_assert!((1..self.n).all(|j| (adj.get(0, j) % &m).is_zero()));
                Ok(adj)
            })
            .collect()
    }

    /// Index of the coset `m SL(n,Z)` among the representatives.
    pub fn coset_of(&self, m: &IntMatrix) -> Option<usize> {
        let (h, _) = hnf(&m.transpose());
        let key = h.transpose();
        self.representatives.iter().position(|s| *s == key)
    }
}

/// Matrix of an operator on a homology basis, with spectral data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenReport {
    pub n: usize,
    pub level: u64,
    pub field: Field,
    pub ell: u64,
    pub k: usize,
    pub degree: usize,
    /// Column `j` is the image of basis cycle `j`.
    pub matrix: Vec<Vec<Coeff>>,
    pub char_poly: Poly,
    pub eigenvalues: Vec<(Coeff, usize)>,
    /// Factor of the characteristic polynomial without roots in the field.
    pub residual: Poly,
}

impl EigenReport {
    fn new(c: &GammaComplex, op: &HeckeOperator, degree: usize, matrix: Vec<Vec<Coeff>>) -> Self {
        let p = char_poly(c.field, &matrix);
        let (eigenvalues, residual) = p.split_roots();
        EigenReport {
            n: c.n,
            level: c.level,
            field: c.field,
            ell: op.ell,
            k: op.k,
            degree,
            matrix,
            char_poly: p,
            eigenvalues,
            residual,
        }
    }

    pub fn eigenvalue_strings(&self) -> Vec<String> {
        self.eigenvalues
            .iter()
            .map(|(x, m)| format!("{}^{m}", self.field.render(x)))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let f = self.field;
        json!({
            "n": self.n,
            "level": self.level,
            "field": f.to_string(),
            "ell": self.ell,
            "k": self.k,
            "degree": self.degree,
            "matrix": self.matrix.iter().map(|r| r.iter().map(|x| f.render(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "char_poly": self.char_poly.render(),
            "eigenvalues": self.eigenvalues.iter().map(|(x, m)| json!({"value": f.render(x), "multiplicity": m})).collect::<Vec<_>>(),
            "residual": self.residual.render(),
        })
    }

    pub fn csv_header() -> &'static str {
        "n,level,field,operator,degree,dimension,char_poly,eigenvalues"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},T({};{}),{},{},\"{}\",\"{}\"",
            self.n,
            self.level,
            self.field,
            self.ell,
            self.k,
            self.degree,
            self.matrix.len(),
            self.char_poly.render(),
            self.eigenvalue_strings().join(" ")
        )
    }
}

/// Translates sharbly chains to and from coordinates of the coinvariant
/// complex.
pub struct SymbolLocator<'a> {
    complex: &'a GammaComplex,
    memo: HashMap<Sharbly, Option<(usize, i8)>>,
}

impl<'a> SymbolLocator<'a> {
    pub fn new(complex: &'a GammaComplex) -> Self {
        SymbolLocator { complex, memo: HashMap::new() }
    }

    /// Basis position and sign of a Voronoi sharbly in degree `k`; `Ok(None)`
    /// when its cell dies in the coinvariants.
    pub fn locate(&mut self, s: &Sharbly) -> Result<Option<(usize, i8)>> {
        if let Some(hit) = self.memo.get(s) {
            return Ok(*hit);
        }
        let c = self.complex;
        let k = s.k();
        if s.n() != c.n || k > c.max_degree() {
            return Err(Error::InvalidInput(format!("{s} does not live in this complex")));
        }
        let cell = VoronoiCell::new(c.n, s.vectors())?;
        let (orbit, gamma) = locate(&cell, &c.table.degrees[k])
            .ok_or_else(|| Error::Invariant(format!("{s} is not a Voronoi cell")))?;
        let perm = cell
            .vertex_map(&gamma, &c.table.degrees[k][orbit].representative)
            .expect("located cells map vertex to vertex");
        let sign = crate::voronoi::search::permutation_sign(&perm);
        let label = ProjPoint::e1(c.n, c.level).act_unchecked(&gamma);
        let hit = c.coordinate(k, orbit, &label).map(|(i, chi)| (i, sign * chi));
        self.memo.insert(s.clone(), hit);
        Ok(hit)
    }

    /// Coordinates of a chain of Voronoi sharblies.
    pub fn coordinates(&mut self, chain: &SharblyChain) -> Result<Vec<Coeff>> {
        let c = self.complex;
        let f = c.field;
        let mut v = vec![Coeff::zero(); c.rank(chain.k())];
        for (s, x) in chain.terms() {
            let x = f
                .try_reduce(x)
                .ok_or_else(|| Error::Precondition(format!("coefficient {x} is not defined in {f}")))?;
            if let Some((i, sign)) = self.locate(s)? {
                let t = if sign < 0 { f.neg(&x) } else { x };
                v[i] = f.add(&v[i], &t);
            }
        }
        Ok(v)
    }

    /// An oriented cell representing basis element `i` of degree `k`.
    pub fn lift_basis(&self, k: usize, i: usize) -> Result<(i8, Sharbly)> {
        let c = self.complex;
        let label = &c.degrees[k].basis[i];
        let a = lift_to_sl(&label.point);
        let delta = a.inverse_unimodular().expect("unimodular");
        let rep = &c.table.degrees[k][label.orbit].representative;
        let moved: Vec<Vector> = rep.vertices().iter().map(|v| delta.act_on_row(v)).collect();
        match normalize(c.n, &moved)? {
            SharblyElement::Term { sign, sharbly } => Ok((sign, sharbly)),
            SharblyElement::Zero => Err(Error::Invariant("lift of a cell is degenerate".into())),
        }
    }

    /// Sum of lifted basis cells with the given coordinates.
    pub fn lift_chain(&self, k: usize, coords: &[Coeff]) -> Result<SharblyChain> {
        let f = self.complex.field;
        let mut out = SharblyChain::new(f, self.complex.n, k);
        for (i, x) in coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (sign, s) = self.lift_basis(k, i)?;
            out.add_sharbly(&s, &if sign < 0 { f.neg(x) } else { x.clone() });
        }
        Ok(out)
    }
}

fn check_pair(level: u64, ell: u64) -> Result<()> {
    if level.is_multiple_of(ell) {
        return Err(Error::Precondition(format!("l = {ell} divides the level {level}")));
    }
    Ok(())
}

/// Matrix of `T(l, k)` on `H_0`, through reduction to unimodular symbols.
pub fn hecke_on_h0(n: usize, level: u64, field: Field, ell: u64, k: usize) -> Result<EigenReport> {
    let complex = build_complex(n, level, field)?;
    hecke_on_h0_with(&complex, &hecke_cosets(n, ell, k)?)
}

pub fn hecke_on_h0_with(complex: &GammaComplex, op: &HeckeOperator) -> Result<EigenReport> {
    hecke_in_basis(complex, op, &complex.homology(0)?, 0)
}

/// Matrix of `op` with respect to the generators of `h`. Degree 0 reduces
/// modular symbols; degree 1 (`n = 2`) reduces one-sharblies.
pub fn hecke_in_basis(complex: &GammaComplex, op: &HeckeOperator, h: &HomologyResult, budget: usize) -> Result<EigenReport> {
    check_pair(complex.level, op.ell)?;
    if op.n != complex.n {
        return Err(Error::InvalidInput(format!("operator for n = {} on a complex for n = {}", op.n, complex.n)));
    }
    let reps = op.adapted(complex.level)?;
    let f = complex.field;
    let column = |z: &Vec<Coeff>| -> Result<Vec<Coeff>> {
        let mut loc = SymbolLocator::new(complex);
        let lifted = loc.lift_chain(h.degree, z)?;
        let image = match h.degree {
            0 => {
                let mut image = vec![Coeff::zero(); complex.rank(0)];
                for (s, c) in lifted.terms() {
                    for g in &reps {
                        let v = loc.coordinates(&ar_reduce(&s.matrix().mul(g))?)?;
                        for (i, x) in v.into_iter().enumerate() {
                            image[i] = f.add(&image[i], &f.mul(&x, c));
                        }
                    }
                }
                image
            }
            1 if complex.n == 2 => {
                let r = one_sharbly_reduce_n2(&hecke_image(&lifted, &reps)?, budget)?;
                loc.coordinates(&r.reduced)?
            }
            d => return Err(Error::Unsupported(format!("Hecke action in degree {d} for n = {}", complex.n))),
        };
        let e = h.express_cycle(&image).map_err(|e| Error::Invariant(format!("Hecke image check failed: {e}")))?;
        Ok(e.coords)
    };
    let columns: Vec<Vec<Coeff>> = h.cycles.par_iter().map(column).collect::<Result<_>>()?;
    Ok(EigenReport::new(complex, op, h.degree, transpose(columns, h.dimension)))
}

fn transpose(columns: Vec<Vec<Coeff>>, dim: usize) -> Vec<Vec<Coeff>> {
    (0..dim).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect()
}

/// `sum_i chain s_i`.
fn hecke_image(chain: &SharblyChain, reps: &[IntMatrix]) -> Result<SharblyChain> {
    let mut out = SharblyChain::new(chain.field(), chain.n(), chain.k());
    for g in reps {
        out.add_chain(&chain.act(g)?, &chain.field().one());
    }
    Ok(out)
}

/// Matrix of `T(l, 1)` on `H_1` for `n = 2`, through one-sharbly reduction.
pub fn hecke_on_h1_n2(level: u64, field: Field, ell: u64, budget: usize) -> Result<EigenReport> {
    let complex = build_complex(2, level, field)?;
    let op = hecke_cosets(2, ell, 1)?;
    hecke_in_basis(&complex, &op, &complex.homology(1)?, budget)
}

/// One term `coeff (sigma - sigma gamma)` of the chain `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identification {
    pub sharbly: Sharbly,
    pub gamma: IntMatrix,
    pub coeff: Coeff,
}

/// Certificate that `T [theta(x)] = a [theta(x)]` in sharbly homology:
/// `d y + theta(x) s - u = a theta(x)`, where `u` is a sum of terms
/// `c (sigma - sigma gamma)` with `gamma` in `Gamma_0(N)`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub level: u64,
    pub a: Coeff,
    pub x: Vec<Coeff>,
    pub theta_x: SharblyChain,
    pub image: SharblyChain,
    pub y: SharblyChain,
    pub u: Vec<Identification>,
}

impl Witness {
    /// `sum c (sigma - sigma gamma)`.
    pub fn u_chain(&self) -> Result<SharblyChain> {
        let f = self.theta_x.field();
        let mut out = SharblyChain::new(f, self.theta_x.n(), self.theta_x.k());
        for t in &self.u {
            out.add_sharbly(&t.sharbly, &t.coeff);
            out.add_element(&t.sharbly.act(&t.gamma)?, &f.neg(&t.coeff));
        }
        Ok(out)
    }

    /// Evaluates the defining identity exactly.
    pub fn check(&self) -> Result<bool> {
        let group = Gamma0::new(self.theta_x.n(), self.level)?;
        if !self.u.iter().all(|t| group.contains(&t.gamma)) {
            return Ok(false);
        }
        let f = self.theta_x.field();
        let mut lhs = if self.y.is_zero() {
            SharblyChain::new(f, self.theta_x.n(), self.theta_x.k())
        } else {
            self.y.boundary()?
        };
        lhs.add_chain(&self.image, &f.one());
        lhs.add_chain(&self.u_chain()?, &f.neg(&f.one()));
        lhs.add_chain(&self.theta_x, &f.neg(&self.a));
        Ok(lhs.is_zero())
    }

    pub fn summary(&self) -> Value {
        let f = self.theta_x.field();
        json!({
            "level": self.level,
            "a": f.render(&self.a),
            "theta_terms": self.theta_x.len(),
            "image_terms": self.image.len(),
            "y_terms": self.y.len(),
            "u_terms": self.u.len(),
        })
    }
}

/// Writes `e` as `sum c (sigma - sigma gamma)`, or fails when some
/// `Gamma_0(N)`-class has a nonzero total that no orientation-reversing
/// symmetry can absorb.
fn certify_zero(e: &SharblyChain, level: u64) -> Result<Option<Vec<Identification>>> {
    let f = e.field();
    let group = Gamma0::new(e.n(), level)?;
    let mut classes: HashMap<Vec<BigInt>, Vec<(Sharbly, Coeff)>> = HashMap::new();
    let mut u = Vec::new();
    for (s, c) in e.terms() {
        let bucket = classes.entry(det_profile(s.vectors(), s.n())).or_default();
        let mut placed = false;
        for (rep, total) in bucket.iter_mut() {
            if let Some((g, sign)) = gamma0_equivalence(s, rep, &group) {
                u.push(Identification { sharbly: s.clone(), gamma: g, coeff: c.clone() });
                *total = f.add(total, &if sign < 0 { f.neg(c) } else { c.clone() });
                placed = true;
                break;
            }
        }
        if !placed {
            bucket.push((s.clone(), c.clone()));
        }
    }
    let mut keys: Vec<&Vec<BigInt>> = classes.keys().collect();
    keys.sort();
    let half = f.inv(&f.from_int(2)).expect("odd characteristic");
    for key in keys {
        for (rep, total) in &classes[key] {
            if total.is_zero() {
                continue;
            }
            let Some((h, _)) = gamma0_stabilizer(rep, &group).into_iter().find(|(_, sign)| *sign < 0) else {
                return Ok(None);
            };
            u.push(Identification { sharbly: rep.clone(), gamma: h, coeff: f.mul(total, &half) });
        }
    }
    Ok(Some(u))
}

/// Searches for a [`Witness`] of `T x = a x` for a cycle `x` of `H_1`.
pub fn verify_eigen_chain(
    complex: &GammaComplex,
    x: &[Coeff],
    op: &HeckeOperator,
    a: &Coeff,
    budget: usize,
) -> Result<Witness> {
    if complex.n != 2 {
        return Err(Error::Undetermined("chain-level certificates are implemented for n = 2".into()));
    }
    check_pair(complex.level, op.ell)?;
    let f = complex.field;
    let a = f.try_reduce(a).ok_or_else(|| Error::InvalidInput(format!("{a} is not in {f}")))?;
    let loc = SymbolLocator::new(complex);
    if x.len() != complex.rank(1) {
        return Err(Error::InvalidInput(format!("x has length {}, expected {}", x.len(), complex.rank(1))));
    }
    let bd = complex.boundary(1).mul_vec(x);
    if bd.iter().any(|v| !v.is_zero()) {
        return Err(Error::InvalidInput("x is not a cycle".into()));
    }
    let theta_x = loc.lift_chain(1, x)?;
    let reps = op.adapted(complex.level)?;
    let image = hecke_image(&theta_x, &reps)?;
    if image.is_zero() && theta_x.is_zero() {
        let y = SharblyChain::new(f, 2, 2);
        return Ok(Witness { level: complex.level, a, x: x.to_vec(), theta_x, image, y, u: Vec::new() });
    }
    let r = one_sharbly_reduce_n2(&image, budget)?;
    let y = r.homotopy.scaled(&f.neg(&f.one()));
    let mut e = r.reduced.clone();
    e.add_chain(&r.flats, &f.one());
    e.add_chain(&theta_x, &f.neg(&a));
    let u = certify_zero(&e, complex.level)?.ok_or_else(|| {
        Error::Undetermined(format!("no chain-level certificate for eigenvalue {}", f.render(&a)))
    })?;
    let w = Witness { level: complex.level, a, x: x.to_vec(), theta_x, image, y, u };
    if !w.check()? {
        return Err(Error::Invariant("constructed certificate fails its identity".into()));
    }
    Ok(w)
}

/// Converts a small field element to `i64` for reporting.
pub fn coeff_as_i64(field: Field, c: &Coeff) -> Option<i64> {
    let r = field.try_reduce(c)?;
    r.is_integer().then(|| r.numer().to_i64()).flatten()
}
