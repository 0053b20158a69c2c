//! Sharbly generators in normal form and formal chains of them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::congruence::Gamma0;
use crate::error::{Error, Result};
use crate::linalg::matrix::{is_zero_vector, normalize_line, IntMatrix, Vector};
use crate::linalg::{Coeff, Field};
use crate::voronoi::search::{det_profile, find_transforms, DetRule};
use crate::voronoi::VoronoiCell;

/// `[v_1, ..., v_{n+k}]` in normal form: primitive sign-normalized vectors,
/// sorted, pairwise distinct, spanning `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sharbly {
    n: usize,
    vectors: Vec<Vector>,
}

/// Result of normalizing a tuple of vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SharblyElement {
    Zero,
    Term { sign: i8, sharbly: Sharbly },
}

impl SharblyElement {
    pub fn is_zero(&self) -> bool {
        matches!(self, SharblyElement::Zero)
    }

    pub fn term(&self) -> Option<(i8, &Sharbly)> {
        match self {
            SharblyElement::Zero => None,
            SharblyElement::Term { sign, sharbly } => Some((*sign, sharbly)),
        }
    }
}

/// Normal form of `[v_1, ..., v_m]` in dimension `n`.
pub fn normalize(n: usize, vectors: &[Vector]) -> Result<SharblyElement> {
    if vectors.len() < n {
        return Err(Error::InvalidInput(format!("{} vectors cannot span Q^{n}", vectors.len())));
    }
    let mut lines = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != n {
            return Err(Error::InvalidInput(format!("vector of length {} in dimension {n}", v.len())));
        }
        if is_zero_vector(v) {
            return Err(Error::InvalidInput("zero vector in a sharbly".into()));
        }
        lines.push(normalize_line(v).unwrap());
    }
    if IntMatrix::from_rows(&lines).rank() < n {
        return Ok(SharblyElement::Zero);
    }
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| lines[a].cmp(&lines[b]));
    if order.windows(2).any(|w| lines[w[0]] == lines[w[1]]) {
        return Ok(SharblyElement::Zero);
    }
    let sign = crate::voronoi::search::permutation_sign(&order);
    let vectors = order.iter().map(|&i| lines[i].clone()).collect();
    Ok(SharblyElement::Term { sign, sharbly: Sharbly { n, vectors } })
}

impl Sharbly {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.vectors.len() - self.n
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.vectors)
    }

    /// `|det|` of the vector matrix, for `k = 0`.
    pub fn abs_det(&self) -> BigInt {
        self.matrix().det().abs()
    }

    pub fn is_unimodular(&self) -> bool {
        self.k() == 0 && self.abs_det() == BigInt::from(1)
    }

    /// Normal form of `self g`.
    pub fn act(&self, g: &IntMatrix) -> Result<SharblyElement> {
        let moved: Vec<Vector> = self.vectors.iter().map(|v| g.act_on_row(v)).collect();
        normalize(self.n, &moved)
    }
}

impl fmt::Display for Sharbly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vectors
            .iter()
            .map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Modular symbol `[[X]]` with `|det X| = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnimodularSymbol(Sharbly);

impl UnimodularSymbol {
    pub fn new(s: Sharbly) -> Result<Self> {
        if !s.is_unimodular() {
            return Err(Error::InvalidInput(format!("{s} is not unimodular")));
        }
        Ok(UnimodularSymbol(s))
    }

    pub fn sharbly(&self) -> &Sharbly {
        &self.0
    }
}

/// Finite formal sum of sharblies of a fixed `n` and `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharblyChain {
    field: Field,
    n: usize,
    k: usize,
    terms: BTreeMap<Sharbly, Coeff>,
}

impl SharblyChain {
    pub fn new(field: Field, n: usize, k: usize) -> Self {
        SharblyChain { field, n, k, terms: BTreeMap::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Sharbly, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &Sharbly) -> Coeff {
        self.terms.get(s).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_sharbly(&mut self, s: &Sharbly, c: &Coeff) {
        debug_assert_eq!((s.n, s.k()), (self.n, self.k));
        let f = self.field;
        let cur = self.terms.remove(s).unwrap_or_else(Coeff::zero);
        let v = f.add(&cur, c);
        if !v.is_zero() {
            self.terms.insert(s.clone(), v);
        }
    }

    pub fn add_element(&mut self, e: &SharblyElement, c: &Coeff) {
        if let Some((sign, s)) = e.term() {
            let v = if sign < 0 { self.field.neg(c) } else { c.clone() };
            self.add_sharbly(s, &v);
        }
    }

    /// Adds `c [v_1, ..., v_m]`, normalizing first.
    pub fn add_vectors(&mut self, vectors: &[Vector], c: &Coeff) -> Result<()> {
        if vectors.len() != self.n + self.k {
            return Err(Error::InvalidInput(format!(
                "{} vectors in a chain of {}-sharblies in dimension {}",
                vectors.len(),
                self.k,
                self.n
            )));
        }
        let e = normalize(self.n, vectors)?;
        self.add_element(&e, c);
        Ok(())
    }

    pub fn add_chain(&mut self, other: &SharblyChain, scale: &Coeff) {
        let f = self.field;
        for (s, c) in &other.terms {
            self.add_sharbly(s, &f.mul(c, scale));
        }
    }

    pub fn scaled(&self, s: &Coeff) -> SharblyChain {
        let mut out = SharblyChain::new(self.field, self.n, self.k);
        out.add_chain(self, s);
        out
    }

    /// Same terms with coefficients reduced into another field.
    pub fn reduce_into(&self, field: Field) -> Result<SharblyChain> {
        let mut out = SharblyChain::new(field, self.n, self.k);
        for (s, c) in &self.terms {
            let x = field
                .try_reduce(c)
                .ok_or_else(|| Error::Precondition(format!("coefficient {c} is not defined in {field}")))?;
            out.add_sharbly(s, &x);
        }
        Ok(out)
    }

    /// Right action of an invertible integer matrix.
    pub fn act(&self, g: &IntMatrix) -> Result<SharblyChain> {
        let mut out = SharblyChain::new(self.field, self.n, self.k);
        for (s, c) in &self.terms {
            out.add_element(&s.act(g)?, c);
        }
        Ok(out)
    }

    /// `d [v_0, ..., v_m] = sum_i (-1)^i [v_0, ..., omit v_i, ..., v_m]`.
    pub fn boundary(&self) -> Result<SharblyChain> {
        if self.k == 0 {
            return Err(Error::InvalidInput("boundary of a 0-sharbly chain is not defined".into()));
        }
        let f = self.field;
        let mut out = SharblyChain::new(f, self.n, self.k - 1);
        for (s, c) in &self.terms {
            for i in 0..s.vectors.len() {
                let rest: Vec<Vector> =
                    s.vectors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
                let c = if i % 2 == 0 { c.clone() } else { f.neg(c) };
                out.add_element(&normalize(self.n, &rest)?, &c);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SharblyChain) -> SharblyChain {
        let mut out = self.clone();
        out.add_chain(other, &self.field.neg(&self.field.one()));
        out
    }
}

/// `theta([v_1, ..., v_m]) = [v_1, ..., v_m]` for a simplicial cell.
pub fn theta(cell: &VoronoiCell) -> Result<Sharbly> {
    if !cell.is_simplex() {
        return Err(Error::InvalidInput("theta is defined on simplicial cells only".into()));
    }
    match normalize(cell.n(), cell.vertices())? {
        SharblyElement::Term { sign: 1, sharbly } => Ok(sharbly),
        _ => Err(Error::InvalidInput("cell vertices do not form a nondegenerate sharbly".into())),
    }
}

/// Some `g` in `Gamma_0(N)` and `sign` with `a g = sign b`.
pub fn gamma0_equivalence(a: &Sharbly, b: &Sharbly, group: &Gamma0) -> Option<(IntMatrix, i8)> {
    if a.n != b.n || a.vectors.len() != b.vectors.len() || det_profile(&a.vectors, a.n) != det_profile(&b.vectors, b.n) {
        return None;
    }
    let g = find_transforms(&a.vectors, &b.vectors, DetRule::Special, true, |g| group.contains(g)).pop()?;
    let (sign, img) = a.act(&g).ok()?.term().map(|(s, x)| (s, x.clone()))?;
    debug_assert_eq!(&img, b);
    Some((g, sign))
}

/// All `g` in `Gamma_0(N)` stabilizing the underlying vector set of `a`,
/// with the sign of their action.
pub fn gamma0_stabilizer(a: &Sharbly, group: &Gamma0) -> Vec<(IntMatrix, i8)> {
    find_transforms(&a.vectors, &a.vectors, DetRule::Special, false, |g| group.contains(g))
        .into_iter()
        .filter_map(|g| {
            let sign = a.act(&g).ok()?.term()?.0;
            Some((g, sign))
        })
        .collect()
}

/// Largest absolute entry over all vectors, a size measure for reports.
pub fn height(s: &Sharbly) -> BigInt {
    s.vectors.iter().flatten().map(|x| x.abs()).max().unwrap_or_default()
}
