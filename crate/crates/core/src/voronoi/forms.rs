//! Minimal vectors and the Voronoi neighbor walk over perfect forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::cells::rank_one_coords;
use super::search::{det_profile, find_transforms, subsets, DetRule};
use crate::error::{Error, Result};
use crate::linalg::matrix::{IntMatrix, Vector};
use crate::linalg::{Field, GramForm, RationalForm, SparseFieldMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectForm {
    pub gram: GramForm,
    pub minimum: BigInt,
    pub min_vectors: Vec<Vector>,
}

/// Minimum and all minimizers up to sign.
pub fn minimal_vectors(q: &GramForm) -> Result<(BigInt, Vec<Vector>)> {
    let (m, vs) = rational_minimum(&RationalForm::from_int(q.matrix()))?;
    Ok((m.to_integer(), vs))
}

fn rational_minimum(q: &RationalForm) -> Result<(BigRational, Vec<Vector>)> {
    let n = q.dim();
    let bound = (0..n).map(|i| q.entries[i][i].clone()).min().expect("nonempty form");
    let cands = q.short_vectors(&bound)?;
    let vals: Vec<BigRational> = cands.iter().map(|v| q.eval(v)).collect();
    let m = vals.iter().min().cloned().expect("a basis vector attains the bound");
    let vs = cands.into_iter().zip(vals).filter(|(_, x)| *x == m).map(|(v, _)| v).collect();
    Ok((m, vs))
}

/// Row of the functional `F -> v F v^t` in the coordinates `F_ij`, `i <= j`.
fn evaluation_row(v: &[BigInt]) -> Vec<BigInt> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let x = &v[i] * &v[j];
            out.push(if i == j { x } else { x * 2 });
        }
    }
    out
}

fn q_matrix(rows: &[Vec<BigInt>], cols: usize) -> SparseFieldMatrix {
    let trip: Vec<(usize, usize, BigRational)> = rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(move |(c, x)| (r, c, BigRational::from_integer(x.clone())))
        })
        .collect();
    SparseFieldMatrix::from_triplets(Field::Rational, rows.len(), cols, trip).expect("valid field")
}

/// Primitive integer vector on the ray of a rational vector.
fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.into_iter().map(|x| x / &g).collect()
}

fn sym_from_coords(n: usize, f: &[BigInt]) -> Vec<Vec<BigRational>> {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[i][j] = BigRational::from_integer(f[k].clone());
            m[j][i] = m[i][j].clone();
            k += 1;
        }
    }
    m
}

impl PerfectForm {
    pub fn from_gram(gram: GramForm) -> Result<Self> {
        let (minimum, min_vectors) = minimal_vectors(&gram)?;
        Ok(PerfectForm { gram, minimum, min_vectors })
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn is_perfect(&self) -> bool {
        let n = self.dim();
        let rows: Vec<Vec<BigInt>> = self.min_vectors.iter().map(|v| rank_one_coords(v)).collect();
        q_matrix(&rows, n * (n + 1) / 2).rank() == n * (n + 1) / 2
    }

    /// Inward facet normals of the cone spanned by the rank-one forms of the
    /// minimal vectors, as symmetric coordinate vectors.
    fn facet_normals(&self) -> Vec<Vec<BigInt>> {
        let n = self.dim();
        let d = n * (n + 1) / 2;
        let evals: Vec<Vec<BigInt>> = self.min_vectors.iter().map(|v| evaluation_row(v)).collect();
        let mut normals: Vec<Vec<BigInt>> = Vec::new();
        let mut cur = Vec::new();
        subsets(evals.len(), d - 1, 0, &mut cur, &mut |s| {
            let rows: Vec<Vec<BigInt>> = s.iter().map(|&i| evals[i].clone()).collect();
            let (rank, ker) = q_matrix(&rows, d).rank_kernel().expect("valid field");
            if rank != d - 1 {
                return;
            }
            let mut f = primitive(&ker[0]);
            let signs: Vec<BigInt> =
                evals.iter().map(|e| e.iter().zip(&f).map(|(a, b)| a * b).sum::<BigInt>()).collect();
            let pos = signs.iter().any(|x| x.is_positive());
            let neg = signs.iter().any(|x| x.is_negative());
            if pos && neg {
                return;
            }
            if neg {
                f = f.into_iter().map(|x| -x).collect();
            }
            if !normals.contains(&f) {
                normals.push(f);
            }
        });
        normals.sort();
        normals
    }

    /// The perfect form across the facet with normal `f`.
    fn neighbor(&self, f: &[BigInt]) -> Result<PerfectForm> {
        let n = self.dim();
        let q = RationalForm::from_int(self.gram.matrix());
        let fm = RationalForm { entries: sym_from_coords(n, f) };
        let lambda = BigRational::from_integer(self.minimum.clone());
        let mut lo = BigRational::zero();
        let mut u = BigRational::one();
        for _ in 0..10_000 {
            let r = q.add_scaled(&fm, &u);
            if !r.is_positive_definite() {
                u = (&lo + &u) / BigRational::from_integer(2.into());
                continue;
            }
            let short = r.short_vectors(&lambda)?;
            let below: Vec<&Vector> = short.iter().filter(|v| r.eval(v) < lambda).collect();
            if !below.is_empty() {
                u = below
                    .iter()
                    .map(|v| (q.eval(v) - &lambda) / (-fm.eval(v)))
                    .min()
                    .expect("nonempty");
                continue;
            }
            let fresh = short.iter().any(|v| r.eval(v) == lambda && !fm.eval(v).is_zero());
            if fresh {
                let ints = primitive(&r.entries.concat());
                let gram = GramForm::new(IntMatrix::from_rows(
                    &ints.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>(),
                ))?;
                return PerfectForm::from_gram(gram);
            }
            lo = u.clone();
            u = &u * BigRational::from_integer(2.into());
        }
        Err(Error::Invariant("Voronoi neighbor search did not converge".into()))
    }
}

/// `GL(n,Z)`-equivalence up to scaling: perfect forms are determined by their
/// minimal vectors.
pub fn equivalent_forms(a: &PerfectForm, b: &PerfectForm) -> bool {
    a.dim() == b.dim()
        && a.min_vectors.len() == b.min_vectors.len()
        && det_profile(&a.min_vectors, a.dim()) == det_profile(&b.min_vectors, b.dim())
        && !find_transforms(&a.min_vectors, &b.min_vectors, DetRule::General, true, |_| true).is_empty()
}

/// The root lattice form with `2` on the diagonal and `1` elsewhere.
pub fn root_form(n: usize) -> GramForm {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, BigInt::from(if i == j { 2 } else { 1 }));
        }
    }
    GramForm::new(m).expect("positive definite")
}

/// One perfect form per equivalence class, by closure under neighbors.
pub fn perfect_forms(n: usize) -> Result<Vec<PerfectForm>> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidInput(format!("perfect forms supported for 2 <= n <= 4, got {n}")));
    }
    let mut classes = vec![PerfectForm::from_gram(root_form(n))?];
    let mut i = 0;
    while i < classes.len() {
        let current = classes[i].clone();
        if !current.is_perfect() {
            return Err(Error::Invariant("neighbor walk produced a non-perfect form".into()));
        }
        for f in current.facet_normals() {
            let nb = current.neighbor(&f)?;
            if !classes.iter().any(|c| equivalent_forms(c, &nb)) {
                classes.push(nb);
            }
        }
        i += 1;
    }
    Ok(classes)
}
