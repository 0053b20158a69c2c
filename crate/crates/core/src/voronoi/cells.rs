//! Voronoi cells as sets of primitive vectors, their stabilizers and
//! orientation characters.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::search::{det_profile, find_transforms, permutation_sign, DetRule};
use crate::error::{Error, Result};
use crate::linalg::matrix::{normalize_line, IntMatrix, Vector};
use crate::linalg::{Field, SparseFieldMatrix};

/// A cell `sigma(v_1, ..., v_m)`, vertices sign-normalized and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoronoiCell {
    n: usize,
    vertices: Vec<Vector>,
}

/// An element of a cell stabilizer with its orientation character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerElement {
    pub matrix: IntMatrix,
    pub character: i8,
}

/// Coordinates of the rank-one form `v^t v` in the basis `E_ij`, `i <= j`.
pub fn rank_one_coords(v: &[BigInt]) -> Vec<BigInt> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(&v[i] * &v[j]);
        }
    }
    out
}

fn rank_q(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let trip = rows.iter().enumerate().flat_map(|(r, row)| {
        row.iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(c, x)| (r, c, BigRational::from_integer(x.clone())))
    });
    SparseFieldMatrix::from_triplets(Field::Rational, rows.len(), cols, trip.collect::<Vec<_>>())
        .expect("valid field")
        .rank()
}

impl VoronoiCell {
    /// Normalizes and sorts; rejects zero and repeated vectors.
    pub fn new(n: usize, vectors: &[Vector]) -> Result<Self> {
        let mut vertices = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != n {
                return Err(Error::InvalidInput(format!("vertex of length {} in dimension {n}", v.len())));
            }
            vertices.push(normalize_line(v).ok_or_else(|| Error::InvalidInput("zero vertex".into()))?);
        }
        vertices.sort();
        let before = vertices.len();
        vertices.dedup();
        if vertices.len() != before || vertices.is_empty() {
            return Err(Error::InvalidInput("cell vertices must be distinct lines".into()));
        }
        Ok(VoronoiCell { n, vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Projectivized dimension of the span of the rank-one vertex forms.
    pub fn dim(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = self.vertices.iter().map(|v| rank_one_coords(v)).collect();
        rank_q(&rows) - 1
    }

    pub fn is_degenerate(&self) -> bool {
        IntMatrix::from_rows(&self.vertices).rank() < self.n
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim() + 1
    }

    /// Image under the right action `v -> v g`.
    pub fn act(&self, g: &IntMatrix) -> VoronoiCell {
        let moved: Vec<Vector> = self.vertices.iter().map(|v| g.act_on_row(v)).collect();
        VoronoiCell::new(self.n, &moved).expect("invertible action preserves distinct lines")
    }

    /// Index of each vertex's image under `g` in the sorted vertex list of
    /// `target`.
    pub fn vertex_map(&self, g: &IntMatrix, target: &VoronoiCell) -> Option<Vec<usize>> {
        self.vertices
            .iter()
            .map(|v| {
                let w = normalize_line(&g.act_on_row(v))?;
                target.vertices.binary_search(&w).ok()
            })
            .collect()
    }

    /// Greedy independent subset of vertex forms, in sorted order.
    pub fn orientation_basis(&self) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            rows.push(rank_one_coords(v));
            if rank_q(&rows) == rows.len() {
                chosen.push(i);
            } else {
                rows.pop();
            }
        }
        chosen
    }

    /// Sign of the map induced by a stabilizer element on the cell's span.
    pub fn orientation_character(&self, g: &IntMatrix) -> i8 {
        if self.is_simplex() {
            let perm = self.vertex_map(g, self).expect("g stabilizes the cell");
            return permutation_sign(&perm);
        }
        // general cells: determinant of the induced map in the orientation basis
        let basis = self.orientation_basis();
        let forms: Vec<Vec<BigInt>> = basis.iter().map(|&i| rank_one_coords(&self.vertices[i])).collect();
        let images: Vec<Vec<BigInt>> =
            basis.iter().map(|&i| rank_one_coords(&g.act_on_row(&self.vertices[i]))).collect();
        let coords = express_in(&forms, &images);
        let d = rational_det(coords);
        if d > BigRational::zero() {
            1
        } else {
            -1
        }
    }

    /// Invariant used to prefilter equivalence searches.
    pub fn profile(&self) -> Vec<BigInt> {
        det_profile(&self.vertices, self.n)
    }
}

/// Rational coordinates of each `target` row in the basis `basis`.
fn express_in(basis: &[Vec<BigInt>], targets: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    let k = basis.len();
    let d = basis[0].len();
    let f = Field::Rational;
    let trip: Vec<(usize, usize, BigRational)> = (0..d)
        .flat_map(|r| (0..k).map(move |c| (r, c)))
        .filter(|&(r, c)| !basis[c][r].is_zero())
        .map(|(r, c)| (r, c, BigRational::from_integer(basis[c][r].clone())))
        .collect();
    let m = SparseFieldMatrix::from_triplets(f, d, k, trip).expect("valid field");
    targets
        .iter()
        .map(|t| {
            let b: Vec<BigRational> = t.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            m.solve(&b).expect("image lies in the span")
        })
        .collect()
}

fn rational_det(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let factor = &a[r][c] / &a[c][c];
            for k in c..n {
                let s = &factor * &a[c][k];
                a[r][k] -= s;
            }
        }
    }
    det
}

/// Some `g` in `SL(n,Z)` with `c1 g = c2`, or `None`.
pub fn equivalent_cells(c1: &VoronoiCell, c2: &VoronoiCell) -> Option<IntMatrix> {
    if c1.n != c2.n || c1.vertices.len() != c2.vertices.len() || c1.profile() != c2.profile() {
        return None;
    }
    find_transforms(&c1.vertices, &c2.vertices, DetRule::Special, true, |_| true).pop()
}

/// Full `GL(n,Z)` stabilizer, then the `SL` subgroup with orientation
/// characters.
pub fn cell_stabilizer(c: &VoronoiCell) -> Result<(Vec<IntMatrix>, Vec<StabilizerElement>)> {
    if c.is_degenerate() {
        return Err(Error::InvalidInput("stabilizer of a degenerate cell is infinite".into()));
    }
    let mut gl = find_transforms(&c.vertices, &c.vertices, DetRule::General, false, |_| true);
    gl.sort();
    let sl = gl
        .iter()
        .filter(|g| g.det().is_one())
        .map(|g| StabilizerElement { matrix: g.clone(), character: c.orientation_character(g) })
        .collect();
    Ok((gl, sl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vector;

    fn cell(vs: &[&[i64]]) -> VoronoiCell {
        let n = vs[0].len();
        VoronoiCell::new(n, &vs.iter().map(|v| vector(v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn square_stabilizer() {
        let c = cell(&[&[1, 0], &[0, 1]]);
        let (gl, sl) = cell_stabilizer(&c).unwrap();
        assert_eq!(gl.len(), 8);
        assert_eq!(sl.len(), 4);
        assert!(sl.iter().any(|s| s.character == -1));
        assert_eq!(c.dim(), 1);
    }

    #[test]
    fn triangle_stabilizer() {
        let c = cell(&[&[1, 0], &[0, 1], &[1, 1]]);
        let (gl, sl) = cell_stabilizer(&c).unwrap();
        assert_eq!(gl.len(), 12);
        assert_eq!(sl.len(), 6);
        assert!(sl.iter().all(|s| s.character == 1));
        // cyclic: some element has order 6
        let has_order_six = sl.iter().any(|s| {
            let mut p = s.matrix.clone();
            let mut ord = 1;
            while p != IntMatrix::identity(2) {
                p = p.mul(&s.matrix);
                ord += 1;
            }
            ord == 6
        });
        assert!(has_order_six);
    }

    #[test]
    fn shear_witness() {
        let a = cell(&[&[1, 0], &[0, 1]]);
        let b = cell(&[&[1, 1], &[0, 1]]);
        let g = equivalent_cells(&a, &b).unwrap();
        assert_eq!(a.act(&g), b);
        assert!(equivalent_cells(&a, &cell(&[&[1, 0], &[1, 2]])).is_none());
    }

    #[test]
    fn degenerate_flag() {
        assert!(cell(&[&[1, 0, 0], &[0, 1, 0]]).is_degenerate());
        assert!(!cell(&[&[1, 0], &[0, 1]]).is_degenerate());
    }
}
