//! The coinvariant complex of `Gamma_0(N)` acting on the Voronoi complex, with
//! trivial coefficients over Q or F_p, and its homology.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::congruence::{split_orbits, OrbitSplitting, ProjPoint};
use crate::error::{Error, Result};
use crate::linalg::{Coeff, Field, SparseFieldMatrix};
use crate::voronoi::complex::json_rows;
use crate::voronoi::CellComplexTable;

/// Basis element of a degree: a cell orbit together with the canonical point
/// of one of its `Gamma_0(N)`-orbits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub orbit: usize,
    pub point: ProjPoint,
}

#[derive(Clone, Debug)]
pub struct DegreeData {
    pub splittings: Vec<OrbitSplitting>,
    pub basis: Vec<BasisLabel>,
    /// `(cell orbit, split orbit)` to basis position.
    index: HashMap<(usize, usize), usize>,
}

#[derive(Clone, Debug)]
pub struct GammaComplex {
    pub n: usize,
    pub level: u64,
    pub field: Field,
    pub table: Arc<CellComplexTable>,
    pub degrees: Vec<DegreeData>,
    /// `boundaries[k]` maps degree `k` to degree `k - 1`; `boundaries[0]` is the
    /// zero map to the zero space.
    boundaries: Vec<SparseFieldMatrix>,
}

/// Rejects fields where the coinvariant computation is not valid: `p = 2`, or
/// `p` dividing some effective stabilizer order.
fn check_field(field: Field, degrees: &[DegreeData]) -> Result<()> {
    let Field::Prime(p) = field else { return Ok(()) };
    if p == 2 {
        return Err(Error::Precondition("characteristic 2 is not allowed: 2 must be invertible".into()));
    }
    Field::prime(p)?;
    for (k, d) in degrees.iter().enumerate() {
        for (j, s) in d.splittings.iter().enumerate() {
            for o in &s.orbits {
                let order = o.effective_stabilizer.len() as u64;
                if order.is_multiple_of(p) {
                    return Err(Error::Precondition(format!(
                        "p = {p} divides the stabilizer order {order} of degree {k} orbit {j} at point {}",
                        o.point
                    )));
                }
            }
        }
    }
    Ok(())
}

pub fn build_complex(n: usize, level: u64, field: Field) -> Result<GammaComplex> {
    build_complex_seeded(n, level, field, None)
}

/// As [`build_complex`], optionally assembling the boundary matrices in a
/// seeded random order. The result never depends on the seed.
pub fn build_complex_seeded(n: usize, level: u64, field: Field, seed: Option<u64>) -> Result<GammaComplex> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidInput(format!("homology supports n = 2, 3, got {n}")));
    }
    if level == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    if let Field::Prime(p) = field {
        if p == 2 {
            return Err(Error::Precondition("characteristic 2 is not allowed: 2 must be invertible".into()));
        }
        Field::prime(p)?;
    }
    let table = CellComplexTable::cached(n)?;
    let mut degrees = Vec::new();
    for orbits in &table.degrees {
        let splittings: Vec<OrbitSplitting> =
            orbits.iter().map(|o| split_orbits(o, level)).collect::<Result<_>>()?;
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for (j, s) in splittings.iter().enumerate() {
            for (si, so) in s.orbits.iter().enumerate() {
                if so.orientation_ok {
                    index.insert((j, si), basis.len());
                    basis.push(BasisLabel { orbit: j, point: so.point.clone() });
                }
            }
        }
        degrees.push(DegreeData { splittings, basis, index });
    }
    check_field(field, &degrees)?;
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut boundaries = vec![SparseFieldMatrix::new(field, 0, degrees[0].basis.len())];
    for k in 1..degrees.len() {
        let mut trip: Vec<(usize, usize, Coeff)> = Vec::new();
        let mut cols: Vec<usize> = (0..degrees[k].basis.len()).collect();
        if let Some(r) = rng.as_mut() {
            cols.shuffle(r);
        }
        for col in cols {
            let label = &degrees[k].basis[col];
            for f in &table.degrees[k][label.orbit].facets {
                let target = label.point.act_unchecked(&f.gamma);
                let (split, chi) = degrees[k - 1].splittings[f.orbit].classify(&target);
                if let Some(&row) = degrees[k - 1].index.get(&(f.orbit, split)) {
                    trip.push((row, col, field.from_int(f.sign as i64 * chi as i64)));
                }
            }
        }
        if let Some(r) = rng.as_mut() {
            trip.shuffle(r);
        }
        boundaries.push(SparseFieldMatrix::from_triplets(
            field,
            degrees[k - 1].basis.len(),
            degrees[k].basis.len(),
            trip,
        )?);
    }
    let c = GammaComplex { n, level, field, table, degrees, boundaries };
    c.check_boundaries()?;
    Ok(c)
}

/// Homology in one degree: generators plus the data to express cycles.
#[derive(Clone, Debug)]
pub struct HomologyResult {
    pub degree: usize,
    pub dimension: usize,
    /// Cycle representatives, coordinates in the degree basis.
    pub cycles: Vec<Vec<Coeff>>,
    boundary_out: SparseFieldMatrix,
    incoming: SparseFieldMatrix,
    /// Columns: the cycles, then the columns of the incoming boundary.
    system: SparseFieldMatrix,
}

/// Coordinates of a cycle, and a chain one degree up whose boundary is the
/// difference between the cycle and its reconstruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expressed {
    pub coords: Vec<Coeff>,
    pub witness: Vec<Coeff>,
}

impl GammaComplex {
    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn rank(&self, k: usize) -> usize {
        self.degrees[k].basis.len()
    }

    pub fn boundary(&self, k: usize) -> &SparseFieldMatrix {
        &self.boundaries[k]
    }

    /// Exact check of `d_k d_{k+1} = 0` in every degree.
    pub fn check_boundaries(&self) -> Result<()> {
        for k in 1..self.boundaries.len().saturating_sub(1) {
            if !self.boundaries[k].mul(&self.boundaries[k + 1]).is_zero() {
                return Err(Error::Invariant(format!("boundary squared is nonzero in degree {}", k + 1)));
            }
        }
        Ok(())
    }

    /// Basis position and sign of the oriented cell `rep_orbit . delta` whose
    /// label is `point`; `None` when that cell dies in the coinvariants.
    pub fn coordinate(&self, k: usize, orbit: usize, point: &ProjPoint) -> Option<(usize, i8)> {
        let d = &self.degrees[k];
        let (split, chi) = d.splittings[orbit].classify(point);
        d.index.get(&(orbit, split)).map(|&i| (i, chi))
    }

    pub fn homology(&self, k: usize) -> Result<HomologyResult> {
        if k > self.max_degree() {
            return Err(Error::InvalidInput(format!("degree {k} out of range 0..={}", self.max_degree())));
        }
        let f = self.field;
        let dim_k = self.rank(k);
        let out = self.boundaries[k].clone();
        let (_, kernel) = out.rank_kernel()?;
        let incoming = if k < self.max_degree() {
            self.boundaries[k + 1].clone()
        } else {
            SparseFieldMatrix::new(f, dim_k, 0)
        };
        let mut span = IncrementalSpan::new(f);
        for c in 0..incoming.cols() {
            span.insert(&incoming.column(c));
        }
        let cycles: Vec<Vec<Coeff>> = kernel.into_iter().filter(|z| span.insert(z)).collect();
        HomologyResult::from_cycles(k, cycles, out, incoming)
    }

    pub fn betti_numbers(&self) -> Result<Vec<usize>> {
        (0..=self.max_degree()).map(|k| Ok(self.homology(k)?.dimension)).collect()
    }

    pub fn to_json(&self) -> Result<Value> {
        let mut degrees = Vec::new();
        let betti = self.betti_numbers()?;
        for (k, d) in self.degrees.iter().enumerate() {
            let basis: Vec<Value> =
                d.basis.iter().map(|b| json!({"orbit": b.orbit, "point": b.point.coords()})).collect();
            let trip: Vec<Value> = self.boundaries[k]
                .triplets()
                .map(|(r, c, x)| json!([r, c, self.field.render(x)]))
                .collect();
            degrees.push(json!({
                "degree": k,
                "basis": basis,
                "boundary": {"rows": self.boundaries[k].rows(), "cols": self.boundaries[k].cols(), "entries": trip},
                "betti": betti[k],
            }));
        }
        Ok(json!({"n": self.n, "level": self.level, "field": self.field.to_string(), "degrees": degrees}))
    }

    /// Reads a cached complex. Orbit splittings are recomputed from the cell
    /// table; the stored basis and boundaries must agree with them.
    pub fn from_json(v: &Value) -> Result<GammaComplex> {
        let bad = |m: &str| Error::InvalidInput(format!("complex cache: {m}"));
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("n"))? as usize;
        let level = v.get("level").and_then(Value::as_u64).ok_or_else(|| bad("level"))?;
        let field: Field = v.get("field").and_then(Value::as_str).ok_or_else(|| bad("field"))?.parse()?;
        let fresh = build_complex(n, level, field)?;
        let degrees = v.get("degrees").and_then(Value::as_array).ok_or_else(|| bad("degrees"))?;
        if degrees.len() != fresh.degrees.len() {
            return Err(bad("degree count"));
        }
        for (k, d) in degrees.iter().enumerate() {
            let basis = d.get("basis").and_then(Value::as_array).ok_or_else(|| bad("basis"))?;
            let labels: Vec<BasisLabel> = basis
                .iter()
                .map(|b| {
                    let orbit = b.get("orbit").and_then(Value::as_u64).ok_or_else(|| bad("orbit"))? as usize;
                    let pt = json_rows(&json!([b.get("point").cloned().unwrap_or(Value::Null)]))?;
                    Ok(BasisLabel { orbit, point: ProjPoint::new(level, &pt[0])? })
                })
                .collect::<Result<_>>()?;
            if labels != fresh.degrees[k].basis {
                return Err(bad("basis disagrees with recomputation"));
            }
            let b = d.get("boundary").ok_or_else(|| bad("boundary"))?;
            let entries = b.get("entries").and_then(Value::as_array).ok_or_else(|| bad("entries"))?;
            let rows = b.get("rows").and_then(Value::as_u64).ok_or_else(|| bad("rows"))? as usize;
            let cols = b.get("cols").and_then(Value::as_u64).ok_or_else(|| bad("cols"))? as usize;
            let trip: Vec<(usize, usize, Coeff)> = entries
                .iter()
                .map(|e| {
                    let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| bad("triplet"))?;
                    let r = e[0].as_u64().ok_or_else(|| bad("row"))? as usize;
                    let c = e[1].as_u64().ok_or_else(|| bad("col"))? as usize;
                    let x: num_rational::BigRational =
                        e[2].as_str().ok_or_else(|| bad("coefficient"))?.parse().map_err(|_| bad("coefficient"))?;
                    Ok((r, c, field.reduce(x)))
                })
                .collect::<Result<_>>()?;
            let m = SparseFieldMatrix::from_triplets(field, rows, cols, trip)?;
            if &m != fresh.boundary(k) {
                return Err(bad("boundary disagrees with recomputation"));
            }
            let betti = d.get("betti").and_then(Value::as_u64).ok_or_else(|| bad("betti"))? as usize;
            if betti != fresh.homology(k)?.dimension {
                return Err(bad("Betti number disagrees with recomputation"));
            }
        }
        Ok(fresh)
    }

    /// Euler characteristic of the chain groups.
    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.max_degree()).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.rank(k) as i64).sum()
    }

    pub fn ranks(&self) -> BTreeMap<usize, usize> {
        (0..=self.max_degree()).map(|k| (k, self.rank(k))).collect()
    }
}

impl HomologyResult {
    fn from_cycles(
        degree: usize,
        cycles: Vec<Vec<Coeff>>,
        boundary_out: SparseFieldMatrix,
        incoming: SparseFieldMatrix,
    ) -> Result<Self> {
        let f = boundary_out.field();
        let mut trip = Vec::new();
        for (c, z) in cycles.iter().enumerate() {
            for (r, x) in z.iter().enumerate() {
                if !x.is_zero() {
                    trip.push((r, c, x.clone()));
                }
            }
        }
        for (r, c, x) in incoming.triplets() {
            trip.push((r, cycles.len() + c, x.clone()));
        }
        let system = SparseFieldMatrix::from_triplets(f, boundary_out.cols(), cycles.len() + incoming.cols(), trip)?;
        Ok(HomologyResult { degree, dimension: cycles.len(), cycles, boundary_out, incoming, system })
    }

    /// The same homology with a seeded random change of basis: each cycle is
    /// replaced by itself plus random multiples of later cycles and of
    /// boundaries.
    pub fn with_random_basis(&self, seed: u64) -> Result<HomologyResult> {
        let f = self.system.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cycles = self.cycles.clone();
        for i in 0..cycles.len() {
            for j in i + 1..self.cycles.len() {
                let t = f.from_int(rng.gen_range(-3..=3));
                for (x, y) in cycles[i].iter_mut().zip(&self.cycles[j]) {
                    *x = f.add(x, &f.mul(&t, y));
                }
            }
            for c in 0..self.incoming.cols() {
                if rng.gen_bool(0.3) {
                    let t = f.from_int(rng.gen_range(-2..=2));
                    for (r, y) in self.incoming.column(c).iter().enumerate() {
                        cycles[i][r] = f.add(&cycles[i][r], &f.mul(&t, y));
                    }
                }
            }
        }
        cycles.reverse();
        HomologyResult::from_cycles(self.degree, cycles, self.boundary_out.clone(), self.incoming.clone())
    }

    /// Coordinates of a cycle in the homology basis, with a boundary witness.
    pub fn express_cycle(&self, chain: &[Coeff]) -> Result<Expressed> {
        if chain.len() != self.system.rows() {
            return Err(Error::InvalidInput(format!(
                "chain has {} coordinates, degree {} has {}",
                chain.len(),
                self.degree,
                self.system.rows()
            )));
        }
        let f = self.system.field();
        let reduced: Vec<Coeff> = chain.iter().map(|x| f.reduce(x.clone())).collect();
        let bd = self.boundary_out.mul_vec(&reduced);
        if bd.iter().any(|x| !x.is_zero()) {
            let nz: Vec<String> = bd
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| format!("{i}:{}", f.render(x)))
                .collect();
            return Err(Error::InvalidInput(format!("not a cycle; boundary = {{{}}}", nz.join(", "))));
        }
        let x = self
            .system
            .solve(&reduced)
            .ok_or_else(|| Error::Invariant("cycle is not in the span of generators and boundaries".into()))?;
        let (coords, witness) = x.split_at(self.dimension);
        Ok(Expressed { coords: coords.to_vec(), witness: witness.to_vec() })
    }
}

/// Row-reduced spanning set, grown one vector at a time.
struct IncrementalSpan {
    field: Field,
    rows: Vec<(usize, Vec<Coeff>)>,
}

impl IncrementalSpan {
    fn new(field: Field) -> Self {
        IncrementalSpan { field, rows: Vec::new() }
    }

    /// Adds `v` and reports whether it was independent of the current span.
    fn insert(&mut self, v: &[Coeff]) -> bool {
        let f = self.field;
        let mut r: Vec<Coeff> = v.iter().map(|x| f.reduce(x.clone())).collect();
        for (p, row) in &self.rows {
            if r[*p].is_zero() {
                continue;
            }
            let factor = r[*p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        let Some(p) = r.iter().position(|x| !x.is_zero()) else { return false };
        let inv = f.inv(&r[p]).unwrap();
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        self.rows.push((p, r));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_eleven() {
        let c = build_complex(2, 11, Field::Rational).unwrap();
        assert_eq!((c.rank(0), c.rank(1)), (6, 4));
        assert_eq!(c.betti_numbers().unwrap(), vec![3, 1]);
    }

    #[test]
    fn level_one() {
        let c = build_complex(2, 1, Field::Rational).unwrap();
        assert_eq!((c.rank(0), c.rank(1)), (0, 1));
        assert_eq!(c.betti_numbers().unwrap(), vec![0, 1]);
    }

    #[test]
    fn characteristic_two_rejected() {
        assert!(matches!(build_complex(2, 11, Field::Prime(2)), Err(Error::Precondition(_))));
    }

    #[test]
    fn basis_cycles_have_unit_coordinates() {
        let c = build_complex(2, 11, Field::Rational).unwrap();
        let h = c.homology(0).unwrap();
        for (i, z) in h.cycles.iter().enumerate() {
            let e = h.express_cycle(z).unwrap();
            for (j, x) in e.coords.iter().enumerate() {
                assert_eq!(*x, if i == j { Field::Rational.one() } else { Field::Rational.zero() });
            }
        }
    }
}
