//! The table of cell orbits with facet incidences, plus its JSON form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use super::cells::{cell_stabilizer, equivalent_cells, StabilizerElement, VoronoiCell};
use super::forms::perfect_forms;
use super::search::{permutation_sign, subsets};
use crate::error::{Error, Result};
use crate::linalg::matrix::{IntMatrix, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetRecord {
    /// Orbit index in the next lower degree.
    pub orbit: usize,
    /// Carries the facet onto the orbit representative.
    pub gamma: IntMatrix,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellOrbit {
    pub representative: VoronoiCell,
    pub dim: usize,
    pub orientation_basis: Vec<usize>,
    pub gl_stabilizer_order: usize,
    pub stabilizer: Vec<StabilizerElement>,
    pub facets: Vec<FacetRecord>,
}

/// Cell orbits by degree `k`, where degree `k` holds cells of dimension
/// `n - 1 + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplexTable {
    pub n: usize,
    pub degrees: Vec<Vec<CellOrbit>>,
}

fn cell_key(c: &VoronoiCell) -> (BigInt, Vec<Vector>) {
    let s = c.vertices().iter().flatten().map(|x| x.abs()).sum();
    (s, c.vertices().to_vec())
}

fn make_orbit(rep: VoronoiCell) -> Result<CellOrbit> {
    let (gl, sl) = cell_stabilizer(&rep)?;
    Ok(CellOrbit {
        dim: rep.dim(),
        orientation_basis: rep.orientation_basis(),
        gl_stabilizer_order: gl.len(),
        stabilizer: sl,
        representative: rep,
        facets: Vec::new(),
    })
}

/// Locates `c` among `reps`: orbit index and an element carrying `c` onto it.
pub fn locate(c: &VoronoiCell, reps: &[CellOrbit]) -> Option<(usize, IntMatrix)> {
    reps.iter()
        .enumerate()
        .find_map(|(j, o)| equivalent_cells(c, &o.representative).map(|g| (j, g)))
}

fn facet_records(rep: &VoronoiCell, lower: &[CellOrbit]) -> Result<Vec<FacetRecord>> {
    let n = rep.n();
    let vs = rep.vertices();
    let mut out = Vec::new();
    for i in 0..vs.len() {
        let rest: Vec<Vector> = vs.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.clone()).collect();
        let facet = VoronoiCell::new(n, &rest)?;
        if facet.is_degenerate() {
            continue;
        }
        let (orbit, gamma) = locate(&facet, lower)
            .ok_or_else(|| Error::Invariant(format!("facet {rest:?} matches no cell orbit")))?;
        let perm = facet
            .vertex_map(&gamma, &lower[orbit].representative)
            .ok_or_else(|| Error::Invariant("facet map is not a vertex bijection".into()))?;
        let sign = if i % 2 == 0 { 1 } else { -1 } * permutation_sign(&perm);
        out.push(FacetRecord { orbit, gamma, sign });
    }
    Ok(out)
}

/// All non-degenerate cell orbits for `n = 2, 3` with facet incidences.
pub fn enumerate_cells(n: usize) -> Result<CellComplexTable> {
    match n {
        2 | 3 => {}
        4 => {
            return Err(Error::Unsupported(
                "n = 4 needs facet enumeration of the non-simplex top cell, which is not built in".into(),
            ))
        }
        _ => return Err(Error::InvalidInput(format!("cell enumeration supports n = 2, 3, got {n}"))),
    }
    let top_dim = n * (n + 1) / 2 - 1;
    let mut reflect = IntMatrix::identity(n);
    reflect.negate_row(0);
    let mut tops = Vec::new();
    for p in perfect_forms(n)? {
        let c = VoronoiCell::new(n, &p.min_vectors)?;
        if !c.is_simplex() {
            return Err(Error::Unsupported("non-simplex top cell".into()));
        }
        tops.push(c.act(&reflect));
        tops.push(c);
    }
    let mut degrees: Vec<Vec<CellOrbit>> = Vec::new();
    for dim in (n - 1)..=top_dim {
        let mut cands: BTreeSet<(BigInt, Vec<Vector>)> = BTreeSet::new();
        for t in &tops {
            let vs = t.vertices();
            let mut cur = Vec::new();
            subsets(vs.len(), dim + 1, 0, &mut cur, &mut |s| {
                let sub: Vec<Vector> = s.iter().map(|&i| vs[i].clone()).collect();
                let c = VoronoiCell::new(n, &sub).expect("distinct vertices");
                if !c.is_degenerate() {
                    cands.insert(cell_key(&c));
                }
            });
        }
        let mut orbits: Vec<CellOrbit> = Vec::new();
        for (_, vs) in cands {
            let c = VoronoiCell::new(n, &vs)?;
            if locate(&c, &orbits).is_none() {
                orbits.push(make_orbit(c)?);
            }
        }
        if let Some(lower) = degrees.last() {
            for o in orbits.iter_mut() {
                o.facets = facet_records(&o.representative, lower)?;
            }
        }
        degrees.push(orbits);
    }
    Ok(CellComplexTable { n, degrees })
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<CellComplexTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CellComplexTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn int_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub(crate) fn json_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::InvalidInput(format!("non-integer number {n}"))),
        Value::String(s) => s.parse().map_err(|_| Error::InvalidInput(format!("bad integer string {s:?}"))),
        _ => Err(Error::InvalidInput(format!("expected integer, got {v}"))),
    }
}

pub(crate) fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(int_json).collect())).collect())
}

pub(crate) fn json_rows(v: &Value) -> Result<Vec<Vector>> {
    let rows = v.as_array().ok_or_else(|| Error::InvalidInput("expected array of rows".into()))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::InvalidInput("expected row array".into()))?
                .iter()
                .map(json_int)
                .collect()
        })
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::InvalidInput(format!("missing key {key:?}")))
}

impl CellComplexTable {
    /// Process-wide memoized enumeration.
    pub fn cached(n: usize) -> Result<Arc<CellComplexTable>> {
        if let Some(t) = cache().lock().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let t = Arc::new(enumerate_cells(n)?);
        cache().lock().unwrap().insert(n, t.clone());
        Ok(t)
    }

    /// Cell dimension of degree `k`.
    pub fn cell_dim(&self, k: usize) -> usize {
        self.n - 1 + k
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn orbit_counts(&self) -> BTreeMap<usize, usize> {
        self.degrees.iter().enumerate().map(|(k, o)| (self.cell_dim(k), o.len())).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut dims = serde_json::Map::new();
        for (k, orbits) in self.degrees.iter().enumerate() {
            let recs: Vec<Value> = orbits
                .iter()
                .map(|o| {
                    let facets: Vec<Value> = o
                        .facets
                        .iter()
                        .map(|f| json!({"orbit": f.orbit, "gamma": matrix_json(&f.gamma), "sign": f.sign}))
                        .collect();
                    json!({
                        "vertices": matrix_json(&IntMatrix::from_rows(o.representative.vertices())),
                        "stabilizer_order": o.gl_stabilizer_order,
                        "sl_stabilizer_order": o.stabilizer.len(),
                        "facets": facets,
                    })
                })
                .collect();
            dims.insert(self.cell_dim(k).to_string(), Value::Array(recs));
        }
        json!({"n": self.n, "dimensions": Value::Object(dims)})
    }

    /// Rebuilds a table from its JSON form. Stabilizers are recomputed and every
    /// facet record is rechecked against its representative.
    pub fn from_json(v: &Value) -> Result<Self> {
        let n = field(v, "n")?
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("n must be a positive integer".into()))? as usize;
        let dims = field(v, "dimensions")?
            .as_object()
            .ok_or_else(|| Error::InvalidInput("dimensions must be an object".into()))?;
        let mut by_dim: Vec<(usize, &Value)> = Vec::new();
        for (k, val) in dims {
            let d: usize = k.parse().map_err(|_| Error::InvalidInput(format!("bad dimension key {k:?}")))?;
            by_dim.push((d, val));
        }
        by_dim.sort_by_key(|(d, _)| *d);
        let mut degrees: Vec<Vec<CellOrbit>> = Vec::new();
        for (expected, (d, val)) in by_dim.into_iter().enumerate() {
            if d != n - 1 + expected {
                return Err(Error::InvalidInput(format!("unexpected dimension {d}")));
            }
            let recs = val.as_array().ok_or_else(|| Error::InvalidInput("orbit list expected".into()))?;
            let mut orbits = Vec::new();
            for r in recs {
                let rep = VoronoiCell::new(n, &json_rows(field(r, "vertices")?)?)?;
                let mut orbit = make_orbit(rep)?;
                let stab = field(r, "stabilizer_order")?.as_u64();
                let sl = field(r, "sl_stabilizer_order")?.as_u64();
                if stab != Some(orbit.gl_stabilizer_order as u64) || sl != Some(orbit.stabilizer.len() as u64) {
                    return Err(Error::InvalidInput("stabilizer orders disagree with recomputation".into()));
                }
                let facets = field(r, "facets")?
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput("facet list expected".into()))?;
                for f in facets {
                    let orbit_idx = field(f, "orbit")?
                        .as_u64()
                        .ok_or_else(|| Error::InvalidInput("facet orbit index".into()))?
                        as usize;
                    let gamma = IntMatrix::from_rows(&json_rows(field(f, "gamma")?)?);
                    let sign = field(f, "sign")?.as_i64().unwrap_or(0) as i8;
                    orbit.facets.push(FacetRecord { orbit: orbit_idx, gamma, sign });
                }
                orbits.push(orbit);
            }
            if let Some(lower) = degrees.last() {
                for o in &orbits {
                    if facet_records(&o.representative, lower)? != o.facets {
                        return Err(Error::InvalidInput("facet records disagree with recomputation".into()));
                    }
                }
            }
            degrees.push(orbits);
        }
        if degrees.is_empty() {
            return Err(Error::InvalidInput("empty cell table".into()));
        }
        Ok(CellComplexTable { n, degrees })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_orbits() {
        let t = enumerate_cells(2).unwrap();
        assert_eq!(t.orbit_counts(), BTreeMap::from([(1, 1), (2, 1)]));
        let edge = &t.degrees[0][0];
        assert_eq!((edge.gl_stabilizer_order, edge.stabilizer.len()), (8, 4));
        let tri = &t.degrees[1][0];
        assert_eq!((tri.gl_stabilizer_order, tri.stabilizer.len()), (12, 6));
        assert_eq!(tri.facets.len(), 3);
    }

    #[test]
    fn n3_one_orbit_of_two_cells_and_all_simplices() {
        let t = enumerate_cells(3).unwrap();
        assert_eq!(t.degrees[0].len(), 1);
        for orbits in &t.degrees {
            for o in orbits {
                assert!(o.representative.is_simplex());
            }
        }
    }

    #[test]
    fn n4_is_gated() {
        assert!(matches!(enumerate_cells(4), Err(Error::Unsupported(_))));
    }

    #[test]
    fn json_round_trip() {
        let t = enumerate_cells(2).unwrap();
        let back = CellComplexTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
