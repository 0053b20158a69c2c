//! `Gamma_0(N)`, the coset space `P^{n-1}(Z/N)`, and the splitting of cell
//! orbits into `Gamma_0(N)`-orbits.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::hnf;
use crate::linalg::matrix::{content, IntMatrix, Vector};
use crate::voronoi::CellOrbit;

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn inverse_mod(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(n as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i128) as u64)
}

/// A point of `P^{n-1}(Z/N)` in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    level: u64,
    coords: Vec<u64>,
}

impl ProjPoint {
    /// Reduces mod `N` and normalizes. Rejects rows that do not generate the
    /// unit ideal.
    pub fn new(level: u64, coords: &[BigInt]) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        let m = BigInt::from(level);
        let raw: Vec<u64> = coords.iter().map(|c| c.mod_floor(&m).to_u64().unwrap()).collect();
        Self::from_residues(level, raw)
    }

    pub(crate) fn from_residues(level: u64, mut raw: Vec<u64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidInput("empty projective point".into()));
        }
        for x in raw.iter_mut() {
            *x %= level;
        }
        if raw.iter().fold(level, |g, &x| gcd_u64(g, x)) != 1 {
            return Err(Error::InvalidInput(format!("{raw:?} is not unimodular mod {level}")));
        }
        Ok(ProjPoint { level, coords: normalize(level, &raw) })
    }

    /// The point of `e_1`.
    pub fn e1(n: usize, level: u64) -> Self {
        let mut raw = vec![0; n];
        raw[0] = 1;
        Self::from_residues(level, raw).expect("unimodular")
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub(crate) fn act_unchecked(&self, g: &IntMatrix) -> ProjPoint {
        let n = self.n();
        let m = BigInt::from(self.level);
        let raw: Vec<u64> = (0..n)
            .map(|j| {
                let s: BigInt = (0..n).map(|i| BigInt::from(self.coords[i]) * g.get(i, j)).sum();
                s.mod_floor(&m).to_u64().unwrap()
            })
            .collect();
        ProjPoint { level: self.level, coords: normalize(self.level, &raw) }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

fn normalize(level: u64, raw: &[u64]) -> Vec<u64> {
    if level == 1 {
        return vec![0; raw.len()];
    }
    if let Some(u) = raw.iter().find(|&&x| gcd_u64(x, level) == 1) {
        let inv = inverse_mod(*u, level).unwrap();
        return raw.iter().map(|&x| (x as u128 * inv as u128 % level as u128) as u64).collect();
    }
    // no unit coordinate: least representative over the unit group
    (1..level)
        .filter(|&u| gcd_u64(u, level) == 1)
        .map(|u| raw.iter().map(|&x| (x as u128 * u as u128 % level as u128) as u64).collect::<Vec<_>>())
        .min()
        .unwrap()
}

/// Right action `pt -> pt g` for `g` in `SL(n,Z)`.
pub fn act(pt: &ProjPoint, g: &IntMatrix) -> Result<ProjPoint> {
    if !g.is_square() || g.rows() != pt.n() || !g.det().is_one() {
        return Err(Error::InvalidInput(format!("{g} is not in SL({},Z)", pt.n())));
    }
    Ok(pt.act_unchecked(g))
}

/// All of `P^{n-1}(Z/N)`, sorted.
pub fn proj_points(n: usize, level: u64) -> Result<Vec<ProjPoint>> {
    if level == 0 || n == 0 {
        return Err(Error::InvalidInput("need n >= 1 and N >= 1".into()));
    }
    let mut out = Vec::new();
    let mut raw = vec![0u64; n];
    loop {
        if raw.iter().fold(level, |g, &x| gcd_u64(g, x)) == 1 && normalize(level, &raw) == raw {
            out.push(ProjPoint { level, coords: raw.clone() });
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            raw[i] += 1;
            if raw[i] < level {
                break;
            }
            raw[i] = 0;
        }
    }
}

/// `Gamma_0(N)`: first row congruent to `(*, 0, ..., 0)` mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gamma0 {
    pub n: usize,
    pub level: u64,
}

impl Gamma0 {
    pub fn new(n: usize, level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        Ok(Gamma0 { n, level })
    }

    pub fn contains(&self, g: &IntMatrix) -> bool {
        let m = BigInt::from(self.level);
        g.rows() == self.n
            && g.cols() == self.n
            && g.det().is_one()
            && (1..self.n).all(|j| (g.get(0, j) % &m).is_zero())
    }
}

/// An `SL(n,Z)` matrix with first row `v`, for primitive `v`.
pub fn complete_to_sl(v: &[BigInt]) -> Result<IntMatrix> {
    let n = v.len();
    if !content(v).is_one() {
        return Err(Error::InvalidInput(format!("{v:?} is not primitive")));
    }
    let col = IntMatrix::from_rows(&v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>());
    let (_, u) = hnf(&col);
    let mut a = u.inverse_unimodular().expect("unimodular").transpose();
    if n >= 2 && !a.det().is_one() {
        a.negate_row(1);
    }
    debug_assert_eq!(a.row(0), v);
    Ok(a)
}

/// A primitive integer vector congruent to `pt`'s coordinates mod `N`.
pub fn lift_point(pt: &ProjPoint) -> Vector {
    let n = pt.n();
    let level = BigInt::from(pt.level);
    let mut v: Vector = pt.coords.iter().map(|&c| BigInt::from(c)).collect();
    if n == 1 {
        return vec![BigInt::one()];
    }
    let head = |v: &Vector| v[..n - 1].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if head(&v).is_zero() {
        v[0] += &level;
    }
    let g = head(&v);
    while !v[n - 1].gcd(&g).is_one() {
        v[n - 1] += &level;
    }
    v
}

/// An `SL(n,Z)` matrix whose first row reduces to `pt`.
pub fn lift_to_sl(pt: &ProjPoint) -> IntMatrix {
    complete_to_sl(&lift_point(pt)).expect("lift is primitive")
}

/// One `Gamma_0(N)`-orbit of cells within an `SL(n,Z)`-orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitOrbit {
    pub point: ProjPoint,
    /// Indices into the cell orbit's stabilizer of the elements fixing `point`.
    pub effective_stabilizer: Vec<usize>,
    pub orientation_ok: bool,
    pub size: usize,
}

/// Split orbits plus, for every point, its orbit and the orientation sign
/// relating it to the orbit's canonical point.
#[derive(Clone, Debug)]
pub struct OrbitSplitting {
    pub orbits: Vec<SplitOrbit>,
    lookup: HashMap<ProjPoint, (usize, i8)>,
}

impl OrbitSplitting {
    /// `(split orbit, sign)` with `q = act(canonical, h)` and `sign = chi(h)`.
    pub fn classify(&self, q: &ProjPoint) -> (usize, i8) {
        self.lookup[q]
    }
}

/// Orbits of the cell stabilizer on `P^{n-1}(Z/N)`.
pub fn split_orbits(orbit: &CellOrbit, level: u64) -> Result<OrbitSplitting> {
    let n = orbit.representative.n();
    let points = proj_points(n, level)?;
    let mut lookup: HashMap<ProjPoint, (usize, i8)> = HashMap::new();
    let mut orbits = Vec::new();
    for c in &points {
        if lookup.contains_key(c) {
            continue;
        }
        let idx = orbits.len();
        let mut effective = Vec::new();
        let mut ok = true;
        let mut size = 0;
        for (hi, h) in orbit.stabilizer.iter().enumerate() {
            let q = c.act_unchecked(&h.matrix);
            if &q == c {
                effective.push(hi);
                if h.character < 0 {
                    ok = false;
                }
            }
            lookup.entry(q).or_insert_with(|| {
                size += 1;
                (idx, h.character)
            });
        }
        orbits.push(SplitOrbit { point: c.clone(), effective_stabilizer: effective, orientation_ok: ok, size });
    }
    Ok(OrbitSplitting { orbits, lookup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vector;
    use crate::voronoi::enumerate_cells;

    #[test]
    fn point_counts() {
        assert_eq!(proj_points(2, 1).unwrap().len(), 1);
        assert_eq!(proj_points(2, 11).unwrap().len(), 12);
        assert_eq!(proj_points(3, 2).unwrap().len(), 7);
        assert_eq!(proj_points(2, 6).unwrap().len(), 12);
    }

    #[test]
    fn rotation_moves_e1() {
        let p = ProjPoint::e1(2, 11);
        let g = IntMatrix::from_i64(&[&[0, 1], &[-1, 0]]);
        assert_eq!(act(&p, &g).unwrap().coords(), &[0, 1]);
        assert!(act(&p, &IntMatrix::diagonal(&[2, 1])).is_err());
    }

    #[test]
    fn lifts_are_in_sl() {
        for n in 2..=3 {
            for level in [1, 2, 6, 7] {
                for p in proj_points(n, level).unwrap() {
                    let a = lift_to_sl(&p);
                    assert!(a.det().is_one());
                    assert_eq!(ProjPoint::new(level, a.row(0)).unwrap(), p);
                }
            }
        }
        assert!(complete_to_sl(&vector(&[2, 4])).is_err());
    }

    #[test]
    fn level_eleven_splitting() {
        let t = enumerate_cells(2).unwrap();
        let edges = split_orbits(&t.degrees[0][0], 11).unwrap();
        assert_eq!(edges.orbits.len(), 6);
        assert!(edges.orbits.iter().all(|o| o.orientation_ok));
        let tri = split_orbits(&t.degrees[1][0], 11).unwrap();
        assert_eq!(tri.orbits.len(), 4);
        let one = split_orbits(&t.degrees[0][0], 1).unwrap();
        assert_eq!(one.orbits.len(), 1);
        assert!(!one.orbits[0].orientation_ok);
    }

    #[test]
    fn gamma0_membership() {
        let g = Gamma0::new(2, 5).unwrap();
        assert!(g.contains(&IntMatrix::from_i64(&[&[1, 5], &[0, 1]])));
        assert!(!g.contains(&IntMatrix::from_i64(&[&[1, 1], &[0, 1]])));
    }
}
