//! Classical Manin symbols for `Gamma_0(N)`, weight 2, with Hecke operators
//! from Merel's matrices of determinant `l`. Kept independent of the Voronoi
//! pipeline so that the two can be compared.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::field::is_prime;
use crate::linalg::{char_poly, Coeff, Field, Poly, SparseFieldMatrix};

/// Symbols `(c:d)` of `P^1(Z/N)` modulo the two- and three-term relations.
#[derive(Clone, Debug)]
pub struct ManinSpace {
    pub level: u64,
    pub symbols: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
    /// Free symbols form the quotient basis.
    pub free: Vec<usize>,
    /// Each symbol as a combination of free symbols, `(position in free, coeff)`.
    projection: Vec<Vec<(usize, Coeff)>>,
}

fn canonical(level: u64, c: i64, d: i64) -> Option<(u64, u64)> {
    let n = level as i64;
    let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
    if level == 1 {
        return Some((0, 0));
    }
    if c.gcd(&d).gcd(&n) != 1 {
        return None;
    }
    // least pair in the class under scaling by units
    (1..n)
        .filter(|u| u.gcd(&n) == 1)
        .map(|u| ((c * u % n) as u64, (d * u % n) as u64))
        .min()
}

impl ManinSpace {
    pub fn new(level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        let n = level as i64;
        let mut symbols = Vec::new();
        for c in 0..n.max(1) {
            for d in 0..n.max(1) {
                if let Some(s) = canonical(level, c, d) {
                    if s == (c as u64, d as u64) {
                        symbols.push(s);
                    }
                }
            }
        }
        let index: HashMap<(u64, u64), usize> = symbols.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let f = Field::Rational;
        let look = |c: i64, d: i64| index[&canonical(level, c, d).unwrap()];
        let mut rows: Vec<[(usize, i64); 3]> = Vec::new();
        for &(c, d) in &symbols {
            let (c, d) = (c as i64, d as i64);
            // x + x S, with S = [[0,-1],[1,0]]: (c,d) S = (d,-c)
            rows.push([(look(c, d), 1), (look(d, -c), 1), (0, 0)]);
            // x + x T + x T^2, with T = [[0,-1],[1,-1]]: (c,d) T = (d, -c-d)
            let t1 = (d, -c - d);
            let t2 = (t1.1, -t1.0 - t1.1);
            rows.push([(look(c, d), 1), (look(t1.0, t1.1), 1), (look(t2.0, t2.1), 1)]);
        }
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().filter(|(_, x)| *x != 0).map(move |&(c, x)| (r, c, f.from_int(x))));
        let rel = SparseFieldMatrix::from_triplets(f, rows.len(), symbols.len(), trip.collect::<Vec<_>>())?;
        let ech = rel.echelon();
        let pivots = ech.pivot_columns();
        let free: Vec<usize> = (0..symbols.len()).filter(|c| !pivots.contains(c)).collect();
        let free_pos: HashMap<usize, usize> = free.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut projection: Vec<Vec<(usize, Coeff)>> = vec![Vec::new(); symbols.len()];
        for &c in &free {
            projection[c] = vec![(free_pos[&c], f.one())];
        }
        for (p, row) in &ech.rows {
            projection[*p] = row
                .iter()
                .filter(|(c, _)| *c != p)
                .map(|(c, x)| (free_pos[c], f.neg(x)))
                .collect();
        }
        Ok(ManinSpace { level, symbols, index, free, projection })
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Image of a symbol in quotient coordinates.
    pub fn project(&self, c: i64, d: i64) -> Vec<Coeff> {
        let mut v = vec![Coeff::zero(); self.dim()];
        if let Some(s) = canonical(self.level, c, d) {
            for (i, x) in &self.projection[self.index[&s]] {
                v[*i] += x;
            }
        }
        v
    }
}

/// Merel's set: `[[a,b],[c,d]]` with `ad - bc = l`, `a > b >= 0`, `d > c >= 0`.
pub fn heilbronn_merel(l: u64) -> Vec<[i64; 4]> {
    let l = l as i64;
    let mut out = Vec::new();
    for a in 1..=l {
        for d in 1..=l {
            let bc = a * d - l;
            if bc < 0 {
                continue;
            }
            for b in 0..a {
                if b == 0 {
                    if bc == 0 {
                        for c in 0..d {
                            out.push([a, 0, c, d]);
                        }
                    }
                    continue;
                }
                if bc % b == 0 {
                    let c = bc / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

pub fn manin_dim(level: u64) -> Result<usize> {
    Ok(ManinSpace::new(level)?.dim())
}

/// Matrix of `T_l` on the quotient basis (column `j` is the image of free
/// symbol `j`) and its characteristic polynomial.
pub fn manin_hecke(level: u64, l: u64) -> Result<(Vec<Vec<Coeff>>, Poly)> {
    if !is_prime(l) {
        return Err(Error::InvalidInput(format!("{l} is not prime")));
    }
    if level.is_multiple_of(l) {
        return Err(Error::Precondition(format!("{l} divides the level {level}")));
    }
    let space = ManinSpace::new(level)?;
    let dim = space.dim();
    let mut m = vec![vec![Coeff::zero(); dim]; dim];
    let hs = heilbronn_merel(l);
    for (j, &s) in space.free.iter().enumerate() {
        let (c, d) = (space.symbols[s].0 as i64, space.symbols[s].1 as i64);
        for h in &hs {
            let img = space.project(c * h[0] + d * h[2], c * h[1] + d * h[3]);
            for (i, x) in img.into_iter().enumerate() {
                m[i][j] += x;
            }
        }
    }
    let p = char_poly(Field::Rational, &m);
    Ok((m, p))
}
