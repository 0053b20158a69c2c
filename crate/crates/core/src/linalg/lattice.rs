//! Positive definite forms and exhaustive short-vector enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{is_sign_normalized, IntMatrix, Vector};
use crate::error::{Error, Result};

/// Symmetric positive definite integer Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramForm(IntMatrix);

impl GramForm {
    pub fn new(m: IntMatrix) -> Result<Self> {
        let q = RationalForm::from_int(&m);
        q.check()?;
        Ok(GramForm(m))
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// `v G v^t`
    pub fn eval(&self, v: &[BigInt]) -> BigInt {
        let w = self.0.act_on_row(v);
        v.iter().zip(&w).map(|(a, b)| a * b).sum()
    }
}

/// Symmetric rational matrix, used internally by the perfect-form walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub entries: Vec<Vec<BigRational>>,
}

impl RationalForm {
    pub fn from_int(m: &IntMatrix) -> Self {
        RationalForm {
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn eval(&self, v: &[BigInt]) -> BigRational {
        let n = self.dim();
        let mut s = BigRational::zero();
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !v[j].is_zero() {
                    s += &self.entries[i][j] * BigRational::from_integer(&v[i] * &v[j]);
                }
            }
        }
        s
    }

    /// Symmetry and positive-definiteness check.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || self.entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("Gram matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if self.entries[i][j] != self.entries[j][i] {
                    return Err(Error::InvalidInput("Gram matrix is not symmetric".into()));
                }
            }
        }
        if self.ldl().is_none() {
            return Err(Error::InvalidInput("form is not positive definite".into()));
        }
        Ok(())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.ldl().is_some()
    }

    /// Exact decomposition `Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`.
    /// `None` unless positive definite.
    fn ldl(&self) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
        let n = self.dim();
        let mut a = self.entries.clone();
        let mut d = vec![BigRational::zero(); n];
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            if !a[i][i].is_positive() {
                return None;
            }
            d[i] = a[i][i].clone();
            for j in i + 1..n {
                mu[i][j] = &a[i][j] / &d[i];
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    let s = &mu[i][j] * &a[i][k];
                    a[j][k] -= s;
                }
            }
        }
        Some((d, mu))
    }

    /// All nonzero `v` with `Q(v) <= bound`, one per sign pair, sign-normalized
    /// and sorted lexicographically.
    pub fn short_vectors(&self, bound: &BigRational) -> Result<Vec<Vector>> {
        let (d, mu) = self
            .ldl()
            .ok_or_else(|| Error::InvalidInput("form is not positive definite".into()))?;
        let n = self.dim();
        let mut out = Vec::new();
        let mut x = vec![BigInt::zero(); n];
        enumerate(n, &d, &mu, bound.clone(), &mut x, &mut out);
        out.retain(|v| is_sign_normalized(v));
        out.sort();
        Ok(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RationalForm {
            entries: self.entries.iter().map(|r| r.iter().map(|x| x * s).collect()).collect(),
        }
    }

    pub fn add_scaled(&self, other: &RationalForm, s: &BigRational) -> Self {
        RationalForm {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y * s).collect())
                .collect(),
        }
    }
}

fn floor_sqrt_bound(t: &BigRational) -> BigInt {
    // an integer >= sqrt(t)
    let fl = t.floor().to_integer();
    if fl.is_negative() {
        return BigInt::zero();
    }
    fl.sqrt() + BigInt::one()
}

fn enumerate(
    level: usize,
    d: &[BigRational],
    mu: &[Vec<BigRational>],
    remaining: BigRational,
    x: &mut Vec<BigInt>,
    out: &mut Vec<Vector>,
) {
    if level == 0 {
        if x.iter().any(|c| !c.is_zero()) {
            out.push(x.clone());
        }
        return;
    }
    let i = level - 1;
    let n = x.len();
    let mut center = BigRational::zero();
    for j in i + 1..n {
        center -= &mu[i][j] * BigRational::from_integer(x[j].clone());
    }
    let t = &remaining / &d[i];
    let r = floor_sqrt_bound(&t);
    let lo = center.floor().to_integer() - &r;
    let hi = center.ceil().to_integer() + &r;
    let mut xi = lo;
    while xi <= hi {
        let diff = BigRational::from_integer(xi.clone()) - &center;
        let used = &d[i] * &diff * &diff;
        if used <= remaining {
            x[i] = xi.clone();
            enumerate(i, d, mu, &remaining - used, x, out);
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
}

/// Short vectors of an integer form: all `v != 0` with `v G v^t <= bound`,
/// one per `+-` pair.
pub fn short_vectors(g: &GramForm, bound: &BigInt) -> Result<Vec<Vector>> {
    RationalForm::from_int(g.matrix()).short_vectors(&BigRational::from_integer(bound.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vector;

    #[test]
    fn identity_two() {
        let g = GramForm::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let v = short_vectors(&g, &BigInt::from(1)).unwrap();
        assert_eq!(v, vec![vector(&[0, 1]), vector(&[1, 0])]);
    }

    #[test]
    fn hexagonal_form() {
        let g = GramForm::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        let v = short_vectors(&g, &BigInt::from(2)).unwrap();
        assert_eq!(v, vec![vector(&[0, 1]), vector(&[1, -1]), vector(&[1, 0])]);
    }

    #[test]
    fn identity_three_bound_two() {
        let g = GramForm::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(short_vectors(&g, &BigInt::from(2)).unwrap().len(), 9);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(GramForm::from_i64(&[&[1, 2], &[2, 1]]).is_err());
        assert!(GramForm::from_i64(&[&[1, 0], &[1, 1]]).is_err());
    }
}
