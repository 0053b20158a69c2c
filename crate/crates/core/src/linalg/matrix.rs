use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Integer row vector.
pub type Vector = Vec<BigInt>;

pub fn vector(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn is_zero_vector(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Primitive vector on the same line with first nonzero coordinate positive.
/// Returns `None` for the zero vector.
pub fn normalize_line(v: &[BigInt]) -> Option<Vector> {
    let g = content(v);
    if g.is_zero() {
        return None;
    }
    let first_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if first_negative { -g } else { g };
    Some(v.iter().map(|x| x / &g).collect())
}

pub fn is_sign_normalized(v: &[BigInt]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_positive())
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = BigInt::from(d);
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vector> = rows.iter().map(|r| vector(r)).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn act_on_row(&self, v: &[BigInt]) -> Vector {
        assert_eq!(v.len(), self.rows, "dimension mismatch");
        (0..self.cols)
            .map(|j| v.iter().enumerate().map(|(i, x)| x * self.get(i, j)).sum())
            .collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] += factor * row[source]`
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(source, j) * factor;
            self.data[target * self.cols + j] += s;
        }
    }

    pub fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.data[idx] = -&self.data[idx];
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self.row_vectors();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Exact inverse over Q, `None` when singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<BigRational>>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    self.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
                row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            let inv = a[c][c].recip();
            for x in a[c].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for j in 0..2 * n {
                        let s = &f * &a[c][j];
                        a[r][j] -= s;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// Integer inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.det().abs().is_one() {
            return None;
        }
        let inv = self.inverse_rational()?;
        let rows: Vec<Vector> =
            inv.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect();
        Some(IntMatrix::from_rows(&rows))
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][c].is_zero()) else { continue };
            a.swap(p, rank);
            for r in rank + 1..self.rows {
                if !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    for j in c..self.cols {
                        let s = &f * &a[rank][j];
                        a[r][j] -= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_inverse() {
        let m = IntMatrix::from_i64(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 2]]);
        assert_eq!(m.det(), BigInt::from(4));
        let u = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let inv = u.inverse_unimodular().unwrap();
        assert_eq!(u.mul(&inv), IntMatrix::identity(2));
        assert!(m.inverse_unimodular().is_none());
        let swap = IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(swap.det(), BigInt::from(-1));
    }

    #[test]
    fn line_normalization() {
        assert_eq!(normalize_line(&vector(&[0, -4, 6])).unwrap(), vector(&[0, 2, -3]));
        assert_eq!(normalize_line(&vector(&[3, 0])).unwrap(), vector(&[1, 0]));
        assert!(normalize_line(&vector(&[0, 0])).is_none());
    }

    #[test]
    fn rank_of_singular() {
        let m = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.det(), BigInt::zero());
    }
}
