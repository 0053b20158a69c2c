//! Hermite and Smith normal forms over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Row Hermite normal form. Returns `(h, u)` with `u * a == h`, `u` unimodular,
/// `h` in row echelon form with positive pivots and the entries above each
/// pivot reduced into `[0, pivot)`.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let pivot = (r..m)
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by_key(|&i| h.get(i, c).abs());
            let Some(p) = pivot else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, c).div_floor(h.get(r, c));
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Nonzero elementary divisors `d1 | d2 | ...`, all positive.
pub fn snf(a: &IntMatrix) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = a.row_vectors();
    let rows = a.rows();
    let cols = a.cols();
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = m[i][t].div_floor(&m[t][t]);
            for j in t..cols {
                let s = &q * &m[t][j];
                m[i][j] -= s;
            }
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            if m[t][j].is_zero() {
                continue;
            }
            let q = m[t][j].div_floor(&m[t][t]);
            for i in t..rows {
                let s = &q * &m[i][t];
                m[i][j] -= s;
            }
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // enforce divisibility of the remaining block by the pivot
        let pivot = m[t][t].clone();
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] % &pivot).is_zero()));
        if let Some(i) = offender {
            for j in t..cols {
                let s = m[i][j].clone();
                m[t][j] += s;
            }
            continue;
        }
        divisors.push(pivot.abs());
        t += 1;
    }
    divisors
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn hnf_identity_and_swap() {
        let i2 = IntMatrix::identity(2);
        assert_eq!(hnf(&i2), (i2.clone(), i2.clone()));
        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let (h, u) = hnf(&swap);
        assert_eq!(h, i2);
        assert_eq!(u, swap);
    }

    #[test]
    fn hnf_two_by_two() {
        let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(u.mul(&a), h);
        assert!(u.det().abs().is_one());
    }

    #[test]
    fn snf_examples() {
        let to = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(snf(&IntMatrix::diagonal(&[1, 2])), to(&[1, 2]));
        assert_eq!(snf(&IntMatrix::from_i64(&[&[2, 1], &[1, 2]])), to(&[1, 3]));
        assert_eq!(snf(&IntMatrix::zeros(2, 3)), to(&[]));
        assert_eq!(snf(&IntMatrix::diagonal(&[2, 3])), to(&[1, 6]));
        assert_eq!(snf(&IntMatrix::from_i64(&[&[2, 0], &[0, 4], &[0, 0]])), to(&[2, 4]));
    }
}
