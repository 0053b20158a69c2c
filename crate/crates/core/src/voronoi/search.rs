//! Backtracking search for integral matrices carrying one configuration of
//! lines onto another.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::matrix::{normalize_line, IntMatrix, Vector};

/// Which determinants are admissible for a transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetRule {
    /// `SL(n,Z)`
    Special,
    /// `GL(n,Z)`
    General,
}

/// Sorted multiset of `|det|` over all `n`-subsets. Invariant under `GL(n,Z)`.
pub fn det_profile(lines: &[Vector], n: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut idx = Vec::with_capacity(n);
    subsets(lines.len(), n, 0, &mut idx, &mut |s| {
        let rows: Vec<Vector> = s.iter().map(|&i| lines[i].clone()).collect();
        out.push(IntMatrix::from_rows(&rows).det().abs());
    });
    out.sort();
    out
}

pub(crate) fn subsets(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..m {
        if m - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(m, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Indices of the lexicographically first independent `n`-subset.
fn basis_indices(lines: &[Vector], n: usize) -> Option<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..lines.len() {
        let mut rows: Vec<Vector> = chosen.iter().map(|&j| lines[j].clone()).collect();
        rows.push(lines[i].clone());
        if IntMatrix::from_rows(&rows).rank() == rows.len() {
            chosen.push(i);
            if chosen.len() == n {
                return Some(chosen);
            }
        }
    }
    None
}

/// Adjugate `adj` and determinant `d` with `m * adj = d I`.
fn adjugate(m: &IntMatrix) -> (IntMatrix, BigInt) {
    let n = m.rows();
    let d = m.det();
    let inv = m.inverse_rational().expect("basis is invertible");
    let mut adj = IntMatrix::zeros(n, n);
    let dq = num_rational::BigRational::from_integer(d.clone());
    for i in 0..n {
        for j in 0..n {
            adj.set(i, j, (&inv[i][j] * &dq).to_integer());
        }
    }
    (adj, d)
}

/// All integral `g` with admissible determinant such that the lines of `from`,
/// multiplied on the right by `g`, are exactly the lines of `to`, and `accept(g)`
/// holds. Stops after the first hit when `first_only`.
pub fn find_transforms(
    from: &[Vector],
    to: &[Vector],
    rule: DetRule,
    first_only: bool,
    mut accept: impl FnMut(&IntMatrix) -> bool,
) -> Vec<IntMatrix> {
    let mut found = Vec::new();
    if from.len() != to.len() || from.is_empty() {
        return found;
    }
    let n = from[0].len();
    let Some(basis) = basis_indices(from, n) else { return found };
    let target: HashSet<Vector> = to.iter().filter_map(|v| normalize_line(v)).collect();
    if target.len() != to.len() {
        return found;
    }
    let b = IntMatrix::from_rows(&basis.iter().map(|&i| from[i].clone()).collect::<Vec<_>>());
    let (adj, d) = adjugate(&b);
    let mut images: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; to.len()];
    search(
        &mut SearchState { from, to, target: &target, adj: &adj, d: &d, rule, first_only, n },
        &mut images,
        &mut used,
        &mut found,
        &mut accept,
    );
    found
}

struct SearchState<'a> {
    from: &'a [Vector],
    to: &'a [Vector],
    target: &'a HashSet<Vector>,
    adj: &'a IntMatrix,
    d: &'a BigInt,
    rule: DetRule,
    first_only: bool,
    n: usize,
}

fn search(
    st: &mut SearchState<'_>,
    images: &mut Vec<usize>,
    used: &mut [bool],
    found: &mut Vec<IntMatrix>,
    accept: &mut impl FnMut(&IntMatrix) -> bool,
) {
    if st.first_only && !found.is_empty() {
        return;
    }
    if images.len() == st.n {
        try_signs(st, images, found, accept);
        return;
    }
    for j in 0..st.to.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        images.push(j);
        search(st, images, used, found, accept);
        images.pop();
        used[j] = false;
        if st.first_only && !found.is_empty() {
            return;
        }
    }
}

fn try_signs(
    st: &mut SearchState<'_>,
    images: &[usize],
    found: &mut Vec<IntMatrix>,
    accept: &mut impl FnMut(&IntMatrix) -> bool,
) {
    let n = st.n;
    for mask in 0..(1u32 << n) {
        let rows: Vec<Vector> = images
            .iter()
            .enumerate()
            .map(|(k, &j)| {
                if mask & (1 << k) != 0 {
                    st.to[j].iter().map(|x| -x).collect()
                } else {
                    st.to[j].clone()
                }
            })
            .collect();
        let t = IntMatrix::from_rows(&rows);
        let num = st.adj.mul(&t);
        let mut g = IntMatrix::zeros(n, n);
        let mut integral = true;
        'outer: for i in 0..n {
            for k in 0..n {
                let (q, r) = num.get(i, k).div_rem(st.d);
                if !r.is_zero() {
                    integral = false;
                    break 'outer;
                }
                g.set(i, k, q);
            }
        }
        if !integral {
            continue;
        }
        let det = g.det();
        let ok_det = match st.rule {
            DetRule::Special => det.is_one(),
            DetRule::General => det.abs().is_one(),
        };
        if !ok_det {
            continue;
        }
        let maps_all = st
            .from
            .iter()
            .all(|v| normalize_line(&g.act_on_row(v)).is_some_and(|w| st.target.contains(&w)));
        if maps_all && accept(&g) {
            found.push(g);
            if st.first_only {
                return;
            }
        }
    }
}

/// Sign of the permutation sending position `i` to `perm[i]`.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i8;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vector;

    #[test]
    fn permutation_parity() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    }

    #[test]
    fn finds_shear() {
        let from = vec![vector(&[1, 0]), vector(&[0, 1])];
        let to = vec![vector(&[1, 1]), vector(&[0, 1])];
        let g = find_transforms(&from, &to, DetRule::Special, true, |_| true);
        assert_eq!(g.len(), 1);
        assert!(g[0].det().is_one());
    }

    #[test]
    fn signed_permutations_of_the_square() {
        let lines = vec![vector(&[0, 1]), vector(&[1, 0])];
        assert_eq!(find_transforms(&lines, &lines, DetRule::General, false, |_| true).len(), 8);
        assert_eq!(find_transforms(&lines, &lines, DetRule::Special, false, |_| true).len(), 4);
    }
}
