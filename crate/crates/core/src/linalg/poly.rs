//! Dense univariate polynomials over a [`Field`]: characteristic polynomials and
//! roots in the base field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{Coeff, Field};

/// Coefficients, constant term first. Always trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub field: Field,
    pub coeffs: Vec<Coeff>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<Coeff>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn one(field: Field) -> Self {
        Poly::new(field, vec![field.one()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Coeff) -> Coeff {
        let f = self.field;
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = self.field;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::new(f, vec![]);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(f, out)
    }

    fn sub_scaled(&self, other: &Poly, s: &Coeff) -> Poly {
        let f = self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(Coeff::zero);
        Poly::new(f, (0..len).map(|i| f.sub(&get(self, i), &f.mul(&get(other, i), s))).collect())
    }

    /// Division by `x - r`, returning the quotient when `r` is a root.
    fn deflate(&self, r: &Coeff) -> Option<Poly> {
        let f = self.field;
        let n = self.coeffs.len();
        if n < 2 {
            return None;
        }
        let mut q = vec![f.zero(); n - 1];
        let mut carry = f.zero();
        for i in (1..n).rev() {
            carry = f.add(&self.coeffs[i], &f.mul(&carry, r));
            q[i - 1] = carry.clone();
        }
        let rem = f.add(&self.coeffs[0], &f.mul(&carry, r));
        rem.is_zero().then(|| Poly::new(f, q))
    }

    /// Roots in the base field with multiplicity, plus the cofactor without
    /// base-field roots.
    pub fn split_roots(&self) -> (Vec<(Coeff, usize)>, Poly) {
        let mut rest = self.clone();
        let mut roots = Vec::new();
        for r in self.root_candidates() {
            let mut mult = 0;
            while let Some(q) = rest.deflate(&r) {
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        (roots, rest)
    }

    fn root_candidates(&self) -> Vec<Coeff> {
        match self.field {
            Field::Prime(p) => (0..p).map(|x| self.field.from_int(x)).collect(),
            Field::Rational => {
                if self.coeffs.len() < 2 {
                    return vec![];
                }
                let lcm = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
                let ints: Vec<BigInt> =
                    self.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
                let mut cands = vec![Coeff::zero()];
                let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
                let a0 = ints[low].abs();
                let an = ints.last().unwrap().abs();
                for p in divisors(&a0) {
                    for q in divisors(&an) {
                        let r = BigRational::new(p.clone(), q);
                        cands.push(-r.clone());
                        cands.push(r);
                    }
                }
                cands.sort();
                cands.dedup();
                cands
            }
        }
    }

    /// Human readable form, e.g. `x^3 - x^2 - 4*x + 4`.
    pub fn render(&self) -> String {
        let f = self.field;
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = match f {
                Field::Rational => (c.is_negative(), c.abs().to_string()),
                Field::Prime(_) => (false, c.numer().to_string()),
            };
            let mon = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            let body = if i == 0 {
                mag
            } else if mag == "1" {
                mon
            } else {
                format!("{mag}*{mon}")
            };
            terms.push((neg, body));
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (neg, body)) in terms.into_iter().enumerate() {
            match (k, neg) {
                (0, true) => s.push_str(&format!("-{body}")),
                (0, false) => s.push_str(&body),
                (_, true) => s.push_str(&format!(" - {body}")),
                (_, false) => s.push_str(&format!(" + {body}")),
            }
        }
        s
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![];
    }
    let n = n.abs();
    if let Some(small) = n.to_u64() {
        let mut out = Vec::new();
        let mut d = 1u64;
        while d * d <= small {
            if small % d == 0 {
                out.push(BigInt::from(d));
                if d * d != small {
                    out.push(BigInt::from(small / d));
                }
            }
            d += 1;
        }
        out.sort();
        return out;
    }
    // only reachable for huge constant terms; fall back to the trivial divisors
    vec![BigInt::one(), n]
}

/// Characteristic polynomial `det(x I - A)` via reduction to Hessenberg form.
pub fn char_poly(field: Field, a: &[Vec<Coeff>]) -> Poly {
    let f = field;
    let n = a.len();
    let mut h: Vec<Vec<Coeff>> = a.iter().map(|r| r.iter().map(|x| f.reduce(x.clone())).collect()).collect();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[i][m - 1].is_zero()) else { continue };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = f.inv(&h[m][m - 1]).unwrap();
        for j in m + 1..n {
            let u = f.mul(&h[j][m - 1], &inv);
            if u.is_zero() {
                continue;
            }
            for k in 0..n {
                let s = f.mul(&u, &h[m][k]);
                h[j][k] = f.sub(&h[j][k], &s);
            }
            for k in 0..n {
                let s = f.mul(&u, &h[k][j]);
                h[k][m] = f.add(&h[k][m], &s);
            }
        }
    }
    let mut ps: Vec<Poly> = vec![Poly::one(f)];
    for m in 0..n {
        let lin = Poly::new(f, vec![f.neg(&h[m][m]), f.one()]);
        let mut p = lin.mul(&ps[m]);
        let mut t = f.one();
        for i in (0..m).rev() {
            t = f.mul(&t, &h[i + 1][i]);
            let s = f.mul(&t, &h[i][m]);
            p = p.sub_scaled(&ps[i], &s);
        }
        ps.push(p);
    }
    ps.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Coeff>> {
        rows.iter().map(|r| r.iter().map(|&x| Field::Rational.from_int(x)).collect()).collect()
    }

    #[test]
    fn char_poly_matches_direct() {
        // [[2,1],[1,2]]: x^2 - 4x + 3
        let p = char_poly(Field::Rational, &q(&[&[2, 1], &[1, 2]]));
        assert_eq!(p.render(), "x^2 - 4*x + 3");
        let (roots, rest) = p.split_roots();
        assert_eq!(rest.degree(), Some(0));
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn char_poly_with_zero_subdiagonal() {
        let a = q(&[&[3, 0, 0], &[0, -2, 1], &[0, 0, -2]]);
        let p = char_poly(Field::Rational, &a);
        let (roots, _) = p.split_roots();
        assert_eq!(roots, vec![(Field::Rational.from_int(-2), 2), (Field::Rational.from_int(3), 1)]);
    }

    #[test]
    fn irreducible_part_kept() {
        // x^2 - 2 has no rational roots
        let p = char_poly(Field::Rational, &q(&[&[0, 2], &[1, 0]]));
        let (roots, rest) = p.split_roots();
        assert!(roots.is_empty());
        assert_eq!(rest.degree(), Some(2));
        // over F_7, 3^2 = 2
        let p7 = char_poly(Field::Prime(7), &q(&[&[0, 2], &[1, 0]]));
        let (roots, _) = p7.split_roots();
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn char_poly_dense_three() {
        let a = q(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        // det(xI - A) = x^3 - 16x^2 - 12x + 3
        assert_eq!(char_poly(Field::Rational, &a).render(), "x^3 - 16*x^2 - 12*x + 3");
    }
}
