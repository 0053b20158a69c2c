//! Coefficient fields: the rationals and prime fields of odd characteristic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Field element. Over `F_p` the value is kept as an integer in `[0, p)`.
pub type Coeff = BigRational;

/// A coefficient field descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// `F_p` for an odd prime `p`. Characteristic 2 is refused outright: sharbly
    /// relations produce 2-torsion there.
    pub fn prime(p: u64) -> Result<Field, Error> {
        if p == 2 {
            return Err(Error::Precondition(
                "characteristic 2 is not supported: 2 must be invertible in the coefficients".into(),
            ));
        }
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not a prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Brings an arbitrary rational into canonical form for this field.
    /// Panics if the denominator is not invertible; use [`Field::try_reduce`] otherwise.
    pub fn reduce(&self, x: Coeff) -> Coeff {
        self.try_reduce(&x)
            .unwrap_or_else(|| panic!("{x} has no image in {self}"))
    }

    pub fn try_reduce(&self, x: &Coeff) -> Option<Coeff> {
        match self {
            Field::Rational => Some(x.clone()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let num = x.numer().mod_floor(&p);
                let den = x.denom().mod_floor(&p);
                if den.is_zero() {
                    return None;
                }
                let inv = mod_inverse(&den, &p)?;
                Some(BigRational::from_integer((num * inv).mod_floor(&p)))
            }
        }
    }

    pub fn from_int(&self, x: impl Into<BigInt>) -> Coeff {
        self.reduce(BigRational::from_integer(x.into()))
    }

    pub fn zero(&self) -> Coeff {
        Coeff::zero()
    }

    pub fn one(&self) -> Coeff {
        Coeff::one()
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &Coeff) -> Option<Coeff> {
        if a.is_zero() {
            return None;
        }
        self.try_reduce(&a.recip())
    }

    /// Decimal rendering used in reports and caches.
    pub fn render(&self, a: &Coeff) -> String {
        match self {
            Field::Rational => a.to_string(),
            Field::Prime(_) => a.numer().to_string(),
        }
    }

    /// Whether the integer `d` is a unit in this field.
    pub fn is_unit_int(&self, d: u64) -> bool {
        match self {
            Field::Rational => d != 0,
            Field::Prime(p) => !d.is_multiple_of(*p),
        }
    }

    /// Short tag used in file names: `Q` or `F7`.
    pub fn tag(&self) -> String {
        match self {
            Field::Rational => "Q".into(),
            Field::Prime(p) => format!("F{p}"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `Q` or `Fp:<p>`.
    fn from_str(s: &str) -> Result<Field, Error> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("Fp:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| Error::InvalidInput(format!("unrecognised field '{s}', expected Q or Fp:<p>")))?;
        Field::prime(p)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fields() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("Fp:7".parse::<Field>().unwrap(), Field::Prime(7));
        assert!(matches!("Fp:2".parse::<Field>(), Err(Error::Precondition(_))));
        assert!(matches!("Fp:9".parse::<Field>(), Err(Error::InvalidInput(_))));
        assert!("R".parse::<Field>().is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Prime(5);
        let a = f.from_int(3);
        let inv = f.inv(&a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
        assert_eq!(f.from_int(-1), f.from_int(4));
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.reduce(half), f.from_int(3));
        assert!(f.try_reduce(&BigRational::new(1.into(), 5.into())).is_none());
    }
}
