//! Exact scalar fields: the rationals and prime fields.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient field for every complex in a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u32),
}

/// A field element. Rationals that fit in `i64` over `i64` are kept small;
/// the representation is canonical so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Small(i64, i64),
    Big(BigRational),
    Mod(u32),
}

fn small_or_big(n: i128, d: i128) -> Scalar {
    debug_assert!(d != 0);
    let (mut n, mut d) = (n, d);
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(a), Ok(b)) => Scalar::Small(a, b),
        _ => Scalar::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
    }
}

fn from_big(r: BigRational) -> Scalar {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        Scalar::Small(n, d)
    } else {
        Scalar::Big(r)
    }
}

fn to_big(s: &Scalar) -> BigRational {
    match s {
        Scalar::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
        Scalar::Big(r) => r.clone(),
        Scalar::Mod(_) => panic!("prime-field element used as a rational"),
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Field {
    /// Prime field F_p; rejects composite or out-of-range moduli.
    pub fn prime(p: u32) -> Result<Field> {
        if !(2..(1 << 31)).contains(&p) {
            return Err(Error::Precondition(format!("field modulus {p} out of range")));
        }
        let mut i = 2u32;
        while (i as u64) * (i as u64) <= p as u64 {
            if p.is_multiple_of(i) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            i += 1;
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Small(0, 1),
            Field::Prime(_) => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Small(v, 1),
            Field::Prime(p) => Scalar::Mod(v.rem_euclid(*p as i64) as u32),
        }
    }

    pub fn from_ratio(&self, n: i64, d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        match self {
            Field::Rationals => small_or_big(n as i128, d as i128),
            Field::Prime(_) => self.div(&self.from_i64(n), &self.from_i64(d)),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Mod(x), Scalar::Mod(y)) => {
                let p = self.modulus();
                Scalar::Mod(((*x as u64 + *y as u64) % p) as u32)
            }
            (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) => {
                if d1 == d2 {
                    small_or_big(*n1 as i128 + *n2 as i128, *d1 as i128)
                } else {
                    let n = (*n1 as i128) * (*d2 as i128) + (*n2 as i128) * (*d1 as i128);
                    let d = (*d1 as i128) * (*d2 as i128);
                    small_or_big(n, d)
                }
            }
            _ => from_big(to_big(a) + to_big(b)),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Mod(x) => Scalar::Mod(((self.modulus() - *x as u64) % self.modulus()) as u32),
            Scalar::Small(n, d) => small_or_big(-(*n as i128), *d as i128),
            Scalar::Big(r) => from_big(-r.clone()),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Mod(x), Scalar::Mod(y)) => {
                Scalar::Mod(((*x as u64 * *y as u64) % self.modulus()) as u32)
            }
            (Scalar::Small(n1, d1), Scalar::Small(n2, d2)) => {
                small_or_big((*n1 as i128) * (*n2 as i128), (*d1 as i128) * (*d2 as i128))
            }
            _ => from_big(to_big(a) * to_big(b)),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Scalar {
        assert!(!a.is_zero(), "division by zero");
        match a {
            Scalar::Mod(x) => {
                let p = self.modulus();
                Scalar::Mod(pow_mod(*x as u64, p - 2, p) as u32)
            }
            Scalar::Small(n, d) => small_or_big(*d as i128, *n as i128),
            Scalar::Big(r) => from_big(r.recip()),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.mul(a, &self.inv(b))
    }

    /// Sign `(-1)^n` as a field element.
    pub fn sign(&self, n: i64) -> Scalar {
        if n.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }

    fn modulus(&self) -> u64 {
        match self {
            Field::Prime(p) => *p as u64,
            Field::Rationals => unreachable!(),
        }
    }

    /// Parses an exact literal: `a`, `-a`, `a/b` (rationals) or an integer (prime field).
    pub fn parse(&self, s: &str) -> std::result::Result<Scalar, String> {
        match self {
            Field::Rationals => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n = BigInt::from_str(n).map_err(|_| format!("bad number '{s}'"))?;
                let d = BigInt::from_str(d).map_err(|_| format!("bad number '{s}'"))?;
                if d.is_zero() {
                    return Err(format!("zero denominator in '{s}'"));
                }
                Ok(from_big(BigRational::new(n, d)))
            }
            Field::Prime(p) => {
                let v = i64::from_str(s).map_err(|_| format!("bad number '{s}'"))?;
                let _ = p;
                Ok(self.from_i64(v))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Field> {
        if s == "q" {
            return Ok(Field::Rationals);
        }
        if let Some(p) = s.strip_prefix("fp:") {
            let p: u32 = p
                .parse()
                .map_err(|_| Error::Precondition(format!("bad field '{s}'")))?;
            return Field::prime(p);
        }
        Err(Error::Precondition(format!("unknown field '{s}' (expected q or fp:<p>)")))
    }
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Small(n, _) => *n == 0,
            Scalar::Big(r) => r.is_zero(),
            Scalar::Mod(x) => *x == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Small(n, d) => *n == 1 && *d == 1,
            Scalar::Big(r) => r.is_one(),
            Scalar::Mod(x) => *x == 1,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Small(n, _) => *n < 0,
            Scalar::Big(r) => r.is_negative(),
            Scalar::Mod(_) => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Small(n, 1) => write!(f, "{n}"),
            Scalar::Small(n, d) => write!(f, "{n}/{d}"),
            Scalar::Big(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic() {
        let q = Field::Rationals;
        let a = q.from_ratio(1, 3);
        let b = q.from_ratio(1, 6);
        assert_eq!(q.add(&a, &b), q.from_ratio(1, 2));
        assert_eq!(q.mul(&a, &b), q.from_ratio(1, 18));
        assert_eq!(q.inv(&q.from_ratio(-2, 3)), q.from_ratio(-3, 2));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let q = Field::Rationals;
        let big = q.from_i64(i64::MAX);
        let sq = q.mul(&big, &big);
        assert!(matches!(sq, Scalar::Big(_)));
        let back = q.div(&sq, &big);
        assert_eq!(back, big);
    }

    #[test]
    fn prime_field() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.inv(&f.from_i64(3)), f.from_i64(5));
        assert_eq!(f.neg(&f.from_i64(0)), f.zero());
        assert!(Field::prime(9).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        let q = Field::Rationals;
        for s in ["0", "-3", "5/7", "-12/5", "123456789012345678901234567890"] {
            assert_eq!(q.parse(s).unwrap().to_string(), s);
        }
        assert_eq!(q.parse("4/6").unwrap().to_string(), "2/3");
    }
}
