//! Exact scalars over Q or a prime field GF(p).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::LinalgError;

/// The ground field of every module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Field {
    #[serde(rename = "Q")]
    Rationals,
    #[serde(rename = "GF")]
    Prime { p: u32 },
}

impl Field {
    /// GF(p) for a prime `2 <= p < 2^31`.
    pub fn prime(p: u32) -> Result<Self, LinalgError> {
        if !(2..(1u32 << 31)).contains(&p) || !is_prime(p) {
            return Err(LinalgError::NotPrime(p as u64));
        }
        Ok(Field::Prime { p })
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime { p } => *p,
        }
    }

    /// Field size for finite fields.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rationals => None,
            Field::Prime { p } => Some(*p as u64),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::zero()),
            Field::Prime { p } => Scalar::Residue { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime { p } => Scalar::Residue {
                value: v.rem_euclid(*p as i64) as u32,
                modulus: *p,
            },
        }
    }

    /// Residue `value mod p`, or the integer itself over Q.
    pub fn from_u64(&self, v: u64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime { p } => Scalar::Residue {
                value: (v % *p as u64) as u32,
                modulus: *p,
            },
        }
    }

    /// Maps a rational into this field. Fails over GF(p) when p divides the denominator.
    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar, LinalgError> {
        match self {
            Field::Rationals => Ok(Scalar::Rational(r.clone())),
            Field::Prime { p } => {
                let pb = BigInt::from(*p);
                let num = r.numer().mod_floor(&pb).to_u64().unwrap_or(0);
                let den = r.denom().mod_floor(&pb).to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(LinalgError::NotRepresentable(r.to_string(), *p));
                }
                let num = self.from_u64(num);
                let den = self.from_u64(den);
                Ok(&num * &den.inverse().expect("nonzero residue"))
            }
        }
    }

    /// Parses a literal: `"a"`, `"-a"`, `"a/b"` over Q; an integer over GF(p).
    pub fn parse(&self, literal: &str) -> Result<Scalar, LinalgError> {
        let bad = || LinalgError::BadLiteral(literal.to_string());
        let s = literal.trim();
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
        };
        if let Field::Prime { .. } = self {
            if !r.is_integer() {
                return Err(bad());
            }
        }
        self.from_rational(&r)
    }

    /// Whether `s` belongs to this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Rationals, Scalar::Rational(_)) => true,
            (Field::Prime { p }, Scalar::Residue { modulus, .. }) => p == modulus,
            _ => false,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime { p } => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for Field {
    type Err = LinalgError;

    /// Accepts `Q` or `GF:p` / `GF(p)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rationals);
        }
        let digits = s
            .strip_prefix("GF:")
            .or_else(|| s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| LinalgError::BadLiteral(s.to_string()))?;
        let p: u32 = digits
            .parse()
            .map_err(|_| LinalgError::BadLiteral(s.to_string()))?;
        Field::prime(p)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let p = p as u64;
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. Rationals are kept reduced with positive denominator;
/// residues are kept in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u32, modulus: u32 },
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Residue { modulus, .. } => Field::Prime { p: *modulus },
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: pow_mod(*value as u64, *modulus as u64 - 2, *modulus as u64) as u32,
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical text form: reduced `a/b` or `a` over Q, the residue over GF(p).
    pub fn to_literal(&self) -> String {
        self.to_string()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Residue { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u32> {
        match self {
            Scalar::Residue { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    /// Small integers are emitted as JSON numbers by some writers.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.is_integer() => r.numer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Residue { value, .. } => Some(*value as i64),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_negative())
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, modulus: m2 })
                if modulus == m2 =>
            {
                Scalar::Residue {
                    value: ((*a as u64 + *b as u64) % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, modulus: m2 })
                if modulus == m2 =>
            {
                let m = *modulus as u64;
                Scalar::Residue {
                    value: ((*a as u64 + m - *b as u64) % m) as u32,
                    modulus: *modulus,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, modulus }, Scalar::Residue { value: b, modulus: m2 })
                if modulus == m2 =>
            {
                Scalar::Residue {
                    value: ((*a as u64 * *b as u64) % *modulus as u64) as u32,
                    modulus: *modulus,
                }
            }
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, modulus } => Scalar::Residue {
                value: (*modulus - *value) % *modulus,
                modulus: *modulus,
            },
        }
    }
}
