//! Exact scalars: rationals (characteristic zero) or residues modulo a prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("denominator {den} vanishes in characteristic {modulus}")]
    SingularDenominator { den: BigInt, modulus: u64 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("characteristic mismatch: {0} vs {1}")]
    Mismatch(Characteristic, Characteristic),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Characteristic {
    Zero,
    Prime(u64),
}

impl Characteristic {
    /// `0` means characteristic zero; anything else must be prime.
    pub fn new(c: u64) -> Result<Self, FieldError> {
        match c {
            0 => Ok(Characteristic::Zero),
            p if is_prime(p) => Ok(Characteristic::Prime(p)),
            p => Err(FieldError::NotPrime(p)),
        }
    }

    pub fn as_u64(self) -> u64 {
        match self {
            Characteristic::Zero => 0,
            Characteristic::Prime(p) => p,
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u64())
    }
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// An element of `Q` or of `F_p`.
///
/// Arithmetic operators panic when the operands live in different fields;
/// containers such as `CoefficientMatrix` reject mixed input up front.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldScalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl FieldScalar {
    pub fn zero(ch: Characteristic) -> Self {
        FieldScalar::from_i64(0, ch)
    }

    pub fn one(ch: Characteristic) -> Self {
        FieldScalar::from_i64(1, ch)
    }

    pub fn from_i64(x: i64, ch: Characteristic) -> Self {
        FieldScalar::from_integer(&BigInt::from(x), ch)
    }

    pub fn from_integer(x: &BigInt, ch: Characteristic) -> Self {
        match ch {
            Characteristic::Zero => FieldScalar::Rational(BigRational::from_integer(x.clone())),
            Characteristic::Prime(p) => FieldScalar::Modular {
                value: reduce_bigint(x, p),
                modulus: p,
            },
        }
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, ch: Characteristic) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        match ch {
            Characteristic::Zero => Ok(FieldScalar::Rational(BigRational::new(num.clone(), den.clone()))),
            Characteristic::Prime(p) => {
                let d = FieldScalar::from_integer(den, ch);
                let inv = d.inv().ok_or_else(|| FieldError::SingularDenominator {
                    den: den.clone(),
                    modulus: p,
                })?;
                Ok(&FieldScalar::from_integer(num, ch) * &inv)
            }
        }
    }

    /// Reduces an exact rational into the given characteristic.
    pub fn from_rational(q: &BigRational, ch: Characteristic) -> Result<Self, FieldError> {
        FieldScalar::from_ratio(q.numer(), q.denom(), ch)
    }

    pub fn characteristic(&self) -> Characteristic {
        match self {
            FieldScalar::Rational(_) => Characteristic::Zero,
            FieldScalar::Modular { modulus, .. } => Characteristic::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Rational(q) => q.is_zero(),
            FieldScalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Rational(q) => q.is_one(),
            FieldScalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn inv(&self) -> Option<FieldScalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldScalar::Rational(q) => FieldScalar::Rational(q.recip()),
            FieldScalar::Modular { value, modulus } => FieldScalar::Modular {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, mut e: u32) -> FieldScalar {
        let mut acc = FieldScalar::one(self.characteristic());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn same_field(&self, other: &FieldScalar) -> bool {
        self.characteristic() == other.characteristic()
    }

    fn binop(&self, rhs: &FieldScalar, q: impl Fn(&BigRational, &BigRational) -> BigRational, m: impl Fn(u64, u64, u64) -> u64) -> FieldScalar {
        match (self, rhs) {
            (FieldScalar::Rational(a), FieldScalar::Rational(b)) => FieldScalar::Rational(q(a, b)),
            (FieldScalar::Modular { value: a, modulus: p }, FieldScalar::Modular { value: b, modulus: r }) if p == r => {
                FieldScalar::Modular {
                    value: m(*a, *b, *p),
                    modulus: *p,
                }
            }
            _ => panic!(
                "arithmetic across characteristics {} and {}",
                self.characteristic(),
                rhs.characteristic()
            ),
        }
    }
}

impl Add for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        self.binop(rhs, |a, b| a + b, |a, b, p| ((a as u128 + b as u128) % p as u128) as u64)
    }
}

impl Sub for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        self.binop(rhs, |a, b| a - b, |a, b, p| ((a as u128 + p as u128 - b as u128) % p as u128) as u64)
    }
}

impl Mul for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        self.binop(rhs, |a, b| a * b, mul_mod)
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Rational(q) => FieldScalar::Rational(-q),
            FieldScalar::Modular { value, modulus } => FieldScalar::Modular {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            FieldScalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            FieldScalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses `"n"` or `"n/d"` into a scalar of the given characteristic.
pub fn parse_scalar(s: &str, ch: Characteristic) -> Result<FieldScalar, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("invalid integer '{num}'"))?;
    let den: BigInt = den.parse().map_err(|_| format!("invalid integer '{den}'"))?;
    if den.is_negative() {
        return FieldScalar::from_ratio(&-num, &-den, ch).map_err(|e| e.to_string());
    }
    FieldScalar::from_ratio(&num, &den, ch).map_err(|e| e.to_string())
}

/// Square matrix over a field: inverse by Gauss–Jordan, `None` if singular.
pub fn invert(m: &[Vec<FieldScalar>], ch: Characteristic) -> Option<Vec<Vec<FieldScalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<FieldScalar>> = m.to_vec();
    let mut inv: Vec<Vec<FieldScalar>> = (0..n)
        .map(|i| (0..n).map(|j| FieldScalar::from_i64((i == j) as i64, ch)).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let s = a[c][c].inv().expect("nonzero pivot");
        for j in 0..n {
            a[c][j] = &a[c][j] * &s;
            inv[c][j] = &inv[c][j] * &s;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[c][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[c][j]);
            }
        }
    }
    Some(inv)
}

pub fn determinant(m: &[Vec<FieldScalar>], ch: Characteristic) -> FieldScalar {
    let n = m.len();
    let mut a: Vec<Vec<FieldScalar>> = m.to_vec();
    let mut det = FieldScalar::one(ch);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return FieldScalar::zero(ch);
        };
        if p != c {
            a.swap(c, p);
            det = -&det;
        }
        det = &det * &a[c][c];
        let s = a[c][c].inv().expect("nonzero pivot");
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &s;
            for j in c..n {
                a[r][j] = &a[r][j] - &(&f * &a[c][j]);
            }
        }
    }
    det
}

/// `a * b` for matrices given as row lists.
pub fn mat_mul(a: &[Vec<FieldScalar>], b: &[Vec<FieldScalar>], ch: Characteristic) -> Vec<Vec<FieldScalar>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(FieldScalar::zero(ch), |acc, (x, brow)| &acc + &(x * &brow[j]))
                })
                .collect()
        })
        .collect()
}
