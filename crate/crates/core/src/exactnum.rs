//! Exact rational numbers and dense univariate polynomials over the rationals.
//!
//! [`Rat`] is an arbitrary-precision rational kept in lowest terms after every
//! operation. [`Poly`] stores coefficients densely, lowest degree first, with
//! no trailing zeros, so the zero polynomial is the empty coefficient vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number, always reduced with positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not divisible by (1 - {j}v)")]
    NotDivisible { j: u64 },
    #[error("invalid rational literal {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies one of the four field operations exactly.
pub fn rat_arith(op: RatOp, a: &Rat, b: &Rat) -> Result<Rat, ArithError> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => {
            if b.is_zero() {
                return Err(ArithError::DivisionByZero);
            }
            a / b
        }
    })
}

/// Shorthand for the rational `num/den`. Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// Parses `"p"`, `"-p"`, or `"p/q"` (surrounding whitespace allowed).
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let bad = || ArithError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        None => BigInt::from_str(t).map(Rat::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// `base^exp` for a small integer base.
pub fn int_pow(base: i64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Dense polynomial with rational coefficients; `coeffs[i]` multiplies `v^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * v^k`
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// The linear factor `1 - j v`.
    pub fn edge(j: u64) -> Self {
        Self::from_coeffs(vec![Rat::one(), -rat_int(j)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    /// Coefficient of `v^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Formal derivative.
    pub fn diff(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as u64))
                .collect(),
        )
    }

    /// Horner evaluation at `r`.
    pub fn eval(&self, r: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * r + c)
    }

    /// Whether the polynomial vanishes at `v = 1/j`, tested on the integer
    /// primitive part so no rational reductions are needed.
    pub fn vanishes_at_inverse(&self, j: u64) -> bool {
        let (_, ints) = self.primitive_parts();
        int_vanishes_at_inverse(&ints, j)
    }

    /// Multiplies by `(1 - j v)`.
    pub fn mul_edge(&self, j: u64) -> Poly {
        self.mul_edges(&[(j, 1)])
    }

    /// Multiplies by `(1 - j v)^e`.
    pub fn mul_edge_pow(&self, j: u64, e: u32) -> Poly {
        self.mul_edges(&[(j, e)])
    }

    /// Multiplies by `prod (1 - j v)^e` over the given factors.
    pub fn mul_edges(&self, factors: &[(u64, u32)]) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let (scale, mut ints) = self.primitive_parts();
        for &(j, e) in factors {
            let j = BigInt::from(j);
            for _ in 0..e {
                ints.push(BigInt::zero());
                for i in (1..ints.len()).rev() {
                    let t = &ints[i - 1] * &j;
                    ints[i] -= t;
                }
            }
        }
        Poly::from_primitive(&scale, ints)
    }

    /// Cancels as many factors `(1 - j v)` as possible, up to `max` for each
    /// `(j, max)`, returning the quotient and how many were removed per factor.
    pub fn cancel_edges(&self, factors: &[(u64, u32)]) -> (Poly, Vec<u32>) {
        if self.is_zero() {
            return (Poly::zero(), factors.iter().map(|&(_, e)| e).collect());
        }
        let (scale, mut ints) = self.primitive_parts();
        let mut removed = Vec::with_capacity(factors.len());
        let mut changed = false;
        for &(j, max) in factors {
            let mut count = 0;
            while count < max && int_vanishes_at_inverse(&ints, j) {
                int_div_edge(&mut ints, j);
                count += 1;
                changed = true;
            }
            removed.push(count);
        }
        let out = if changed { Poly::from_primitive(&scale, ints) } else { self.clone() };
        (out, removed)
    }

    fn from_primitive(scale: &Rat, ints: Vec<BigInt>) -> Poly {
        Poly::from_coeffs(ints.into_iter().map(|c| Rat::from_integer(c) * scale).collect())
    }

    /// Exact quotient by `(1 - j v)`; fails unless `p(1/j) = 0`.
    pub fn divexact_linear(&self, j: u64) -> Result<Poly, ArithError> {
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let n = self.coeffs.len();
        if n == 1 {
            return Err(ArithError::NotDivisible { j });
        }
        let jr = rat_int(j);
        // q_i = p_i + j q_{i-1}
        let mut q: Vec<Rat> = Vec::with_capacity(n - 1);
        let mut prev = Rat::zero();
        for c in &self.coeffs[..n - 1] {
            prev = c + &prev * &jr;
            q.push(prev.clone());
        }
        if !(&self.coeffs[n - 1] + &prev * &jr).is_zero() {
            return Err(ArithError::NotDivisible { j });
        }
        Ok(Poly::from_coeffs(q))
    }

    /// Writes `self = scale * ints` with `ints` a primitive integer vector.
    fn primitive_parts(&self) -> (Rat, Vec<BigInt>) {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return (Rat::zero(), ints);
        }
        if !g.is_one() {
            for c in ints.iter_mut() {
                *c /= &g;
            }
        }
        (Rat::new(g, lcm), ints)
    }

    fn mul_impl(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.coeffs.len() == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.coeffs.len() == 1 {
            return self.scale(&other.coeffs[0]);
        }
        // Convolve integer primitive parts, then restore the content once per
        // coefficient instead of reducing a fraction at every partial product.
        let (sa, a) = self.primitive_parts();
        let (sb, b) = other.primitive_parts();
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in b.iter().enumerate() {
                out[i + k] += x * y;
            }
        }
        Poly::from_primitive(&(sa * sb), out)
    }

    fn zip_with(&self, other: &Poly, f: impl Fn(&Rat, &Rat) -> Rat) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rat::zero();
        Poly::from_coeffs(
            (0..n)
                .map(|i| {
                    f(
                        self.coeffs.get(i).unwrap_or(&zero),
                        other.coeffs.get(i).unwrap_or(&zero),
                    )
                })
                .collect(),
        )
    }
}

/// `j^deg * p(1/j) == 0` for an integer coefficient vector.
fn int_vanishes_at_inverse(ints: &[BigInt], j: u64) -> bool {
    let j = BigInt::from(j);
    // sum c_i j^(deg - i)
    ints.iter().fold(BigInt::zero(), |acc, c| acc * &j + c).is_zero()
}

/// In-place exact division by `(1 - j v)` of an integer vector with a root at `1/j`.
/// The quotient stays integral because `1 - j v` is primitive.
fn int_div_edge(ints: &mut Vec<BigInt>, j: u64) {
    let j = BigInt::from(j);
    // q_i = p_i + j q_{i-1}
    for i in 1..ints.len() {
        let t = &ints[i - 1] * &j;
        ints[i] += t;
    }
    let rem = ints.pop();
    debug_assert!(rem.is_some_and(|r| r.is_zero()));
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_impl(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(op: PolyOp, p: &Poly, q: &Poly) -> Poly {
    match op {
        PolyOp::Add => p + q,
        PolyOp::Sub => p - q,
        PolyOp::Mul => p * q,
    }
}

impl fmt::Display for Poly {
    /// Human-readable form in the variable `v`, lowest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{a}*v")?,
                (_, true) => write!(f, "v^{i}")?,
                (_, false) => write!(f, "{a}*v^{i}")?,
            }
        }
        Ok(())
    }
}

/// Serde adapter for [`Rat`] as its canonical string.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.coeffs.iter().map(rat_to_string).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        let coeffs = strs
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Poly::from_coeffs(coeffs))
    }
}
