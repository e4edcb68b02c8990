//! Rational functions in `v` whose denominators are products of edge factors
//! `(1 - j v)^e` with distinct positive `j`.
//!
//! The denominator is never multiplied out. Keeping it factored makes pole
//! orders a map lookup and residues a handful of exact evaluations, and it
//! means reduction is only ever a root test at `v = 1/j`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{rat, rat_int, Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("invalid denominator factor (1 - {j}v)^{e}: need j >= 1 and e >= 1")]
    InvalidFactor { j: u64, e: u32 },
    #[error("denominator factor (1 - {0}v) listed twice")]
    DuplicateFactor(u64),
    #[error("pole of order {order} at v = 1/{j}; residue extraction needs a simple pole")]
    HigherOrderPole { j: u64, order: u32 },
}

/// `num(v) / prod_j (1 - j v)^{e_j}`, always reduced: no `j` in the
/// denominator is a root of `num` at `1/j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: BTreeMap<u64, u32>,
}

impl RatFunc {
    /// Builds and reduces `num / prod (1 - j v)^e`.
    pub fn new(num: Poly, factors: &[(u64, u32)]) -> Result<Self, RatFuncError> {
        let mut den = BTreeMap::new();
        for &(j, e) in factors {
            if j == 0 || e == 0 {
                return Err(RatFuncError::InvalidFactor { j, e });
            }
            if den.insert(j, e).is_some() {
                return Err(RatFuncError::DuplicateFactor(j));
            }
        }
        Ok(RatFunc { num, den }.reduced())
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFunc { num, den: BTreeMap::new() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Denominator factors `(j, e)` in increasing `j`.
    pub fn factors(&self) -> Vec<(u64, u32)> {
        self.den.iter().map(|(&j, &e)| (j, e)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// The denominator multiplied out.
    pub fn denominator_poly(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(), |p, (&j, &e)| p.mul_edge_pow(j, e))
    }

    /// Total degree of the denominator.
    pub fn denominator_degree(&self) -> u32 {
        self.den.values().sum()
    }

    fn reduced(self) -> Self {
        let factors = self.factors();
        self.reduced_at(&factors)
    }

    /// Cancels common powers of `(1 - j v)` for the listed `(j, e)` factors.
    fn reduced_at(mut self, factors: &[(u64, u32)]) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let (num, removed) = self.num.cancel_edges(factors);
        self.num = num;
        for (&(j, _), r) in factors.iter().zip(removed) {
            if r == 0 {
                continue;
            }
            let e = self.den.get_mut(&j).expect("factor present");
            *e -= r;
            if *e == 0 {
                self.den.remove(&j);
            }
        }
        self
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut den = self.den.clone();
        for (&j, &e) in &other.den {
            let slot = den.entry(j).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |f: &RatFunc| {
            let missing: Vec<(u64, u32)> = den
                .iter()
                .map(|(&j, &e)| (j, e - f.den.get(&j).copied().unwrap_or(0)))
                .filter(|&(_, e)| e > 0)
                .collect();
            f.num.mul_edges(&missing)
        };
        let num = &lift(self) + &lift(other);
        RatFunc { num, den }.reduced()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc { num: &self.num * p, den: self.den.clone() }.reduced()
    }

    /// Quotient rule in factored form: with `L = prod (1 - j v)`,
    /// `(N/D)' = (N' L - N sum_j e_j (-j) L/(1 - j v)) / (D L)`.
    pub fn diff(&self) -> RatFunc {
        if self.den.is_empty() {
            return RatFunc::from_poly(self.num.diff());
        }
        let radical = self.radical();
        let num = self.raised_derivative_numerator(&radical);
        let den = self.den.iter().map(|(&j, &e)| (j, e + 1)).collect();
        RatFunc { num, den }.reduced()
    }

    /// `prod_j (1 - j v)` over the denominator's factors.
    fn radical(&self) -> Poly {
        let ones: Vec<(u64, u32)> = self.den.keys().map(|&j| (j, 1)).collect();
        Poly::one().mul_edges(&ones)
    }

    /// `sum_j (e_j + extra) j prod_{i != j} (1 - i v)`, the numerator of the
    /// logarithmic derivative of the denominator raised by `extra` per factor.
    fn log_derivative_numerator(&self, extra: u32) -> Poly {
        let mut out = Poly::zero();
        for (&j, &e) in &self.den {
            let others: Vec<(u64, u32)> =
                self.den.keys().filter(|&&i| i != j).map(|&i| (i, 1)).collect();
            let cofactor = Poly::constant(rat_int(e + extra) * rat_int(j)).mul_edges(&others);
            out = &out + &cofactor;
        }
        out
    }

    /// Numerator of `f'` over `D L`.
    fn raised_derivative_numerator(&self, radical: &Poly) -> Poly {
        &(&self.num.diff() * radical) + &(&self.num * &self.log_derivative_numerator(0))
    }

    /// `c0 f + c1 f' + c2 f''` for polynomial coefficients, assembled over the
    /// single denominator `D L^2` and reduced once.
    pub fn second_order_op(&self, c0: &Poly, c1: &Poly, c2: &Poly) -> RatFunc {
        if self.den.is_empty() {
            let d1 = self.num.diff();
            let d2 = d1.diff();
            return RatFunc::from_poly(&(&(c0 * &self.num) + &(c1 * &d1)) + &(c2 * &d2));
        }
        let radical = self.radical();
        // f' = n1 / (D L)
        let n1 = self.raised_derivative_numerator(&radical);
        // f'' = n2 / (D L^2): differentiate n1 / (D L), whose exponents are e_j + 1
        let n2 = &(&n1.diff() * &radical) + &(&n1 * &self.log_derivative_numerator(1));
        let l2 = &radical * &radical;
        let num = &(&(&(c0 * &self.num) * &l2) + &(&(c1 * &n1) * &radical)) + &(c2 * &n2);
        let den = self.den.iter().map(|(&j, &e)| (j, e + 2)).collect();
        RatFunc { num, den }.reduced()
    }

    /// Divides by `(1 - s v)`.
    pub fn divide_edge(&self, s: u64) -> RatFunc {
        assert!(s > 0, "edge factor index must be positive");
        if self.is_zero() {
            return RatFunc::zero();
        }
        let mut out = self.clone();
        let e = out.den.entry(s).or_insert(0);
        *e += 1;
        let e = *e;
        out.reduced_at(&[(s, e)])
    }

    /// Exponent of `(1 - j v)` in the reduced denominator.
    pub fn pole_order(&self, j: u64) -> u32 {
        self.den.get(&j).copied().unwrap_or(0)
    }

    /// Residue at `v = 1/j`. Zero if there is no pole; an error for poles of
    /// order two or more.
    pub fn residue(&self, j: u64) -> Result<Rat, RatFuncError> {
        match self.pole_order(j) {
            0 => Ok(Rat::zero()),
            1 => {
                let at = rat(1, j as i64);
                let rest = self
                    .den
                    .iter()
                    .filter(|(&i, _)| i != j)
                    .fold(Rat::one(), |acc, (&i, &e)| {
                        let f = Rat::one() - rat_int(i) * &at;
                        acc * num_traits::pow(f, e as usize)
                    });
                Ok(self.num.eval(&at) / (rest * rat_int(j) * rat(-1, 1)))
            }
            order => Err(RatFuncError::HigherOrderPole { j, order }),
        }
    }

    /// Taylor coefficients of orders `0..=n` at `v = 0`.
    pub fn taylor(&self, n: usize) -> Vec<Rat> {
        let mut out: Vec<Rat> = (0..=n).map(|i| self.num.coeff(i)).collect();
        for (&j, &e) in &self.den {
            let jr = rat_int(j);
            // dividing a series by (1 - j v): a_i += j a_{i-1}
            for _ in 0..e {
                for i in 1..=n {
                    let prev = &out[i - 1] * &jr;
                    out[i] += prev;
                }
            }
        }
        out
    }

    /// Exact value at `v = r`; `None` at a pole.
    pub fn eval(&self, r: &Rat) -> Option<Rat> {
        let d = self.denominator_poly().eval(r);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(r) / d)
    }
}

impl std::fmt::Display for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (j, e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "(1 - {j}v)")?;
            } else {
                write!(f, "(1 - {j}v)^{e}")?;
            }
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: Poly,
    den: Vec<(u64, u32)>,
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncRepr { num: self.num.clone(), den: self.factors() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = RatFuncRepr::deserialize(d)?;
        RatFunc::new(repr.num, &repr.den).map_err(serde::de::Error::custom)
    }
}
