//! Truncated q-expansions in `q = e^{pi i tau}` and the arithmetic functions
//! they are checked against.
//!
//! This module is the independent side of every residue check: it knows
//! nothing about the rational-function recurrences and computes Fourier
//! coefficients straight from theta series and the Euler product.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{parse_rat, rat, rat_int, rat_to_string, Poly, Rat};
use crate::recurrence::{Family, FamilyKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("series inverse needs a nonzero constant term")]
    NotInvertible,
    #[error("coefficient q^{n} requested from a series known only to q^{trunc}")]
    TruncationExceeded { n: usize, trunc: usize },
    #[error("r2({n}): lattice count {lattice} disagrees with divisor formula {divisor}")]
    OracleDisagreement { n: u64, lattice: i64, divisor: i64 },
    #[error("argument must be positive")]
    NonPositive,
}

/// `sum_{n <= trunc} c_n q^n + O(q^{trunc+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rat>,
}

impl QSeries {
    /// Pads with zeros or cuts so that exactly `trunc + 1` coefficients are kept.
    pub fn new(mut coeffs: Vec<Rat>, trunc: usize) -> Self {
        coeffs.resize(trunc + 1, Rat::zero());
        QSeries { coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        Self::new(Vec::new(), trunc)
    }

    pub fn one(trunc: usize) -> Self {
        Self::new(vec![Rat::one()], trunc)
    }

    pub fn from_ints(coeffs: &[i64], trunc: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect(), trunc)
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&Rat, QSeriesError> {
        self.coeffs
            .get(n)
            .ok_or(QSeriesError::TruncationExceeded { n, trunc: self.trunc() })
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, trunc: usize) -> QSeries {
        assert!(trunc <= self.trunc(), "cannot extend a truncated series");
        QSeries { coeffs: self.coeffs[..=trunc].to_vec() }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let n = self.trunc().min(other.trunc());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect() }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        let n = self.trunc().min(other.trunc());
        QSeries { coeffs: (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect() }
    }

    pub fn scale(&self, c: &Rat) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.trunc().min(other.trunc());
        let mut out = vec![Rat::zero(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + k] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }

    /// Binary powering with truncation at every product.
    pub fn pow(&self, mut e: u32) -> QSeries {
        let mut base = self.clone();
        let mut acc = QSeries::one(self.trunc());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse, solving for one coefficient at a time.
    pub fn inv(&self) -> Result<QSeries, QSeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(QSeriesError::NotInvertible);
        }
        let inv0 = Rat::one() / c0;
        let mut out: Vec<Rat> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let s = (1..=n).fold(Rat::zero(), |s, i| s + &self.coeffs[i] * &out[n - i]);
            out.push(-(s * &inv0));
        }
        Ok(QSeries { coeffs: out })
    }

    /// `(1/2 pi i) d/dtau`: multiplies the coefficient of `q^n` by `n/2`.
    pub fn halfdeg(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * rat(n as i64, 2))
                .collect(),
        }
    }

    /// Evaluates a polynomial at this series by Horner's rule.
    pub fn compose_poly(&self, p: &Poly) -> QSeries {
        p.coeffs().iter().rev().fold(QSeries::zero(self.trunc()), |acc, c| {
            let mut next = acc.mul(self);
            next.coeffs[0] += c;
            next
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QOp {
    Add,
    Sub,
    Mul,
}

pub fn qs_arith(op: QOp, f: &QSeries, g: &QSeries) -> QSeries {
    match op {
        QOp::Add => f.add(g),
        QOp::Sub => f.sub(g),
        QOp::Mul => f.mul(g),
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    trunc: usize,
    coeffs: Vec<String>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QSeriesRepr {
            trunc: self.trunc(),
            coeffs: self.coeffs.iter().map(rat_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = QSeriesRepr::deserialize(d)?;
        if repr.coeffs.len() != repr.trunc + 1 {
            return Err(serde::de::Error::custom("coeffs must have trunc + 1 entries"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| parse_rat(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(QSeries { coeffs })
    }
}

/// Which null theta constant to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    /// `sum_n q^{n^2}`
    Three,
    /// `sum_n (-1)^n q^{n^2}`
    Four,
}

pub fn qs_theta(kind: ThetaKind, trunc: usize) -> QSeries {
    let mut coeffs = vec![Rat::zero(); trunc + 1];
    coeffs[0] = Rat::one();
    let mut n = 1usize;
    while n * n <= trunc {
        let sign = if kind == ThetaKind::Four && n % 2 == 1 { -2 } else { 2 };
        coeffs[n * n] = rat_int(sign);
        n += 1;
    }
    QSeries { coeffs }
}

/// `sum_{n >= 0} q^{n^2 + n}`, so that the half-integer theta is `2 q^{1/4}` times it.
fn half_theta_core(trunc: usize) -> QSeries {
    let mut coeffs = vec![Rat::zero(); trunc + 1];
    let mut n = 0usize;
    while n * n + n <= trunc {
        coeffs[n * n + n] = Rat::one();
        n += 1;
    }
    QSeries { coeffs }
}

/// `y = (sum_{n in Z + 1/2} q^{n^2})^4 = 16 q (sum_{n >= 0} q^{n^2+n})^4`.
pub fn qs_y(trunc: usize) -> QSeries {
    let core = half_theta_core(trunc).pow(4).scale(&rat_int(16));
    let mut coeffs = vec![Rat::zero()];
    coeffs.extend(core.coeffs.into_iter().take(trunc));
    QSeries { coeffs }
}

/// `x = -(sum (-1)^n q^{n^2})^4`.
pub fn qs_x(trunc: usize) -> QSeries {
    qs_theta(ThetaKind::Four, trunc).pow(4).scale(&rat_int(-1))
}

pub fn qs_xy(trunc: usize) -> (QSeries, QSeries) {
    (qs_x(trunc), qs_y(trunc))
}

/// `t = (1/2 pi i) d log(theta)/d tau`.
pub fn qs_t(trunc: usize) -> QSeries {
    let theta = qs_theta(ThetaKind::Three, trunc);
    theta
        .halfdeg()
        .mul(&theta.inv().expect("theta has constant term 1"))
}

/// `D*_k f = (1/2 pi i) f' - 2 k t f` for a form of weight `k`.
pub fn qs_dstar(f: &QSeries, weight: &Rat, t: &QSeries) -> QSeries {
    f.halfdeg().sub(&t.mul(f).scale(&(rat_int(2) * weight)))
}

/// `sum_{n >= 0} c_n q^n` of the Euler product `prod_{n >= 1} (1 - q^n)`,
/// from the pentagonal-number theorem.
pub fn euler_product(trunc: usize) -> QSeries {
    let mut coeffs = vec![Rat::zero(); trunc + 1];
    coeffs[0] = Rat::one();
    for k in 1i64.. {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        if g1 > trunc {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        coeffs[g1] += rat_int(sign);
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g2 <= trunc {
            coeffs[g2] += rat_int(sign);
        }
    }
    QSeries { coeffs }
}

/// `Delta = q^2 prod (1 - q^{2n})^24` in `q = e^{pi i tau}`; the coefficient
/// of `q^{2n}` is `tau(n)`.
pub fn qs_delta(trunc: usize) -> QSeries {
    let half = trunc.saturating_sub(2) / 2;
    let e24 = euler_product(half).pow(24);
    let mut coeffs = vec![Rat::zero(); trunc + 1];
    for (i, c) in e24.coeffs.into_iter().enumerate() {
        let at = 2 * i + 2;
        if at <= trunc {
            coeffs[at] = c;
        }
    }
    QSeries { coeffs }
}

/// The modular form attached to a family, to `trunc`: `P(x, y)` for a
/// polynomial family, `theta_2^{4a} theta_4^{4b} theta_3^{4c}` for a
/// multiplicative one (using `y = theta_2^4`, `-x = theta_4^4`, `y - x = theta_3^4`).
pub fn family_form(family: &Family, trunc: usize) -> QSeries {
    match family.kind() {
        FamilyKind::Multiplicative { a, b4, c4 } => qs_y(trunc)
            .pow(*a)
            .mul(&qs_theta(ThetaKind::Four, trunc).pow(*b4))
            .mul(&qs_theta(ThetaKind::Three, trunc).pow(*c4)),
        FamilyKind::Polynomial { monomials, .. } => {
            let (x, y) = qs_xy(trunc);
            monomials.iter().fold(QSeries::zero(trunc), |acc, t| {
                acc.add(&x.pow(t.x_exp).mul(&y.pow(t.y_exp)).scale(&t.coeff))
            })
        }
    }
}

/// Fourier coefficient `c(n)` of the family's form.
pub fn cf_coeff(family: &Family, n: usize) -> Rat {
    family_form(family, n).coeffs[n].clone()
}

/// `r_2(n)` by counting lattice points and by `4 (d_1(n) - d_3(n))`; the two
/// counts must agree.
pub fn oracle_r2(n: u64) -> Result<i64, QSeriesError> {
    if n == 0 {
        return Err(QSeriesError::NonPositive);
    }
    let lattice = r2_lattice(n);
    let divisor = r2_divisor(n);
    if lattice != divisor {
        return Err(QSeriesError::OracleDisagreement { n, lattice, divisor });
    }
    Ok(lattice)
}

fn r2_lattice(n: u64) -> i64 {
    let r = n.sqrt() as i64;
    let mut count = 0;
    for a in -r..=r {
        let rest = n as i64 - a * a;
        if rest < 0 {
            continue;
        }
        let b = (rest as u64).sqrt() as i64;
        if b * b == rest {
            count += if b == 0 { 1 } else { 2 };
        }
    }
    count
}

fn r2_divisor(n: u64) -> i64 {
    let (mut d1, mut d3) = (0i64, 0i64);
    for d in divisors(n) {
        match d % 4 {
            1 => d1 += 1,
            3 => d3 += 1,
            _ => {}
        }
    }
    4 * (d1 - d3)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// Sum of divisors by trial division.
pub fn oracle_sigma(n: u64) -> Result<u64, QSeriesError> {
    if n == 0 {
        return Err(QSeriesError::NonPositive);
    }
    Ok(divisors(n).into_iter().sum())
}

/// `tau(1), ..., tau(max_n)` read off the Euler product expansion of `Delta`.
pub fn tau_table(max_n: usize) -> Vec<BigInt> {
    let delta = qs_delta(2 * max_n);
    (1..=max_n)
        .map(|n| delta.coeffs[2 * n].to_integer())
        .collect()
}

/// Ramanujan's `tau(n)`.
pub fn oracle_tau(n: u64) -> Result<BigInt, QSeriesError> {
    if n == 0 {
        return Err(QSeriesError::NonPositive);
    }
    Ok(tau_table(n as usize).pop().expect("n >= 1"))
}

/// `x^n P(u)` with `u = y/x`, as a q-series; `x` is inverted as a series.
pub fn homogenize(p: &Poly, x: &QSeries, y: &QSeries, x_power: u32) -> QSeries {
    let u = y.mul(&x.inv().expect("x has constant term -1"));
    x.pow(x_power).mul(&u.compose_poly(p))
}

/// The normalized Taylor coefficients `g_n` of the Cohen-Kuznetsov series:
/// `x^{n+k} P_{n,f}(u)` for polynomial families, `F x^n phi_n(u)` for
/// multiplicative ones. Returns `g_0, ..., g_N` to `trunc`.
pub fn normalized_forms(family: &Family, polys: &[Poly], trunc: usize) -> Vec<QSeries> {
    let (x, y) = qs_xy(trunc);
    let base = match family.kind() {
        FamilyKind::Multiplicative { .. } => family_form(family, trunc),
        FamilyKind::Polynomial { .. } => QSeries::one(trunc),
    };
    let k = family.degree().unwrap_or(0);
    polys
        .iter()
        .enumerate()
        .map(|(n, p)| base.mul(&homogenize(p, &x, &y, n as u32 + k)))
        .collect()
}

/// `(n+1)(n+w) g_{n+1} + 2 D*_{2n+w} g_n + (1/4) x y g_{n-1}` for `n = 0..len-2`,
/// each of which vanishes when the `u`-side recurrence is right.
pub fn three_term_residuals(family: &Family, forms: &[QSeries]) -> Vec<QSeries> {
    let trunc = forms.first().map_or(0, QSeries::trunc);
    let (x, y) = qs_xy(trunc);
    let xy_quarter = x.mul(&y).scale(&rat(1, 4));
    let t = qs_t(trunc);
    let w = family.weight();
    (0..forms.len().saturating_sub(1))
        .map(|n| {
            let nr = rat_int(n as u64);
            let lead = forms[n + 1].scale(&(rat_int(n as u64 + 1) * (&nr + &w)));
            let weight = rat_int(2u8) * &nr + &w;
            let mid = qs_dstar(&forms[n], &weight, &t).scale(&rat_int(2));
            let mut out = lead.add(&mid);
            if n > 0 {
                out = out.add(&xy_quarter.mul(&forms[n - 1]));
            }
            out
        })
        .collect()
}

/// Converts an integral rational to `i64`, if it is one and fits.
pub fn as_i64(r: &Rat) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
