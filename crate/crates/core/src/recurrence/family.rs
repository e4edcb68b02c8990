use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{parse_rat, rat, rat_int, rat_to_string, Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("weight w = 2(a+b+c) must be positive")]
    ZeroWeight,
    #[error("{name} = {value} is not a non-negative multiple of 1/4")]
    NotQuarterInteger { name: &'static str, value: String },
    #[error("polynomial is not homogeneous: degrees {0} and {1} both occur")]
    NotHomogeneous(u32, u32),
    #[error("polynomial must have degree k >= 1 and a nonzero coefficient")]
    Degenerate,
    #[error("cannot parse family {0:?}")]
    Parse(String),
}

/// One term `coeff * x^x_exp * y^y_exp` of a homogeneous polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub x_exp: u32,
    pub y_exp: u32,
    pub coeff: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `F = y^a (-x)^b (y - x)^c`, stored with `b` and `c` in quarters.
    Multiplicative { a: u32, b4: u32, c4: u32 },
    /// `f = P(x, y)` with `P` homogeneous of degree `k`.
    Polynomial { k: u32, monomials: Vec<Monomial> },
}

/// A recurrence family: the modular form whose Fourier coefficients the
/// residues of the family's rational functions encode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    kind: FamilyKind,
    label: String,
}

impl Family {
    /// `y^a (-x)^b (y - x)^c` with `a` integral and `b`, `c` quarter-integral.
    pub fn multiplicative(a: u32, b: &Rat, c: &Rat) -> Result<Self, FamilyError> {
        let quarters = |name: &'static str, r: &Rat| {
            let q = r * rat_int(4);
            if !q.is_integer() || q < Rat::zero() {
                return Err(FamilyError::NotQuarterInteger { name, value: rat_to_string(r) });
            }
            u32::try_from(q.to_integer()).map_err(|_| FamilyError::NotQuarterInteger {
                name,
                value: rat_to_string(r),
            })
        };
        Self::from_quarters(a, quarters("b", b)?, quarters("c", c)?)
    }

    /// Same as [`Family::multiplicative`] with `b = b4/4` and `c = c4/4`.
    pub fn from_quarters(a: u32, b4: u32, c4: u32) -> Result<Self, FamilyError> {
        if a == 0 && b4 == 0 && c4 == 0 {
            return Err(FamilyError::ZeroWeight);
        }
        let label = match (a, b4, c4) {
            (0, 0, 1) => "theta".to_string(),
            (0, 0, 2) => "theta^2".to_string(),
            (0, 0, 4) => "theta^4".to_string(),
            (2, 8, 8) => "256*Delta".to_string(),
            _ => format!("mult:{a},{b4},{c4}"),
        };
        Ok(Family { kind: FamilyKind::Multiplicative { a, b4, c4 }, label })
    }

    /// `f = P(x, y)`; like terms are merged and zero terms dropped.
    pub fn polynomial(monomials: &[Monomial]) -> Result<Self, FamilyError> {
        let mut terms: Vec<Monomial> = Vec::new();
        let mut k = None;
        for m in monomials {
            let deg = m.x_exp + m.y_exp;
            match k {
                None => k = Some(deg),
                Some(k0) if k0 != deg => return Err(FamilyError::NotHomogeneous(k0, deg)),
                _ => {}
            }
            match terms.iter_mut().find(|t| t.x_exp == m.x_exp && t.y_exp == m.y_exp) {
                Some(t) => t.coeff += &m.coeff,
                None => terms.push(m.clone()),
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        terms.sort();
        let k = match k {
            Some(k) if k >= 1 && !terms.is_empty() => k,
            _ => return Err(FamilyError::Degenerate),
        };
        let mut fam = Family {
            kind: FamilyKind::Polynomial { k, monomials: terms },
            label: String::new(),
        };
        fam.label = fam.canonical();
        Ok(fam)
    }

    /// `theta^2`: the family whose residues count representations as sums of two squares.
    pub fn theta_squared() -> Self {
        Self::from_quarters(0, 0, 2).expect("valid family")
    }

    /// `theta`: residues detect perfect squares.
    pub fn theta() -> Self {
        Self::from_quarters(0, 0, 1).expect("valid family")
    }

    /// `theta^4`: residues count representations as sums of four squares.
    pub fn theta_fourth() -> Self {
        Self::from_quarters(0, 0, 4).expect("valid family")
    }

    /// `x^2 y^2 (y - x)^2 = 256 * Delta`.
    pub fn delta256() -> Self {
        Self::from_quarters(2, 8, 8).expect("valid family")
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self.kind, FamilyKind::Multiplicative { .. })
    }

    /// Offset `a` between the sequence index and the pole index (0 for polynomial families).
    pub fn shift(&self) -> u32 {
        match self.kind {
            FamilyKind::Multiplicative { a, .. } => a,
            FamilyKind::Polynomial { .. } => 0,
        }
    }

    /// Pole parameter `m + a` attached to the `m`-th entry.
    pub fn pole_index(&self, m: u64) -> u64 {
        m + u64::from(self.shift())
    }

    /// Weight of the form: `w = 2(a+b+c)` or `2k`.
    pub fn weight(&self) -> Rat {
        match &self.kind {
            FamilyKind::Multiplicative { a, b4, c4 } => rat(4 * *a as i64 + *b4 as i64 + *c4 as i64, 2),
            FamilyKind::Polynomial { k, .. } => rat_int(2 * k),
        }
    }

    /// Coefficient in front of `u` in the linear term: `b`, or `k` for polynomial families.
    pub fn linear_param(&self) -> Rat {
        match &self.kind {
            FamilyKind::Multiplicative { b4, .. } => rat(*b4 as i64, 4),
            FamilyKind::Polynomial { k, .. } => rat_int(*k),
        }
    }

    /// Degree `k` of `P` for polynomial families.
    pub fn degree(&self) -> Option<u32> {
        match &self.kind {
            FamilyKind::Polynomial { k, .. } => Some(*k),
            FamilyKind::Multiplicative { .. } => None,
        }
    }

    /// `P(1, u)` for polynomial families, `1` for multiplicative ones.
    pub fn initial_upoly(&self) -> Poly {
        match &self.kind {
            FamilyKind::Multiplicative { .. } => Poly::one(),
            FamilyKind::Polynomial { monomials, .. } => {
                monomials.iter().fold(Poly::zero(), |p, t| {
                    &p + &Poly::monomial(t.coeff.clone(), t.y_exp as usize)
                })
            }
        }
    }

    /// Right-hand side constant of the `m`-th v-relation: `delta_{0m}` or `P_m`.
    pub fn rhs(&self, m: u64) -> Rat {
        match &self.kind {
            FamilyKind::Multiplicative { .. } => {
                if m == 0 {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }
            FamilyKind::Polynomial { .. } => self.initial_upoly().coeff(m as usize),
        }
    }

    /// Maps a residue at `v = 1/(m+a)` to the Fourier coefficient it encodes.
    pub fn recovered_coeff(&self, m: u64, residue: &Rat) -> Rat {
        let s = self.pole_index(m);
        let sign_exp = match &self.kind {
            FamilyKind::Multiplicative { .. } => s + 1,
            FamilyKind::Polynomial { k, .. } => m + u64::from(*k) + 1,
        };
        let sign = if sign_exp % 2 == 0 { Rat::one() } else { -Rat::one() };
        let scale = rat_int(s) * Rat::from_integer(crate::exactnum::int_pow(16, s as u32));
        sign * scale * residue
    }

    /// `"mult:a,4b,4c"` or `"poly:k:[(i,j,coeff),...]"` with terms sorted.
    pub fn canonical(&self) -> String {
        match &self.kind {
            FamilyKind::Multiplicative { a, b4, c4 } => format!("mult:{a},{b4},{c4}"),
            FamilyKind::Polynomial { k, monomials } => {
                let terms: Vec<String> = monomials
                    .iter()
                    .map(|t| format!("({},{},{})", t.x_exp, t.y_exp, rat_to_string(&t.coeff)))
                    .collect();
                format!("poly:{k}:[{}]", terms.join(","))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FamilyError::Parse(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("mult:") {
            let parts: Vec<u32> = rest
                .split(',')
                .enumerate()
                .map(|(i, p)| {
                    let p = p.trim();
                    // `a` may be written as `a/1`.
                    let p = if i == 0 { p.strip_suffix("/1").unwrap_or(p) } else { p };
                    p.parse::<u32>()
                })
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let [a, b4, c4] = parts[..] else { return Err(bad()) };
            return Family::from_quarters(a, b4, c4);
        }
        let rest = s.strip_prefix("poly:").ok_or_else(bad)?;
        let (k, terms) = rest.split_once(':').ok_or_else(bad)?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        let inner = terms
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let mut monomials = Vec::new();
        let mut rest = inner.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let (tuple, tail) = body.split_once(')').ok_or_else(bad)?;
            let fields: Vec<&str> = tuple.split(',').collect();
            let [i, j, c] = fields[..] else { return Err(bad()) };
            monomials.push(Monomial {
                x_exp: i.trim().parse().map_err(|_| bad())?,
                y_exp: j.trim().parse().map_err(|_| bad())?,
                coeff: parse_rat(c).map_err(|_| bad())?,
            });
            rest = tail.trim_start();
            rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
        }
        let fam = Family::polynomial(&monomials)?;
        if fam.degree() != Some(k) {
            return Err(bad());
        }
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(i: u32, j: u32, c: i64) -> Monomial {
        Monomial { x_exp: i, y_exp: j, coeff: rat_int(c) }
    }

    #[test]
    fn multiplicative_families() {
        let t2 = Family::multiplicative(0, &Rat::zero(), &rat(1, 2)).unwrap();
        assert_eq!(t2, Family::theta_squared());
        assert_eq!(t2.weight(), Rat::one());
        let d = Family::multiplicative(2, &rat_int(2), &rat_int(2)).unwrap();
        assert_eq!(d, Family::delta256());
        assert_eq!(d.weight(), rat_int(12));
        assert_eq!(
            Family::multiplicative(0, &Rat::zero(), &Rat::zero()),
            Err(FamilyError::ZeroWeight)
        );
        assert!(matches!(
            Family::multiplicative(0, &rat(1, 3), &Rat::one()),
            Err(FamilyError::NotQuarterInteger { name: "b", .. })
        ));
        assert!(Family::multiplicative(0, &rat(-1, 4), &Rat::one()).is_err());
    }

    #[test]
    fn polynomial_families() {
        let y = Family::polynomial(&[mono(0, 1, 1)]).unwrap();
        assert_eq!(y.degree(), Some(1));
        assert_eq!(y.initial_upoly(), Poly::from_ints(&[0, 1]));
        assert_eq!(y.rhs(0), Rat::zero());
        assert_eq!(y.rhs(1), Rat::one());
        let xm = Family::polynomial(&[mono(1, 0, 1), mono(0, 1, -1)]).unwrap();
        assert_eq!(xm.initial_upoly(), Poly::from_ints(&[1, -1]));
        assert_eq!(
            Family::polynomial(&[mono(1, 0, 1), mono(0, 2, 1)]),
            Err(FamilyError::NotHomogeneous(1, 2))
        );
        assert_eq!(Family::polynomial(&[mono(0, 0, 3)]), Err(FamilyError::Degenerate));
        assert_eq!(
            Family::polynomial(&[mono(1, 0, 1), mono(1, 0, -1)]),
            Err(FamilyError::Degenerate)
        );
    }

    #[test]
    fn canonical_strings_roundtrip() {
        assert_eq!(Family::delta256().canonical(), "mult:2,8,8");
        assert_eq!("mult:0,0,2".parse::<Family>().unwrap(), Family::theta_squared());
        assert_eq!("mult:2/1,8,8".parse::<Family>().unwrap(), Family::delta256());
        let p = Family::polynomial(&[
            mono(0, 1, -1),
            Monomial { x_exp: 1, y_exp: 0, coeff: rat(1, 2) },
        ])
        .unwrap();
        assert_eq!(p.canonical(), "poly:1:[(0,1,-1),(1,0,1/2)]");
        assert_eq!(p.canonical().parse::<Family>().unwrap(), p);
        assert_eq!(" poly:2:[ (1,1,3) , (0,2,-1/2) ] ".parse::<Family>().unwrap().degree(), Some(2));
        for bad in ["mult:1,2", "mult:2,8/1,8", "mult:0,0,0", "poly:2:[(0,1,1)]", "poly:1:(0,1,1)", "cusp:1", "mult:a,b,c"] {
            assert!(bad.parse::<Family>().is_err(), "{bad}");
        }
    }

    #[test]
    fn recovered_coefficient_signs() {
        // theta^2, m = 1: (+1) * 1 * 16 * 1/4 = 4
        assert_eq!(Family::theta_squared().recovered_coeff(1, &rat(1, 4)), rat_int(4));
        // 256 Delta, m = 4: (-1)^7 * 6 * 16^6 * (-21/32768) = 256 * 252
        assert_eq!(
            Family::delta256().recovered_coeff(4, &rat(-21, 32768)),
            rat_int(256 * 252)
        );
    }
}
