//! The recurrence families and their two sides.
//!
//! On the `u`-side each family defines polynomials `phi_n(u)` through a
//! three-term recurrence in `n`. Weighting them by `n! (w)_n` and collecting
//! powers of `u` gives rational functions `e_m(v)`, which also satisfy a
//! first-order recurrence in `m`. The `v`-side builds those directly. The
//! residue of `e_m` at `v = 1/(m+a)` is, up to an explicit factor, the
//! Fourier coefficient of the family's modular form at `m + a`.

mod family;
mod scan;
mod upoly;

pub use family::{Family, FamilyError, FamilyKind, Monomial};
pub use scan::{check_perfect_odd, scan_lehmer, scan_squares, scan_two_squares, PerfectRow};
pub use upoly::{resum_matrix, resum_weight, upoly_sequence, upoly_step, UPolySeq};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{rat, rat_int, Poly, Rat};
use crate::ratfunc::{RatFunc, RatFuncError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error("family {family}: entry {m} has a pole of order {order} at v = 1/{pole}")]
    TheoryViolation { family: String, m: u64, pole: u64, order: u32 },
    #[error("step {m}: {reason}")]
    Usage { m: u64, reason: &'static str },
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
}

/// `v * G_m(e)` where
/// `G_m(e) = (m-1-b) e - v e' + (w-1)/4 v (v e)' + 1/4 v (v (v e)')'`.
///
/// Expanded through `e'` and `e''`:
/// `v G = e [(m-1-b) v + w/4 v^2] + e' [-v^2 + (w+2)/4 v^3] + e'' [v^4 / 4]`.
fn v_times_g(family: &Family, m: u64, e: &RatFunc) -> RatFunc {
    let w = family.weight();
    let lin = rat_int(m) - rat_int(1u8) - family.linear_param();
    let quarter = rat(1, 4);
    let c0 = Poly::from_coeffs(vec![Rat::zero(), lin, &w * &quarter]);
    let c1 = Poly::from_coeffs(vec![
        Rat::zero(),
        Rat::zero(),
        rat(-1, 1),
        (&w + rat_int(2u8)) * &quarter,
    ]);
    let c2 = Poly::monomial(quarter, 4);
    e.second_order_op(&c0, &c1, &c2)
}

/// One step of the `v`-side recurrence in solved form:
/// `e_m (1 - (m+a) v) = rhs_m - v G_m(e_{m-1})`.
///
/// `prev` must be absent for `m = 0` and equal to `e_{m-1}` otherwise. For
/// `m > 0` the result must have at most a simple pole at `v = 1/(m+a)`;
/// anything worse is reported as a theory violation.
pub fn rec_step(family: &Family, m: u64, prev: Option<&RatFunc>) -> Result<RatFunc, RecurrenceError> {
    let rhs = RatFunc::constant(family.rhs(m));
    let numer = match (m, prev) {
        (0, None) => rhs,
        (0, Some(_)) => return Err(RecurrenceError::Usage { m, reason: "m = 0 takes no previous entry" }),
        (_, None) => return Err(RecurrenceError::Usage { m, reason: "m > 0 needs the previous entry" }),
        (_, Some(e)) => rhs.sub(&v_times_g(family, m, e)),
    };
    let pole = family.pole_index(m);
    let out = if pole == 0 { numer } else { numer.divide_edge(pole) };
    if m > 0 {
        let order = out.pole_order(pole);
        if order > 1 {
            return Err(RecurrenceError::TheoryViolation {
                family: family.canonical(),
                m,
                pole,
                order,
            });
        }
    }
    Ok(out)
}

/// Left side minus right side of the `m`-th relation, multiplied through by `v`
/// and evaluated with the nested derivatives written out literally:
///
/// `e_m (1 - (m+a) v) + v [(m-1-b) e - v e' + (w-1)/4 v (v e)' + 1/4 v (v (v e)')'] - rhs_m`
///
/// with `e = e_{m-1}`. Zero exactly when the pair satisfies the recurrence.
pub fn relation_residual(family: &Family, m: u64, cur: &RatFunc, prev: Option<&RatFunc>) -> RatFunc {
    let v = Poly::monomial(rat_int(1u8), 1);
    let pole = family.pole_index(m);
    let mut total = cur.mul_poly(&edge_or_one(pole));
    if let Some(e) = prev {
        let lin = rat_int(m) - rat_int(1u8) - family.linear_param();
        let ve = e.mul_poly(&v);
        let v_ve_d = ve.diff().mul_poly(&v);
        let nested = v_ve_d.diff().mul_poly(&v);
        let g = e
            .scale(&lin)
            .sub(&e.diff().mul_poly(&v))
            .add(&v_ve_d.scale(&((family.weight() - rat_int(1u8)) * rat(1, 4))))
            .add(&nested.scale(&rat(1, 4)));
        total = total.add(&g.mul_poly(&v));
    }
    total.sub(&RatFunc::constant(family.rhs(m)))
}

/// The `v`-side sequence `e_0, ..., e_M` of one family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqState {
    family: Family,
    entries: Vec<RatFunc>,
}

impl SeqState {
    pub fn new(family: Family) -> Self {
        SeqState { family, entries: Vec::new() }
    }

    /// Resumes from already computed entries `e_0, ..., e_{n-1}`, trusted as given.
    pub fn from_entries(family: Family, entries: Vec<RatFunc>) -> Self {
        SeqState { family, entries }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.entries
    }

    pub fn entry(&self, m: usize) -> Option<&RatFunc> {
        self.entries.get(m)
    }

    /// Computes entries until `e_max_m` exists.
    pub fn extend_to(&mut self, max_m: u64) -> Result<(), RecurrenceError> {
        while (self.entries.len() as u64) <= max_m {
            let m = self.entries.len() as u64;
            let next = rec_step(&self.family, m, self.entries.last())?;
            self.entries.push(next);
        }
        Ok(())
    }

    /// Like [`SeqState::extend_to`], calling `on_entry` after each new entry.
    pub fn extend_with<F>(&mut self, max_m: u64, mut on_entry: F) -> Result<(), RecurrenceError>
    where
        F: FnMut(u64, &RatFunc),
    {
        while (self.entries.len() as u64) <= max_m {
            let m = self.entries.len() as u64;
            let next = rec_step(&self.family, m, self.entries.last())?;
            on_entry(m, &next);
            self.entries.push(next);
        }
        Ok(())
    }

    pub fn residue_report(&self, m: u64) -> Result<ResidueReport, RecurrenceError> {
        let entry = self
            .entries
            .get(m as usize)
            .ok_or(RecurrenceError::Usage { m, reason: "entry not computed" })?;
        residue_report(&self.family, m, entry)
    }
}

/// Computes `e_0, ..., e_M` in order.
pub fn rec_sequence(family: &Family, max_m: u64) -> Result<SeqState, RecurrenceError> {
    let mut seq = SeqState::new(family.clone());
    seq.extend_to(max_m)?;
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub m: u64,
    pub pole: u64,
    pub pole_order: u32,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub residue: Rat,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub recovered_coeff: Rat,
}

/// Residue of `e_m` at `v = 1/(m+a)` and the Fourier coefficient it predicts.
pub fn residue_report(family: &Family, m: u64, entry: &RatFunc) -> Result<ResidueReport, RecurrenceError> {
    if m == 0 {
        return Err(RecurrenceError::Usage { m, reason: "residues are defined for m > 0" });
    }
    let pole = family.pole_index(m);
    let pole_order = entry.pole_order(pole);
    let residue = entry.residue(pole).map_err(|_| RecurrenceError::TheoryViolation {
        family: family.canonical(),
        m,
        pole,
        order: pole_order,
    })?;
    let recovered_coeff = family.recovered_coeff(m, &residue);
    Ok(ResidueReport { m, pole, pole_order, residue, recovered_coeff })
}

/// `1 - j v`, or the constant 1 when `j = 0`.
fn edge_or_one(j: u64) -> Poly {
    if j == 0 {
        Poly::one()
    } else {
        Poly::edge(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat_int;

    fn h1() -> RatFunc {
        RatFunc::new(Poly::monomial(rat(-1, 4), 2), &[(1, 1)]).unwrap()
    }

    #[test]
    fn first_steps() {
        let t2 = Family::theta_squared();
        let h0 = rec_step(&t2, 0, None).unwrap();
        assert_eq!(h0, RatFunc::one());
        assert_eq!(rec_step(&t2, 1, Some(&h0)).unwrap(), h1());
        let r0 = rec_step(&Family::delta256(), 0, None).unwrap();
        assert_eq!(r0, RatFunc::one().divide_edge(2));
    }

    #[test]
    fn step_usage_errors() {
        let t2 = Family::theta_squared();
        assert!(matches!(rec_step(&t2, 0, Some(&RatFunc::one())), Err(RecurrenceError::Usage { .. })));
        assert!(matches!(rec_step(&t2, 3, None), Err(RecurrenceError::Usage { .. })));
    }

    #[test]
    fn residual_vanishes_along_sequences() {
        let y = "poly:1:[(0,1,1)]".parse::<Family>().unwrap();
        for fam in [Family::theta_squared(), Family::theta(), Family::delta256(), y] {
            let seq = rec_sequence(&fam, 5).unwrap();
            assert!(relation_residual(&fam, 0, &seq.entries()[0], None).is_zero());
            for m in 1..=5 {
                let r = relation_residual(&fam, m as u64, &seq.entries()[m], Some(&seq.entries()[m - 1]));
                assert!(r.is_zero(), "{} m={m}: {r}", fam.label());
            }
            // and a perturbed entry is caught
            let off = seq.entries()[3].add(&RatFunc::constant(rat(1, 7)));
            assert!(!relation_residual(&fam, 3, &off, Some(&seq.entries()[2])).is_zero());
        }
    }

    #[test]
    fn denominator_support_and_simple_edge() {
        for fam in [Family::theta_squared(), Family::delta256(), Family::theta_fourth()] {
            let a = u64::from(fam.shift());
            let seq = rec_sequence(&fam, 8).unwrap();
            for (m, e) in seq.entries().iter().enumerate() {
                let m = m as u64;
                for (j, _) in e.factors() {
                    assert!(j >= a.max(1) && j <= m + a, "{} m={m} j={j}", fam.label());
                }
                if m > 0 {
                    assert!(e.pole_order(m + a) <= 1);
                }
            }
        }
    }

    #[test]
    fn constant_term_law() {
        let y = "poly:1:[(0,1,1),(1,0,2)]".parse::<Family>().unwrap();
        for fam in [Family::theta_squared(), Family::delta256(), y] {
            let seq = rec_sequence(&fam, 4).unwrap();
            for (m, e) in seq.entries().iter().enumerate() {
                assert_eq!(e.taylor(0)[0], fam.rhs(m as u64));
            }
        }
    }

    #[test]
    fn residue_reports() {
        let seq = rec_sequence(&Family::theta_squared(), 3).unwrap();
        let r1 = seq.residue_report(1).unwrap();
        assert_eq!((r1.pole_order, r1.residue.clone(), r1.recovered_coeff.clone()), (1, rat(1, 4), rat_int(4)));
        let r3 = seq.residue_report(3).unwrap();
        assert_eq!(r3.pole_order, 0);
        assert!(r3.residue.is_zero() && r3.recovered_coeff.is_zero());
        assert!(seq.residue_report(0).is_err());
        assert!(seq.residue_report(9).is_err());
    }

    #[test]
    fn sequence_is_deterministic() {
        let a = rec_sequence(&Family::theta(), 6).unwrap();
        let b = rec_sequence(&Family::theta(), 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(rec_sequence(&Family::theta(), 0).unwrap().entries().len(), 1);
    }
}
