//! Named check suites. Each check is exact and reports pass/fail with a short
//! detail string; suites never stop at the first failure.

use num_traits::Zero;
use serde::Serialize;

use crate::exactnum::{rat, rat_int, rat_to_string, Poly, Rat};
use crate::qseries::{
    family_form, normalized_forms, oracle_r2, oracle_tau, qs_delta, qs_dstar, qs_t, qs_theta, qs_xy,
    three_term_residuals, QSeries, ThetaKind,
};
use crate::recurrence::{rec_sequence, resum_matrix, upoly_sequence, Family};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Golden,
    Identities,
    Resum,
    Residues,
}

/// Numerator of `R_4` for the `256 Delta` family over [`R4_DENOMINATOR`],
/// coefficients of `v^0 .. v^14`.
pub const R4_NUMERATOR: [i64; 15] = [
    0, 0, 0, 0, -16, 464, -5680, 38136, -152445, 367158, -509744, 354148, -58736, -61968, 27072,
];

/// Expanded denominator of `R_4`, coefficients of `v^0 .. v^15`. It equals
/// `-(1-2v)^9 (1-4v)^5 (1-6v)`.
pub const R4_DENOMINATOR: [i64; 16] = [
    -1, 44, -892, 11056, -93728, 575872, -2649984, 9303552, -25134336, 52272128, -83037184,
    98988032, -85753856, 50987008, -18612224, 3145728,
];

pub fn golden() -> Vec<Check> {
    let mut out = Vec::new();
    let delta = Family::delta256();
    let seq = match rec_sequence(&delta, 4) {
        Ok(s) => s,
        Err(e) => return vec![Check::new("R4", false, e.to_string())],
    };
    let r4 = &seq.entries()[4];
    out.push(Check::new(
        "R4 denominator factors",
        r4.factors() == [(2, 9), (4, 5), (6, 1)],
        format!("{:?}", r4.factors()),
    ));
    let d = Poly::from_ints(&R4_DENOMINATOR);
    let product = Poly::one().mul_edges(&[(2, 9), (4, 5), (6, 1)]);
    out.push(Check::new(
        "R4 expanded denominator",
        d == -&product,
        "D(v) = -(1-2v)^9(1-4v)^5(1-6v)",
    ));
    let num = r4.mul_poly(&d);
    out.push(Check::new(
        "R4 numerator",
        num.is_polynomial() && num.num() == &Poly::from_ints(&R4_NUMERATOR),
        format!("v^14 coefficient {}", rat_to_string(&num.num().coeff(14))),
    ));
    match seq.residue_report(4) {
        Ok(rep) => {
            let tau3 = &rep.recovered_coeff / rat_int(256);
            out.push(Check::new(
                "R4 residue at 1/6",
                rep.residue == rat(-21, 32768),
                rat_to_string(&rep.residue),
            ));
            let oracle = oracle_tau(3).map(Rat::from_integer).unwrap_or_else(|_| Rat::zero());
            out.push(Check::new(
                "tau(3) from R4",
                tau3 == rat_int(252) && tau3 == oracle,
                rat_to_string(&tau3),
            ));
        }
        Err(e) => out.push(Check::new("R4 residue at 1/6", false, e.to_string())),
    }
    match rec_sequence(&Family::theta(), 11) {
        Ok(q) => {
            let f = q.entries()[11].factors();
            out.push(Check::new("Q11 denominator", f == [(1, 21), (4, 15), (9, 5)], format!("{f:?}")));
        }
        Err(e) => out.push(Check::new("Q11 denominator", false, e.to_string())),
    }
    out
}

fn zero_check(name: &str, s: &QSeries) -> Check {
    let first = s.coeffs().iter().position(|c| !c.is_zero());
    Check::new(
        name,
        first.is_none(),
        match first {
            None => format!("exact to q^{}", s.trunc()),
            Some(n) => format!("first mismatch at q^{n}"),
        },
    )
}

/// Jacobi, the derivative identities for `x`, `y`, `t`, and `Delta` in terms of `x, y`.
pub fn identities(trunc: usize) -> Vec<Check> {
    let (x, y) = qs_xy(trunc);
    let t = qs_t(trunc);
    let theta4 = qs_theta(ThetaKind::Three, trunc).pow(4);
    let xy = x.mul(&y);
    let minus_half_xy = xy.scale(&rat(-1, 2));
    let two = rat_int(2);
    let delta_xy = xy
        .mul(&xy)
        .mul(&y.sub(&x).pow(2))
        .scale(&rat(1, 256));
    vec![
        zero_check("theta^4 = y - x", &theta4.sub(&y.sub(&x))),
        zero_check("D*x = -xy/2", &qs_dstar(&x, &two, &t).sub(&minus_half_xy)),
        zero_check("D*y = -xy/2", &qs_dstar(&y, &two, &t).sub(&minus_half_xy)),
        zero_check(
            "t' = 2t^2 - xy/32",
            &t.halfdeg().sub(&t.mul(&t).scale(&two).sub(&xy.scale(&rat(1, 32)))),
        ),
        zero_check("Delta = x^2 y^2 (y-x)^2 / 256", &qs_delta(trunc).sub(&delta_xy)),
        zero_check(
            "D*(theta^2) = 0",
            &qs_dstar(&qs_theta(ThetaKind::Three, trunc).pow(2), &rat_int(1), &t),
        ),
    ]
}

/// The three-term relation between consecutive normalized Taylor coefficients
/// of the Cohen-Kuznetsov series, for `n < max_n`.
pub fn three_term(family: &Family, max_n: u64, trunc: usize) -> Check {
    let polys = upoly_sequence(family, max_n).polys;
    let forms = normalized_forms(family, &polys, trunc);
    let residuals = three_term_residuals(family, &forms);
    let bad = residuals.iter().position(|r| !r.is_zero());
    Check::new(
        format!("three-term relation {}", family.label()),
        bad.is_none(),
        match bad {
            None => format!("n < {max_n}, exact to q^{trunc}"),
            Some(n) => format!("fails at n = {n}"),
        },
    )
}

/// `u`-side double series against Taylor coefficients of the `v`-side entries.
pub fn resummation(family: &Family, max_m: usize, max_i: usize) -> Check {
    let name = format!("resummation {}", family.label());
    let seq = match rec_sequence(family, max_m as u64) {
        Ok(s) => s,
        Err(e) => return Check::new(name, false, e.to_string()),
    };
    let matrix = resum_matrix(family, max_m, max_i);
    for (m, row) in matrix.iter().enumerate() {
        let taylor = seq.entries()[m].taylor(max_i);
        if let Some(i) = (0..=max_i).find(|&i| row[i] != taylor[i]) {
            return Check::new(name, false, format!("mismatch at u^{m} v^{i}"));
        }
    }
    Check::new(name, true, format!("m <= {max_m}, i <= {max_i}"))
}

/// Residue-recovered coefficients against the q-series coefficients of the
/// family's form, plus the lattice/divisor count for `theta^2`.
pub fn residues(family: &Family, max_m: u64) -> Vec<Check> {
    let seq = match rec_sequence(family, max_m) {
        Ok(s) => s,
        Err(e) => return vec![Check::new(format!("residues {}", family.label()), false, e.to_string())],
    };
    let trunc = family.pole_index(max_m) as usize;
    let form = family_form(family, trunc);
    let mut out = Vec::new();
    for m in 1..=max_m {
        let name = format!("{} m={m}", family.label());
        let check = match seq.residue_report(m) {
            Err(e) => Check::new(name, false, e.to_string()),
            Ok(rep) => {
                let oracle = &form.coeffs()[rep.pole as usize];
                let mut passed = &rep.recovered_coeff == oracle;
                if *family == Family::theta_squared() {
                    passed &= oracle_r2(m).map(rat_int) == Ok(oracle.clone());
                }
                Check::new(
                    name,
                    passed,
                    format!(
                        "recovered {} oracle {}",
                        rat_to_string(&rep.recovered_coeff),
                        rat_to_string(oracle)
                    ),
                )
            }
        };
        out.push(check);
    }
    out
}

/// Runs a suite with its default parameters.
pub fn run_suite(suite: Suite, trunc: usize) -> Vec<Check> {
    match suite {
        Suite::Golden => golden(),
        Suite::Identities => {
            let mut out = identities(trunc);
            let y: Family = "poly:1:[(0,1,1)]".parse().expect("valid family");
            out.push(three_term(&y, 7, trunc.min(40)));
            out.push(three_term(&Family::theta_squared(), 7, trunc.min(40)));
            out
        }
        Suite::Resum => vec![
            resummation(&Family::theta_squared(), 6, 12),
            resummation(&Family::delta256(), 6, 12),
        ],
        Suite::Residues => {
            let mut out = residues(&Family::theta_squared(), 12);
            out.extend(residues(&Family::theta_fourth(), 8));
            out.extend(residues(&Family::delta256(), 6));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pass(checks: &[Check]) {
        for c in checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn golden_suite() {
        let checks = golden();
        assert_eq!(checks.len(), 6);
        all_pass(&checks);
        assert!(checks[2].detail.contains("27072"));
    }

    #[test]
    fn identity_suite_small() {
        all_pass(&identities(24));
        let y: Family = "poly:1:[(0,1,1)]".parse().unwrap();
        all_pass(&[three_term(&y, 4, 16), three_term(&Family::theta_squared(), 4, 16)]);
    }

    #[test]
    fn three_term_catches_a_wrong_weight() {
        // Feeding theta^2 polynomials to the theta^4 relation must fail.
        let polys = upoly_sequence(&Family::theta_squared(), 3).polys;
        let forms = normalized_forms(&Family::theta_squared(), &polys, 12);
        let bad = three_term_residuals(&Family::theta_fourth(), &forms);
        assert!(bad.iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn resum_and_residue_suites() {
        all_pass(&[resummation(&Family::theta(), 4, 8)]);
        let y: Family = "poly:2:[(1,1,1),(0,2,-3)]".parse().unwrap();
        all_pass(&[resummation(&y, 4, 8)]);
        all_pass(&residues(&Family::theta_squared(), 6));
        all_pass(&residues(&y, 5));
    }
}
