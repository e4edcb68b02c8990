use crate::exactnum::{rat, rat_int, Poly, Rat};
use num_traits::One;

use super::Family;

/// Solves the three-term `u`-recurrence for `phi_{n+1}`:
///
/// `(n+1)(n+w) phi_{n+1} + (u^2-u) phi_n' - (a + (n+b) u) phi_n + u phi_{n-1} / 4 = 0`
///
/// For polynomial families `w = 2k`, `b = k` and `a = 0`. `phi_prev` is the
/// zero polynomial when `n = 0`.
pub fn upoly_step(family: &Family, n: u64, phi_n: &Poly, phi_prev: &Poly) -> Poly {
    let u2_minus_u = Poly::from_ints(&[0, -1, 1]);
    let linear = Poly::from_coeffs(vec![
        rat_int(family.shift()),
        rat_int(n) + family.linear_param(),
    ]);
    let quarter_u = Poly::monomial(rat(1, 4), 1);
    let rhs = &(&(&linear * phi_n) - &(&u2_minus_u * &phi_n.diff())) - &(&quarter_u * phi_prev);
    let lead = rat_int(n + 1) * (rat_int(n) + family.weight());
    rhs.scale(&(Rat::one() / lead))
}

/// The `u`-side polynomials `phi_0, ..., phi_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPolySeq {
    pub family: Family,
    pub polys: Vec<Poly>,
}

pub fn upoly_sequence(family: &Family, max_n: u64) -> UPolySeq {
    let mut polys = vec![family.initial_upoly()];
    let mut prev = Poly::zero();
    for n in 0..max_n {
        let next = upoly_step(family, n, &polys[n as usize], &prev);
        prev = polys[n as usize].clone();
        polys.push(next);
    }
    UPolySeq { family: family.clone(), polys }
}

/// `n! * Gamma(n+w)/Gamma(w) = prod_{t<n} (t+1)(t+w)`, exact for rational `w`.
pub fn resum_weight(family: &Family, n: u64) -> Rat {
    let w = family.weight();
    (0..n).fold(Rat::one(), |acc, t| acc * rat_int(t + 1) * (rat_int(t) + &w))
}

/// Coefficients of `u^m v^i` in `sum_n weight(n) phi_n(u) v^n`, for `m <= M`, `i <= N`.
pub fn resum_matrix(family: &Family, max_m: usize, max_i: usize) -> Vec<Vec<Rat>> {
    let seq = upoly_sequence(family, max_i as u64);
    let weights: Vec<Rat> = (0..=max_i as u64).map(|i| resum_weight(family, i)).collect();
    (0..=max_m)
        .map(|m| {
            (0..=max_i)
                .map(|i| &weights[i] * seq.polys[i].coeff(m))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn theta_squared_steps() {
        let t2 = Family::theta_squared();
        let p1 = upoly_step(&t2, 0, &Poly::one(), &Poly::zero());
        assert!(p1.is_zero());
        let p2 = upoly_step(&t2, 1, &p1, &Poly::one());
        assert_eq!(p2, Poly::monomial(rat(-1, 16), 1));
    }

    #[test]
    fn polynomial_family_step() {
        let y: Family = "poly:1:[(0,1,1)]".parse().unwrap();
        let p1 = upoly_step(&y, 0, &Poly::from_ints(&[0, 1]), &Poly::zero());
        assert_eq!(p1, Poly::monomial(rat(1, 2), 1));
    }

    /// The classical recurrence for theta^2 with the constant `(n+1)^2`.
    fn classical(max_n: usize) -> Vec<Poly> {
        let mut p = vec![Poly::one()];
        let mut prev = Poly::zero();
        for n in 0..max_n {
            let cur = p[n].clone();
            let rhs = &(&(&Poly::from_coeffs(vec![Rat::zero(), rat_int(n as u64)]) * &cur)
                - &(&Poly::from_ints(&[0, -1, 1]) * &cur.diff()))
                - &prev.scale(&rat(1, 4)).shift(1);
            p.push(rhs.scale(&(Rat::one() / rat_int((n as u64 + 1).pow(2)))));
            prev = cur;
        }
        p
    }

    #[test]
    fn theta_squared_matches_classical_form() {
        let seq = upoly_sequence(&Family::theta_squared(), 10);
        assert_eq!(seq.polys, classical(10));
        for n in 0..=10u64 {
            let fact: Rat = (1..=n).fold(Rat::one(), |a, t| a * rat_int(t));
            assert_eq!(resum_weight(&Family::theta_squared(), n), &fact * &fact);
        }
    }

    #[test]
    fn degree_bound() {
        for fam in [Family::theta(), Family::delta256(), "poly:2:[(1,1,1),(0,2,3)]".parse().unwrap()] {
            let seq = upoly_sequence(&fam, 12);
            let d0 = seq.polys[0].degree().unwrap_or(0);
            for (n, p) in seq.polys.iter().enumerate() {
                assert!(p.degree().is_none_or(|d| d <= n + d0));
            }
        }
    }

    #[test]
    fn weights() {
        // w = 1/2: prod (t+1)(t+1/2) for t < 2 = 1 * 1/2 * 2 * 3/2
        assert_eq!(resum_weight(&Family::theta(), 2), rat(3, 2));
        // polynomial, k = 1: n! (n+1)!
        let y: Family = "poly:1:[(0,1,1)]".parse().unwrap();
        assert_eq!(resum_weight(&y, 3), rat_int(6 * 24));
    }

    #[test]
    fn first_column() {
        let m = resum_matrix(&Family::delta256(), 4, 3);
        assert_eq!(m[0][0], Rat::one());
        assert!((1..=4).all(|i| m[i][0].is_zero()));
        let y: Family = "poly:2:[(2,0,5),(1,1,-1),(0,2,3)]".parse().unwrap();
        let m = resum_matrix(&y, 3, 2);
        let col: Vec<Rat> = m.iter().map(|r| r[0].clone()).collect();
        assert_eq!(col, vec![rat_int(5), rat_int(-1), rat_int(3), Rat::zero()]);
        // theta^2 entry (1, 2) = -1/4
        assert_eq!(resum_matrix(&Family::theta_squared(), 1, 2)[1][2], rat(-1, 4));
    }
}
