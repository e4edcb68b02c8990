use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactnum::{int_pow, Rat};

use super::{rec_sequence, Family, RecurrenceError};

/// `{ n <= M : h_n has a pole at v = 1/n }` for the `theta^2` family.
pub fn scan_two_squares(max_m: u64) -> Result<BTreeSet<u64>, RecurrenceError> {
    let seq = rec_sequence(&Family::theta_squared(), max_m)?;
    Ok((1..=max_m)
        .filter(|&n| seq.entries()[n as usize].pole_order(n) == 1)
        .collect())
}

/// `m <= M` for which `R_{2m}` of the `256 Delta` family has no pole at
/// `v = 1/(2m+2)`, i.e. the `m`-values where `tau(m+1)` would vanish.
pub fn scan_lehmer(max_m: u64) -> Result<Vec<u64>, RecurrenceError> {
    let fam = Family::delta256();
    let seq = rec_sequence(&fam, 2 * max_m)?;
    Ok((1..=max_m)
        .filter(|&m| seq.entries()[2 * m as usize].pole_order(fam.pole_index(2 * m)) == 0)
        .collect())
}

/// `{ m <= M : Q_m has a pole at v = 1/m }` for the `theta` family.
pub fn scan_squares(max_m: u64) -> Result<BTreeSet<u64>, RecurrenceError> {
    let seq = rec_sequence(&Family::theta(), max_m)?;
    Ok((1..=max_m)
        .filter(|&m| seq.entries()[m as usize].pole_order(m) > 0)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerfectRow {
    pub m: u64,
    #[serde(with = "crate::exactnum::rat_serde")]
    pub residue: Rat,
    pub is_perfect: bool,
}

/// For odd `m <= M`: the residue of `S_m` (the `theta^4` family) at `v = 1/m`,
/// and whether it equals `16^(1-m)`, which happens exactly for perfect `m`.
pub fn check_perfect_odd(max_m: u64) -> Result<Vec<PerfectRow>, RecurrenceError> {
    let seq = rec_sequence(&Family::theta_fourth(), max_m)?;
    (1..=max_m)
        .step_by(2)
        .map(|m| {
            let residue = seq.entries()[m as usize].residue(m)?;
            let target = Rat::one() / Rat::from_integer(int_pow(16, (m - 1) as u32));
            let is_perfect = !residue.is_zero() && residue == target;
            Ok(PerfectRow { m, residue, is_perfect })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};

    #[test]
    fn small_scans() {
        assert_eq!(scan_two_squares(5).unwrap(), BTreeSet::from([1, 2, 4, 5]));
        assert_eq!(scan_two_squares(1).unwrap(), BTreeSet::from([1]));
        assert!(!scan_two_squares(3).unwrap().contains(&3));
        assert_eq!(scan_squares(10).unwrap(), BTreeSet::from([1, 4, 9]));
        assert_eq!(scan_squares(3).unwrap(), BTreeSet::from([1]));
        assert_eq!(scan_lehmer(1).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn perfect_rows() {
        let rows = check_perfect_odd(9).unwrap();
        assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        // 8 sigma(1) / (1 * 16)
        assert_eq!(rows[0].residue, rat(1, 2));
        // 8 sigma(9) / (9 * 16^9), sign (-1)^10
        let expected = rat_int(8 * 13) / (rat_int(9) * Rat::from_integer(int_pow(16, 9)));
        assert_eq!(rows[4].residue, expected);
        assert!(rows.iter().all(|r| !r.is_perfect));
    }
}
