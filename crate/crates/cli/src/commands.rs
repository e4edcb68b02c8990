use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::ValueEnum;
use modres::exactnum::{rat_int, rat_to_string, Rat};
use modres::qseries::{
    family_form, oracle_r2, oracle_sigma, qs_delta, qs_t, qs_theta, qs_x, qs_y, tau_table, QSeries, ThetaKind,
};
use modres::recurrence::{check_perfect_odd, rec_sequence, scan_lehmer, scan_squares, scan_two_squares, RecurrenceError};
use modres::verify::{run_suite, Check, Suite};
use modres::{Family, SeqState};
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cache::{Cache, CacheError};
use crate::render::{Format, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Theory(#[from] RecurrenceError),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error(transparent)]
    Cache(CacheError),
}

impl From<CacheError> for CliError {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Recurrence(r) => CliError::Theory(r),
            io => CliError::Cache(io),
        }
    }
}

impl CliError {
    /// 1 for a theory or oracle mismatch, 2 for usage, configuration and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Theory(RecurrenceError::TheoryViolation { .. }) | CliError::Oracle(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Family,
    pub m_max: u64,
    pub truncation: usize,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub normalize_delta: bool,
}

impl RunConfig {
    /// Validates the flags. `truncation` defaults to the largest pole index,
    /// `m_max + a`, which is also its lower bound.
    pub fn new(
        family: Family,
        m_max: u64,
        truncation: Option<usize>,
        format: Format,
        cache_dir: Option<PathBuf>,
        normalize_delta: bool,
    ) -> Result<Self, CliError> {
        let needed = family.pole_index(m_max) as usize;
        let truncation = truncation.unwrap_or(needed);
        if truncation < needed {
            return Err(CliError::Usage(format!(
                "--trunc {truncation} is below m_max + a = {needed}; the oracle would not cover every row"
            )));
        }
        if normalize_delta && family != Family::delta256() {
            return Err(CliError::Usage(format!(
                "--normalize-delta applies only to {}, not {}",
                Family::delta256(),
                family
            )));
        }
        Ok(RunConfig { family, m_max, truncation, format, cache_dir, normalize_delta })
    }

    fn sequence(&self) -> Result<SeqState, CliError> {
        match &self.cache_dir {
            Some(dir) => Ok(Cache::new(dir).sequence(&self.family, self.m_max)?),
            None => Ok(rec_sequence(&self.family, self.m_max)?),
        }
    }
}

pub fn cmd_compute(config: &RunConfig) -> Result<Report, CliError> {
    let seq = config.sequence()?;
    let entries = seq.entries();
    Ok(Report {
        json: json!({
            "family": config.family.canonical(),
            "m_max": config.m_max,
            "entries": serde_json::to_value(entries).expect("entries serialize"),
        }),
        header: vec!["m", "entry"],
        rows: entries.iter().enumerate().map(|(m, e)| vec![m.to_string(), e.to_string()]).collect(),
        passed: true,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueRow {
    pub m: u64,
    pub pole: u64,
    pub order: u32,
    #[serde(with = "modres::exactnum::rat_serde")]
    pub residue: Rat,
    #[serde(with = "modres::exactnum::rat_serde")]
    pub recovered: Rat,
    #[serde(with = "modres::exactnum::rat_serde")]
    pub oracle: Rat,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn residue_rows(config: &RunConfig) -> Result<Vec<ResidueRow>, CliError> {
    let seq = config.sequence()?;
    let form = family_form(&config.family, config.truncation);
    let norm = if config.normalize_delta { rat_int(256) } else { rat_int(1) };
    (1..=config.m_max)
        .map(|m| {
            let rep = seq.residue_report(m)?;
            let recovered = &rep.recovered_coeff / &norm;
            let oracle = &form.coeffs()[rep.pole as usize] / &norm;
            Ok(ResidueRow {
                m,
                pole: rep.pole,
                order: rep.pole_order,
                residue: rep.residue,
                matches: recovered == oracle,
                recovered,
                oracle,
            })
        })
        .collect()
}

pub fn cmd_residues(config: &RunConfig) -> Result<Report, CliError> {
    let rows = residue_rows(config)?;
    let passed = rows.iter().all(|r| r.matches);
    Ok(Report {
        json: json!({
            "family": config.family.canonical(),
            "normalized": config.normalize_delta,
            "trunc": config.truncation,
            "rows": serde_json::to_value(&rows).expect("rows serialize"),
            "all_match": passed,
        }),
        header: vec!["m", "pole", "order", "residue", "recovered", "oracle", "match"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.m.to_string(),
                    r.pole.to_string(),
                    r.order.to_string(),
                    rat_to_string(&r.residue),
                    rat_to_string(&r.recovered),
                    rat_to_string(&r.oracle),
                    r.matches.to_string(),
                ]
            })
            .collect(),
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    TwoSquares,
    Squares,
    Lehmer,
    PerfectOdd,
}

impl ScanKind {
    fn name(self) -> &'static str {
        match self {
            ScanKind::TwoSquares => "two-squares",
            ScanKind::Squares => "squares",
            ScanKind::Lehmer => "lehmer",
            ScanKind::PerfectOdd => "perfect-odd",
        }
    }
}

/// Runs a scan and cross-checks it against elementary arithmetic: the set the
/// engine finds must equal the set the oracle predicts.
pub fn cmd_scan(kind: ScanKind, m_max: u64) -> Result<Report, CliError> {
    let mut extra = Value::Null;
    let (found, oracle): (BTreeSet<u64>, BTreeSet<u64>) = match kind {
        ScanKind::TwoSquares => {
            let mut oracle = BTreeSet::new();
            for n in 1..=m_max {
                let r2 = oracle_r2(n).map_err(|e| CliError::Oracle(e.to_string()))?;
                if r2 != 0 {
                    oracle.insert(n);
                }
            }
            (scan_two_squares(m_max)?, oracle)
        }
        ScanKind::Squares => {
            let oracle = (1..).map(|k: u64| k * k).take_while(|&s| s <= m_max).collect();
            (scan_squares(m_max)?, oracle)
        }
        ScanKind::Lehmer => {
            // tau[n - 1] = tau(n); a violation at m means tau(m + 1) = 0.
            let tau = tau_table(m_max as usize + 1);
            let oracle = (1..=m_max).filter(|&m| tau[m as usize].is_zero()).collect();
            (scan_lehmer(m_max)?.into_iter().collect(), oracle)
        }
        ScanKind::PerfectOdd => {
            let rows = check_perfect_odd(m_max)?;
            extra = serde_json::to_value(&rows).expect("rows serialize");
            let mut oracle = BTreeSet::new();
            for m in (1..=m_max).step_by(2) {
                if oracle_sigma(m).map_err(|e| CliError::Oracle(e.to_string()))? == 2 * m {
                    oracle.insert(m);
                }
            }
            (rows.iter().filter(|r| r.is_perfect).map(|r| r.m).collect(), oracle)
        }
    };
    let passed = found == oracle;
    let mut doc = json!({
        "kind": kind.name(),
        "m_max": m_max,
        "found": found,
        "oracle": oracle,
        "agrees": passed,
    });
    if !extra.is_null() {
        doc["rows"] = extra;
    }
    Ok(Report {
        json: doc,
        header: vec!["m", "found", "oracle"],
        rows: (1..=m_max)
            .map(|m| vec![m.to_string(), found.contains(&m).to_string(), oracle.contains(&m).to_string()])
            .collect(),
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Golden,
    Identities,
    Resum,
    Residues,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<(&'static str, Suite)> {
        let all = [
            ("golden", Suite::Golden),
            ("identities", Suite::Identities),
            ("resum", Suite::Resum),
            ("residues", Suite::Residues),
        ];
        match self {
            SuiteArg::Golden => vec![all[0]],
            SuiteArg::Identities => vec![all[1]],
            SuiteArg::Resum => vec![all[2]],
            SuiteArg::Residues => vec![all[3]],
            SuiteArg::All => all.to_vec(),
        }
    }
}

#[derive(Serialize)]
struct SuiteCheck<'a> {
    suite: &'a str,
    #[serde(flatten)]
    check: &'a Check,
}

/// Runs the selected suites, independent suites on separate threads.
pub fn cmd_verify(suite: SuiteArg, trunc: usize) -> Result<Report, CliError> {
    if trunc < 8 {
        return Err(CliError::Usage(format!("--trunc {trunc} is too small for the identity checks (minimum 8)")));
    }
    let selected = suite.suites();
    let results: Vec<(&str, Vec<Check>)> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&(name, su)| (name, s.spawn(move || run_suite(su, trunc))))
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| (name, h.join().expect("suite thread panicked")))
            .collect()
    });
    let flat: Vec<SuiteCheck> = results
        .iter()
        .flat_map(|(suite, checks)| checks.iter().map(move |check| SuiteCheck { suite, check }))
        .collect();
    let passed = flat.iter().all(|c| c.check.passed);
    Ok(Report {
        json: json!({
            "suite": suite.to_possible_value().expect("no skipped variants").get_name(),
            "trunc": trunc,
            "checks": serde_json::to_value(&flat).expect("checks serialize"),
            "passed": passed,
        }),
        header: vec!["suite", "check", "passed", "detail"],
        rows: flat
            .iter()
            .map(|c| vec![c.suite.to_string(), c.check.name.clone(), c.check.passed.to_string(), c.check.detail.clone()])
            .collect(),
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    Theta3,
    Theta4,
    X,
    Y,
    T,
    Delta,
    /// The form attached to `--family`.
    Form,
}

pub fn qseries(kind: SeriesKind, trunc: usize, family: Option<&Family>) -> Result<QSeries, CliError> {
    Ok(match kind {
        SeriesKind::Theta3 => qs_theta(ThetaKind::Three, trunc),
        SeriesKind::Theta4 => qs_theta(ThetaKind::Four, trunc),
        SeriesKind::X => qs_x(trunc),
        SeriesKind::Y => qs_y(trunc),
        SeriesKind::T => qs_t(trunc),
        SeriesKind::Delta => qs_delta(trunc),
        SeriesKind::Form => {
            let family = family.ok_or_else(|| CliError::Usage("series `form` needs --family".into()))?;
            family_form(family, trunc)
        }
    })
}

pub fn cmd_qseries_dump(kind: SeriesKind, trunc: usize, family: Option<&Family>) -> Result<Report, CliError> {
    let series = qseries(kind, trunc, family)?;
    Ok(Report {
        json: serde_json::to_value(&series).expect("series serializes"),
        header: vec!["n", "coeff"],
        rows: series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| vec![n.to_string(), rat_to_string(c)])
            .collect(),
        passed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(family: &str, m_max: u64) -> RunConfig {
        RunConfig::new(family.parse().unwrap(), m_max, None, Format::Json, None, false).unwrap()
    }

    #[test]
    fn config_validation() {
        let fam = Family::delta256();
        assert_eq!(config("mult:2,8,8", 4).truncation, 6);
        assert!(matches!(
            RunConfig::new(fam.clone(), 4, Some(5), Format::Json, None, false),
            Err(CliError::Usage(_))
        ));
        assert!(RunConfig::new(fam, 4, Some(40), Format::Json, None, true).is_ok());
        let err = RunConfig::new(Family::theta(), 4, None, Format::Json, None, true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn compute_initial_entry() {
        let r = cmd_compute(&config("mult:0,0,2", 0)).unwrap();
        assert_eq!(r.json["entries"][0], json!({"num": ["1"], "den": []}));
    }

    #[test]
    fn residue_rows_for_small_families() {
        let rows = residue_rows(&config("mult:0,0,2", 5)).unwrap();
        let rec: Vec<Rat> = rows.iter().map(|r| r.recovered.clone()).collect();
        assert_eq!(rec, [4, 4, 0, 4, 8].map(rat_int));
        assert!(rows.iter().all(|r| r.matches && r.order <= 1));

        let rows = residue_rows(&config("mult:0,0,1", 10)).unwrap();
        let nonzero: Vec<u64> = rows.iter().filter(|r| !r.recovered.is_zero()).map(|r| r.m).collect();
        assert_eq!(nonzero, [1, 4, 9]);

        let mut cfg = config("mult:2,8,8", 4);
        cfg.normalize_delta = true;
        let rows = residue_rows(&cfg).unwrap();
        assert_eq!(rows[3].oracle, rat_int(252));
        assert!(rows[3].matches);
    }

    #[test]
    fn scans_agree_with_oracles() {
        let r = cmd_scan(ScanKind::TwoSquares, 12).unwrap();
        assert_eq!(r.json["found"], json!([1, 2, 4, 5, 8, 9, 10]));
        assert!(r.passed);
        let r = cmd_scan(ScanKind::Lehmer, 6).unwrap();
        assert_eq!(r.json["found"], json!([]));
        assert!(r.passed);
        let r = cmd_scan(ScanKind::PerfectOdd, 15).unwrap();
        assert_eq!(r.json["found"], json!([]));
        assert_eq!(r.json["rows"].as_array().unwrap().len(), 8);
        assert!(cmd_scan(ScanKind::Squares, 10).unwrap().passed);
    }

    #[test]
    fn verify_golden() {
        let r = cmd_verify(SuiteArg::Golden, 64).unwrap();
        assert!(r.passed);
        assert!(r.rows.iter().any(|row| row[3].contains("27072")));
        assert!(cmd_verify(SuiteArg::Golden, 2).is_err());
    }

    #[test]
    fn dump_needs_family_for_form() {
        assert!(cmd_qseries_dump(SeriesKind::Form, 4, None).is_err());
        let r = cmd_qseries_dump(SeriesKind::Form, 4, Some(&Family::theta_squared())).unwrap();
        assert_eq!(r.json, json!({"trunc": 4, "coeffs": ["1", "4", "4", "0", "4"]}));
    }
}
