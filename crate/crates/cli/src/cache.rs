//! On-disk cache of sequence entries.
//!
//! Layout: `<root>/<sha256 of the canonical family string>/<m>.json`. Each file
//! starts with a one-line header
//! `modres-cache <format> <engine version> <sha256 of body>` followed by a JSON
//! body `{"entry": {...}, "family": "...", "m": m}`. Anything that fails to
//! match header, checksum, family or index is treated as missing and
//! recomputed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use modres::recurrence::RecurrenceError;
use modres::{Family, RatFunc, SeqState};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;
use thiserror::Error;

const MAGIC: &str = "modres-cache";
const FORMAT: u32 = 1;
const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
}

#[derive(Serialize, Deserialize)]
struct Body {
    entry: RatFunc,
    family: String,
    m: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn family_dir(&self, family: &Family) -> PathBuf {
        self.root.join(sha256_hex(family.canonical().as_bytes()))
    }

    pub fn entry_path(&self, family: &Family, m: u64) -> PathBuf {
        self.family_dir(family).join(format!("{m}.json"))
    }

    /// A verified entry, or `None` when absent, stale or corrupt.
    pub fn load(&self, family: &Family, m: u64) -> Option<RatFunc> {
        let text = fs::read_to_string(self.entry_path(family, m)).ok()?;
        let (header, body) = text.split_once('\n')?;
        let mut fields = header.split(' ');
        let ok = fields.next() == Some(MAGIC)
            && fields.next() == Some(&FORMAT.to_string())
            && fields.next() == Some(ENGINE_VERSION)
            && fields.next() == Some(&sha256_hex(body.as_bytes()))
            && fields.next().is_none();
        if !ok {
            return None;
        }
        let body: Body = serde_json::from_str(body).ok()?;
        (body.family == family.canonical() && body.m == m).then_some(body.entry)
    }

    /// Writes an entry atomically (temp file in the same directory, then rename).
    pub fn store(&self, family: &Family, m: u64, entry: &RatFunc) -> Result<(), CacheError> {
        let dir = self.family_dir(family);
        let path = self.entry_path(family, m);
        let io_err = |source| CacheError::Io { path: path.clone(), source };
        fs::create_dir_all(&dir).map_err(io_err)?;
        let body = serde_json::to_string(&Body { entry: entry.clone(), family: family.canonical(), m })
            .expect("cache body serializes");
        let mut tmp = NamedTempFile::new_in(&dir).map_err(io_err)?;
        write!(tmp, "{MAGIC} {FORMAT} {ENGINE_VERSION} {}\n{body}", sha256_hex(body.as_bytes()))
            .map_err(io_err)?;
        tmp.persist(&path).map_err(|e| io_err(e.error))?;
        Ok(())
    }

    /// `e_0, ..., e_max_m`, reusing the longest valid cached prefix and
    /// storing everything computed beyond it.
    pub fn sequence(&self, family: &Family, max_m: u64) -> Result<SeqState, CacheError> {
        let mut entries = Vec::new();
        for m in 0..=max_m {
            match self.load(family, m) {
                Some(e) => entries.push(e),
                None => break,
            }
        }
        let mut seq = SeqState::from_entries(family.clone(), entries);
        let mut first_err = None;
        seq.extend_with(max_m, |m, e| {
            if first_err.is_none() {
                first_err = self.store(family, m, e).err();
            }
        })?;
        match first_err {
            Some(e) => Err(e),
            None => Ok(seq),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use modres::recurrence::rec_sequence;

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let fam = Family::delta256();
        let seq = rec_sequence(&fam, 3).unwrap();
        for (m, e) in seq.entries().iter().enumerate() {
            cache.store(&fam, m as u64, e).unwrap();
        }
        for (m, e) in seq.entries().iter().enumerate() {
            assert_eq!(cache.load(&fam, m as u64).as_ref(), Some(e));
        }
        assert_eq!(cache.load(&fam, 4), None);
        assert_eq!(cache.load(&Family::theta(), 0), None);
    }

    #[test]
    fn tampered_entries_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let fam = Family::theta_squared();
        let seq = rec_sequence(&fam, 2).unwrap();
        cache.store(&fam, 2, &seq.entries()[2]).unwrap();
        let path = cache.entry_path(&fam, 2);
        let text = fs::read_to_string(&path).unwrap();

        let (header, body) = text.split_once('\n').unwrap();
        let at = body.find(|c: char| c.is_ascii_digit()).unwrap();
        let flipped = if &body[at..=at] == "7" { "8" } else { "7" };
        let edited = format!("{header}\n{}{flipped}{}", &body[..at], &body[at + 1..]);
        fs::write(&path, edited).unwrap();
        assert_eq!(cache.load(&fam, 2), None, "checksum must catch edits");

        fs::write(&path, text.replacen(MAGIC, "other", 1)).unwrap();
        assert_eq!(cache.load(&fam, 2), None);

        fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert_eq!(cache.load(&fam, 2), None);

        // An intact file moved under the wrong index is also refused.
        fs::write(cache.entry_path(&fam, 1), &text).unwrap();
        assert_eq!(cache.load(&fam, 1), None);
    }

    #[test]
    fn sequence_recomputes_corrupt_suffix() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let fam = Family::theta();
        let direct = rec_sequence(&fam, 5).unwrap();
        assert_eq!(cache.sequence(&fam, 5).unwrap(), direct);
        fs::write(cache.entry_path(&fam, 3), "garbage").unwrap();
        assert_eq!(cache.sequence(&fam, 5).unwrap(), direct);
        assert_eq!(cache.load(&fam, 3).as_ref(), Some(&direct.entries()[3]));
    }
}
