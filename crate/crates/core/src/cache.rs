//! On-disk cache of canonical forms, keyed by a SHA-256 hash of the
//! presentation. Entries are plain text: a header with the invariant
//! factors followed by `to_canon` and `lift` as sparse triple blocks.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact_linalg::{parse_triple_block, Canonical, FinAbGroup, Int, Presentation};

pub const CACHE_DIR_ENV: &str = "RPCALC_CACHE_DIR";
const FORMAT_TAG: &str = "rpcalc-snf-v1";

#[derive(Clone, Debug)]
pub struct SnfCache {
    dir: PathBuf,
}

impl SnfCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SnfCache { dir })
    }

    /// The directory named by `RPCALC_CACHE_DIR`, else `fallback`, else none.
    pub fn resolve(fallback: Option<&Path>) -> Result<Option<Self>> {
        match std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()) {
            Some(d) => Ok(Some(Self::new(PathBuf::from(d))?)),
            None => fallback.map(Self::new).transpose(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(p: &Presentation) -> String {
        let mut h = Sha256::new();
        h.update(FORMAT_TAG.as_bytes());
        h.update(format!("\n{} {}\n", p.gens, p.relations.len()).as_bytes());
        for r in &p.relations {
            for (c, v) in r {
                h.update(format!("{c}:{v} ").as_bytes());
            }
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.snf"))
    }

    pub fn load(&self, p: &Presentation) -> Option<Canonical> {
        let text = fs::read_to_string(self.path(&Self::key(p))).ok()?;
        let c = decode(&text).ok()?;
        let k = c.group.num_gens();
        let fits = c.to_canon.rows() == p.gens
            && c.to_canon.cols() == k
            && c.lift.rows() == k
            && c.lift.cols() == p.gens;
        fits.then_some(c)
    }

    pub fn store(&self, p: &Presentation, c: &Canonical) -> Result<()> {
        let key = Self::key(p);
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(encode(c).as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(&key))?;
        Ok(())
    }

    /// Cached canonical form of `p`, computing and storing it on a miss.
    pub fn canonicalize(&self, p: &Presentation) -> Result<Canonical> {
        if let Some(c) = self.load(p) {
            return Ok(c);
        }
        let c = p.canonicalize();
        self.store(p, &c)?;
        Ok(c)
    }
}

/// Canonical form through the cache when there is one.
pub fn canonicalize(p: &Presentation, cache: Option<&SnfCache>) -> Result<Canonical> {
    match cache {
        Some(c) => c.canonicalize(p),
        None => Ok(p.canonicalize()),
    }
}

fn encode(c: &Canonical) -> String {
    let torsion: Vec<String> = c.group.torsion.iter().map(Int::to_string).collect();
    format!(
        "# {FORMAT_TAG}\nfree_rank {}\ntorsion {}\n{}{}",
        c.group.free_rank,
        torsion.join(" "),
        c.to_canon.to_triples(),
        c.lift.to_triples()
    )
}

fn decode(text: &str) -> Result<Canonical> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let bad = |what: &str| Error::Parse(format!("cache entry: {what}"));
    let free_rank = lines
        .next()
        .and_then(|l| l.strip_prefix("free_rank"))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| bad("free_rank line"))?;
    let torsion = lines
        .next()
        .and_then(|l| l.strip_prefix("torsion"))
        .ok_or_else(|| bad("torsion line"))?
        .split_whitespace()
        .map(|t| t.parse::<Int>().map_err(|_| bad("torsion value")))
        .collect::<Result<Vec<_>>>()?;
    let to_canon = parse_triple_block(&mut lines)?;
    let lift = parse_triple_block(&mut lines)?;
    if lines.next().is_some() {
        return Err(bad("trailing data"));
    }
    Ok(Canonical { group: FinAbGroup { free_rank, torsion }, to_canon, lift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::IntMatrix;

    #[test]
    fn round_trip() {
        let p = Presentation::from_matrix(&IntMatrix::from_i64(2, 3, &[2, 4, 0, 6, 8, 0]));
        let c = p.canonicalize();
        let back = decode(&encode(&c)).unwrap();
        assert_eq!(back.group, c.group);
        assert_eq!(back.to_canon, c.to_canon);
        assert_eq!(back.lift, c.lift);
    }

    #[test]
    fn key_depends_on_content() {
        let a = Presentation::from_matrix(&IntMatrix::from_i64(1, 2, &[2, 0]));
        let b = Presentation::from_matrix(&IntMatrix::from_i64(1, 2, &[3, 0]));
        assert_ne!(SnfCache::key(&a), SnfCache::key(&b));
        assert_eq!(SnfCache::key(&a), SnfCache::key(&a.clone()));
    }
}
