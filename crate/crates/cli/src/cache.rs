//! Content-addressed store of computed correlator sets.
//!
//! Keys hash the background, the detectors, the correlator numerics and both
//! version numbers, so a change to any of them lands in a fresh entry. Entries
//! are written to a temporary file and renamed into place, which keeps
//! concurrent writers of the same key safe: the last rename wins and every
//! candidate holds identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use btz_tripartite::{CorrelatorSet, DetectorConfiguration, Numerics, NUMERICS_VERSION};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Overrides the cache directory.
pub const CACHE_ENV: &str = "BTZ_TRIPARTITE_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(cfg: &DetectorConfiguration, numerics: &Numerics) -> Self {
        #[derive(Serialize)]
        struct Material<'a> {
            cfg: &'a DetectorConfiguration,
            numerics: &'a Numerics,
            numerics_version: u32,
            code_version: &'a str,
        }
        let material = Material {
            cfg,
            numerics,
            numerics_version: NUMERICS_VERSION,
            code_version: env!("CARGO_PKG_VERSION"),
        };
        let json = serde_json::to_vec(&material).expect("plain data always serializes");
        let digest = Sha256::digest(&json);
        CacheKey(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// Directory from [`CACHE_ENV`], else the user cache directory.
    pub fn from_env() -> Self {
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            return Self::at(dir);
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")));
        match base {
            Some(base) => Self::at(base.join("btz-tripartite")),
            None => Self::disabled(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.as_str())))
    }

    /// Stored set, if any. Unreadable entries are treated as misses.
    pub fn get(&self, key: &CacheKey) -> Option<CorrelatorSet> {
        let path = self.path(key)?;
        let bytes = std::fs::read(&path).ok()?;
        match serde_json::from_slice(&bytes) {
            Ok(set) => Some(set),
            Err(e) => {
                log::warn!("ignoring corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &CacheKey, set: &CorrelatorSet) -> CliResult<()> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else {
            return Ok(());
        };
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
        let json = serde_json::to_vec(set).expect("plain data always serializes");
        tmp.write_all(&json).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| CliError::io(&path, e.error))?;
        Ok(())
    }

    /// Cached set, or compute and store it.
    pub fn get_or_compute(&self, cfg: &DetectorConfiguration, numerics: &Numerics) -> CliResult<CorrelatorSet> {
        let key = CacheKey::new(cfg, numerics);
        if let Some(set) = self.get(&key) {
            log::debug!("cache hit {}", key.as_str());
            return Ok(set);
        }
        let set = CorrelatorSet::compute(cfg, numerics)?;
        if let Err(e) = self.put(&key, &set) {
            log::warn!("could not store cache entry: {e}");
        }
        Ok(set)
    }
}
