//! On-disk cache of admissible bases. The cache is derived data: anything
//! that fails validation is discarded and rebuilt.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use thhforge_core::steenrod::dual::milnor_basis_in;
use thhforge_core::steenrod::{admissible_basis, Admissible};

const FILE: &str = "adem-v1.json";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct AdemFile {
    version: u32,
    max_degree: u32,
    /// `bases[d]`: admissible words of degree `d`.
    bases: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheStatus {
    Hit,
    Built,
    /// An existing file failed validation and was replaced.
    Rebuilt,
}

pub struct AdemCache {
    dir: PathBuf,
}

impl AdemCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AdemCache { dir: dir.into() }
    }

    pub fn path(&self) -> PathBuf {
        self.dir.join(FILE)
    }

    /// Admissible bases in degrees `0..=max_degree`.
    pub fn load(&self, max_degree: u32) -> anyhow::Result<(Vec<Vec<Admissible>>, CacheStatus)> {
        let path = self.path();
        let existing = path.exists();
        if existing {
            if let Some(bases) = read_valid(&path, max_degree) {
                return Ok((bases, CacheStatus::Hit));
            }
        }
        let bases: Vec<Vec<Admissible>> = (0..=max_degree).map(|d| admissible_basis(d).as_ref().clone()).collect();
        let file = AdemFile {
            version: VERSION,
            max_degree,
            bases: bases.iter().map(|b| b.iter().map(|m| m.0.clone()).collect()).collect(),
        };
        std::fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        std::fs::write(&path, serde_json::to_string(&file)?).with_context(|| format!("writing {}", path.display()))?;
        Ok((bases, if existing { CacheStatus::Rebuilt } else { CacheStatus::Built }))
    }
}

/// The cached bases if the file parses, covers `max_degree`, and every
/// degree holds distinct admissible words whose count matches the Milnor
/// basis of the dual.
fn read_valid(path: &Path, max_degree: u32) -> Option<Vec<Vec<Admissible>>> {
    let text = std::fs::read_to_string(path).ok()?;
    let file: AdemFile = serde_json::from_str(&text).ok()?;
    if file.version != VERSION || file.max_degree < max_degree || file.bases.len() != file.max_degree as usize + 1 {
        return None;
    }
    let mut out = Vec::new();
    for (d, words) in file.bases.into_iter().enumerate().take(max_degree as usize + 1) {
        let monos: Vec<Admissible> = words.into_iter().map(Admissible).collect();
        let mut seen = std::collections::BTreeSet::new();
        for m in &monos {
            if !m.is_admissible() || m.degree() != d as u32 || !seen.insert(m.0.clone()) {
                return None;
            }
        }
        if monos.len() != milnor_basis_in(2, d as u64, false).len() {
            return None;
        }
        out.push(monos);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_cache_is_rebuilt() {
        let dir = std::env::temp_dir().join(format!("thhforge-cache-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let cache = AdemCache::new(&dir);
        let (a, s) = cache.load(12).unwrap();
        assert_eq!(s, CacheStatus::Built);
        let (b, s) = cache.load(12).unwrap();
        assert_eq!((s, &a), (CacheStatus::Hit, &b));
        std::fs::write(cache.path(), "{\"version\":1,\"max_degree\":12,\"bases\":[[[1,1]]]}").unwrap();
        let (c, s) = cache.load(12).unwrap();
        assert_eq!((s, &a), (CacheStatus::Rebuilt, &c));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
