//! On-disk store for divided-power matrices, one text file per key.
//!
//! ```text
//! n N kind i r lambda rows cols
//! row col <LaurentPoly-text>
//! ...
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::{GenKind, OperatorMatrix, TensorError};
use crate::cartan::Content;
use crate::linalg::SparseMatrix;
use crate::qalg::LaurentPoly;

const EXTENSION: &str = "mat";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub files: usize,
    pub bytes: u64,
    pub hits: usize,
    pub misses: usize,
}

#[derive(Debug)]
pub struct MatrixCache {
    dir: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

fn cache_err(path: &Path, what: impl std::fmt::Display) -> TensorError {
    TensorError::Cache(format!("{}: {what}", path.display()))
}

impl MatrixCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, TensorError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| cache_err(&dir, e))?;
        Ok(Self {
            dir,
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    #[allow(clippy::too_many_arguments)]
    fn header(n: usize, len: usize, kind: GenKind, i: usize, r: u32, lambda: &Content, rows: usize, cols: usize) -> String {
        format!("{n} {len} {kind} {i} {r} {lambda} {rows} {cols}")
    }

    fn path_for(&self, n: usize, len: usize, kind: GenKind, i: usize, r: u32, lambda: &Content) -> PathBuf {
        let weight: Vec<String> = lambda.0.iter().map(|v| v.to_string()).collect();
        self.dir
            .join(format!("n{n}_N{len}_{kind}{i}_r{r}_{}.{EXTENSION}", weight.join("_")))
    }

    /// Loads a stored matrix. A missing file is `Ok(None)`; a file whose header
    /// disagrees with the request or whose body is malformed is an error.
    pub fn load(
        &self,
        n: usize,
        len: usize,
        (kind, i, r, lambda): (GenKind, usize, u32, &Content),
        target: &Content,
        (rows, cols): (usize, usize),
    ) -> Result<Option<OperatorMatrix>, TensorError> {
        let path = self.path_for(n, len, kind, i, r, lambda);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return Ok(None);
            }
            Err(e) => return Err(cache_err(&path, e)),
        };
        let mut lines = text.lines();
        let expected = Self::header(n, len, kind, i, r, lambda, rows, cols);
        match lines.next() {
            Some(h) if h.trim() == expected => {}
            Some(h) => return Err(cache_err(&path, format!("header {h:?} does not match {expected:?}"))),
            None => return Err(cache_err(&path, "empty file")),
        }
        let mut triplets = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, ' ');
            let (Some(row), Some(col), Some(value)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(cache_err(&path, format!("line {}: expected `row col value`", lineno + 2)));
            };
            let row: usize = row.parse().map_err(|e| cache_err(&path, format!("line {}: {e}", lineno + 2)))?;
            let col: usize = col.parse().map_err(|e| cache_err(&path, format!("line {}: {e}", lineno + 2)))?;
            if row >= rows || col >= cols {
                return Err(cache_err(&path, format!("line {}: entry out of range", lineno + 2)));
            }
            let value: LaurentPoly = value.parse().map_err(|e| cache_err(&path, format!("line {}: {e}", lineno + 2)))?;
            triplets.push((row, col, value));
        }
        self.hits.fetch_add(1, Ordering::Relaxed);
        Ok(Some(OperatorMatrix::new(
            lambda.clone(),
            target.clone(),
            SparseMatrix::from_triplets(rows, cols, triplets),
        )))
    }

    /// Writes a matrix through a temporary file and a rename, so concurrent
    /// writers of the same key never expose a partial file.
    pub fn store(
        &self,
        n: usize,
        len: usize,
        (kind, i, r): (GenKind, usize, u32),
        matrix: &OperatorMatrix,
    ) -> Result<(), TensorError> {
        let lambda = matrix.source();
        let path = self.path_for(n, len, kind, i, r, lambda);
        let m = matrix.matrix();
        let mut body = Self::header(n, len, kind, i, r, lambda, m.rows(), m.cols());
        body.push('\n');
        for (row, col, v) in m.triplets() {
            body.push_str(&format!("{row} {col} {v}\n"));
        }
        let tmp = path.with_extension(format!("{EXTENSION}.tmp{}.{:?}", std::process::id(), std::thread::current().id()));
        let mut file = fs::File::create(&tmp).map_err(|e| cache_err(&tmp, e))?;
        file.write_all(body.as_bytes()).map_err(|e| cache_err(&tmp, e))?;
        drop(file);
        fs::rename(&tmp, &path).map_err(|e| cache_err(&path, e))
    }

    fn entries(&self) -> Result<Vec<PathBuf>, TensorError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(|e| cache_err(&self.dir, e))? {
            let path = entry.map_err(|e| cache_err(&self.dir, e))?.path();
            if path.extension().is_some_and(|e| e == EXTENSION) {
                out.push(path);
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> Result<CacheStats, TensorError> {
        let mut stats = CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            ..CacheStats::default()
        };
        for path in self.entries()? {
            stats.files += 1;
            stats.bytes += fs::metadata(&path).map_err(|e| cache_err(&path, e))?.len();
        }
        Ok(stats)
    }

    /// Removes every matrix file; returns how many were deleted.
    pub fn clear(&self) -> Result<usize, TensorError> {
        let entries = self.entries()?;
        for path in &entries {
            fs::remove_file(path).map_err(|e| cache_err(path, e))?;
        }
        Ok(entries.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_rep::{build_module, LetterKind};

    #[test]
    fn roundtrip_and_header_validation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::open(dir.path()).unwrap();
        let lambda = Content(vec![2, 1]);
        let cold = build_module(2, 3).unwrap().with_disk_cache(MatrixCache::open(dir.path()).unwrap());
        let m = cold.divided_power(LetterKind::E, 1, 2, &lambda).unwrap();
        assert_eq!(cache.stats().unwrap().files, 1);

        let target = m.target().clone();
        let dims = (m.matrix().rows(), m.matrix().cols());
        let loaded = cache.load(2, 3, (GenKind::E, 1, 2, &lambda), &target, dims).unwrap().unwrap();
        assert_eq!(loaded, *m);

        let err = cache.load(2, 3, (GenKind::E, 1, 2, &lambda), &target, (dims.0 + 1, dims.1));
        assert!(matches!(err, Err(TensorError::Cache(_))));

        let warm = build_module(2, 3).unwrap().with_disk_cache(MatrixCache::open(dir.path()).unwrap());
        assert_eq!(*warm.divided_power(LetterKind::E, 1, 2, &lambda).unwrap(), *m);

        assert_eq!(cache.clear().unwrap(), 1);
        assert_eq!(cache.stats().unwrap().files, 0);
    }
}
