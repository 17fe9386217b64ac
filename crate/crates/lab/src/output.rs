//! CSV result files with embedded provenance, resumable by point.
//!
//! Layout: `#`-prefixed comment lines (tool version, command, full config),
//! then a mandatory header row, then one row per sample. Rows are appended
//! through a single mutex-guarded writer as points finish; `finish`
//! rewrites the file in canonical point order so that reruns are
//! byte-identical regardless of worker scheduling.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::LabResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV row belonging to an `(N, eps)` point.
pub trait PointRow: Serialize + DeserializeOwned + Clone + Send {
    fn point(&self) -> PointKey;
    /// Column names, used when a table has no rows.
    fn header() -> &'static [&'static str];
}

/// `(N, eps)` with `eps` compared bitwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointKey {
    pub particles: usize,
    eps_bits: u64,
}

impl PointKey {
    pub fn new(particles: usize, eps: f64) -> Self {
        Self { particles, eps_bits: eps.to_bits() }
    }

    pub fn eps(&self) -> f64 {
        f64::from_bits(self.eps_bits)
    }
}

pub fn provenance_lines(cfg: &ExperimentConfig, command: &str) -> Vec<String> {
    let mut lines = vec![format!("# bosegas-lab {VERSION} {command}")];
    lines.extend(cfg.to_toml_string().lines().map(|l| format!("# {l}")));
    lines
}

fn read_comment_block(path: &Path) -> std::io::Result<Vec<String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.starts_with('#') {
            break;
        }
        out.push(line);
    }
    Ok(out)
}

/// Live writer plus the rows it has received, keyed by point.
type FreshRows<R> = (csv::Writer<File>, BTreeMap<PointKey, Vec<R>>);

pub struct ResultSink<R: PointRow> {
    path: PathBuf,
    provenance: Vec<String>,
    resumed: BTreeMap<PointKey, Vec<R>>,
    fresh: Mutex<FreshRows<R>>,
}

impl<R: PointRow> ResultSink<R> {
    /// Opens `path`. When it already holds rows written under the same
    /// provenance block, those points are kept and reported as complete;
    /// otherwise the file is started afresh.
    pub fn open(path: &Path, provenance: Vec<String>) -> LabResult<Self> {
        let mut resumed: BTreeMap<PointKey, Vec<R>> = BTreeMap::new();
        if path.is_file() && read_comment_block(path)? == provenance {
            let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
            for row in reader.deserialize::<R>() {
                match row {
                    Ok(r) => resumed.entry(r.point()).or_default().push(r),
                    Err(e) => {
                        log::warn!("discarding unreadable row in {}: {e}", path.display());
                        resumed.clear();
                        break;
                    }
                }
            }
        } else if path.is_file() {
            log::info!("{} was written under a different configuration; starting over", path.display());
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).write(true).truncate(true).open(path)?;
        let writer = Self::start(file, &provenance, resumed.values().flatten())?;
        Ok(Self { path: path.to_path_buf(), provenance, resumed, fresh: Mutex::new((writer, BTreeMap::new())) })
    }

    fn start<'a>(mut file: File, provenance: &[String], rows: impl Iterator<Item = &'a R>) -> LabResult<csv::Writer<File>>
    where
        R: 'a,
    {
        for line in provenance {
            writeln!(file, "{line}")?;
        }
        let mut writer = csv::Writer::from_writer(file);
        let mut wrote_header = false;
        for row in rows {
            writer.serialize(row)?;
            wrote_header = true;
        }
        if !wrote_header {
            // header row is mandatory even for an empty table
            writer.write_record(R::header())?;
        }
        writer.flush()?;
        Ok(writer)
    }

    pub fn is_complete(&self, key: PointKey) -> bool {
        self.resumed.contains_key(&key)
    }

    pub fn resumed_rows(&self, key: PointKey) -> Option<&[R]> {
        self.resumed.get(&key).map(Vec::as_slice)
    }

    /// Appends the rows of one finished point.
    pub fn append(&self, key: PointKey, rows: &[R]) -> LabResult<()> {
        let mut guard = self.fresh.lock().expect("sink poisoned");
        for r in rows {
            guard.0.serialize(r)?;
        }
        guard.0.flush()?;
        guard.1.insert(key, rows.to_vec());
        Ok(())
    }

    /// Rewrites the file with every point in `order`.
    pub fn finish(self, order: &[PointKey]) -> LabResult<PathBuf> {
        let (writer, fresh) = self.fresh.into_inner().expect("sink poisoned");
        drop(writer);
        let mut all = self.resumed;
        all.extend(fresh);
        let rows: Vec<&R> = order.iter().filter_map(|k| all.get(k)).flatten().collect();
        let file = File::create(&self.path)?;
        let mut writer = Self::start(file, &self.provenance, rows.into_iter())?;
        writer.flush()?;
        Ok(self.path)
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> LabResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value).map_err(|e| crate::error::LabError::Output(e.to_string()))?;
    writeln!(file)?;
    Ok(())
}
