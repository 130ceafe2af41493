//! Run directories: `manifest.json`, raw `series.bin` and the writer lock.

use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use fpulab::{ChainState, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";
pub const SERIES: &str = "series.bin";
pub const LOCK: &str = "run.lock";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    pub params: ModelParams,
    pub dt: f64,
    pub seed: u64,
    pub warmup_steps: u64,
    pub sample_every: u64,
    pub samples: u64,
    /// Time covered by the samples, `(samples - 1) * sample_every * dt`.
    pub horizon: f64,
    pub created_utc: String,
    pub producer: String,
}

impl RunManifest {
    pub fn sample_dt(&self) -> f64 {
        self.sample_every as f64 * self.dt
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "manifest schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.params.validate().map_err(|e| CliError::Schema(e.to_string()))?;
        if !(self.dt > 0.0) || self.sample_every == 0 || self.samples == 0 {
            return Err(CliError::Schema("dt, sample_every and samples must be positive".into()));
        }
        let span = (self.samples - 1) as f64 * self.sample_dt();
        if (span - self.horizon).abs() > self.dt {
            return Err(CliError::Schema(format!(
                "horizon {} disagrees with samples and spacing ({span})",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Exclusive writer lock, released on drop.
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(LOCK);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id()).map_err(|e| CliError::io(&path, e))?;
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::Usage(format!("{} is locked by another writer ({LOCK} exists)", dir.display())))
            }
            Err(e) => Err(CliError::io(&path, e)),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Streams snapshots as `q[0..N]` then `p[0..N]`, little-endian f64.
pub struct SeriesWriter {
    out: BufWriter<File>,
    path: PathBuf,
    n: usize,
    pub written: u64,
}

impl SeriesWriter {
    pub fn create(dir: &Path, n: usize) -> Result<Self, CliError> {
        let path = dir.join(SERIES);
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(Self { out: BufWriter::new(f), path, n, written: 0 })
    }

    pub fn push(&mut self, s: &ChainState) -> Result<(), CliError> {
        debug_assert_eq!(s.q.len(), self.n);
        for x in s.q.iter().chain(&s.p) {
            self.out.write_all(&x.to_le_bytes()).map_err(|e| CliError::io(&self.path, e))?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<u64, CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.written)
    }
}

pub fn write_manifest(dir: &Path, m: &RunManifest) -> Result<(), CliError> {
    let path = dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(m).map_err(|e| CliError::Schema(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let m: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    m.validate()?;
    Ok(m)
}

/// A validated run: manifest plus all snapshots.
pub struct Run {
    pub manifest: RunManifest,
    pub snapshots: Vec<ChainState>,
}

impl Run {
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        let manifest = read_manifest(dir)?;
        let snapshots = read_series(&dir.join(SERIES), &manifest)?;
        Ok(Self { manifest, snapshots })
    }
}

pub fn read_series(path: &Path, m: &RunManifest) -> Result<Vec<ChainState>, CliError> {
    let n = m.params.n;
    let expected = m.samples * 2 * n as u64 * 8;
    let len = fs::metadata(path).map_err(|e| CliError::io(path, e))?.len();
    if len != expected {
        return Err(CliError::Schema(format!("{} has {len} bytes, manifest implies {expected}", path.display())));
    }
    let mut r = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
    let mut buf = vec![0u8; 2 * n * 8];
    let mut out = Vec::with_capacity(m.samples as usize);
    for i in 0..m.samples {
        r.read_exact(&mut buf).map_err(|e| CliError::io(path, e))?;
        let vals: Vec<f64> = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        let t = i as f64 * m.sample_dt();
        let s = ChainState::new(vals[..n].to_vec(), vals[n..].to_vec(), t).map_err(CliError::Model)?;
        out.push(s);
    }
    Ok(out)
}
