//! File and stdout emission with stable, reproducible formatting.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::CliError;

/// 17 significant digits reproduce any f64 bit pattern on read-back.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output directory for the scan/summary files of one invocation. Files are
/// only written when the caller passed `--out`; the summary always goes to
/// stdout either way.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink { dir })
    }

    fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), body)?;
        }
        Ok(())
    }

    /// CSV with a fixed header; every cell already formatted by the caller.
    pub fn csv(&self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut body = String::with_capacity(rows.len() * 64 + header.len() + 1);
        body.push_str(header);
        body.push('\n');
        for row in rows {
            body.push_str(row);
            body.push('\n');
        }
        self.write(name, &body)
    }

    /// Writes `<name>` as pretty JSON and mirrors the exact bytes to stdout.
    pub fn summary<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
        body.push('\n');
        self.write(name, &body)?;
        print!("{body}");
        Ok(())
    }
}

/// Runs `op` on every index in `0..n`, optionally on a rayon pool of `jobs`
/// workers. Results come back in index order regardless of scheduling, so
/// the output is identical for every job count.
pub fn indexed_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, jobs: usize, op: F) -> Vec<T> {
    if jobs <= 1 {
        return (0..n).map(op).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(op).collect()
    })
}

/// Stream-independent per-item seed: one splitmix64 step over the base seed
/// and the item index.
pub fn item_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
