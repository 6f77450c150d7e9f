//! On-disk unit cache.
//!
//! Line-delimited JSON: a header line `{"format":"triquad-units","version":1}`
//! followed by one `{"d","a","b","denom","norm"}` record per line, every value
//! a decimal string. Records are untrusted and re-verified on load.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{memo_insert, memo_snapshot, QuadUnit};
use crate::arith::is_squarefree;

pub const CACHE_VERSION: u32 = 1;
const FORMAT: &str = "triquad-units";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("cache line {line}: {reason}")]
    Bad { line: usize, reason: String },
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Record {
    d: String,
    a: String,
    b: String,
    denom: String,
    norm: String,
}

fn parse_record(line: &str) -> Result<QuadUnit, String> {
    let r: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let d: u64 = r.d.parse().map_err(|_| "bad d".to_string())?;
    let a: BigInt = r.a.parse().map_err(|_| "bad a".to_string())?;
    let b: BigInt = r.b.parse().map_err(|_| "bad b".to_string())?;
    let denom: u8 = r.denom.parse().map_err(|_| "bad denom".to_string())?;
    let norm: i8 = r.norm.parse().map_err(|_| "bad norm".to_string())?;
    if d <= 1 || !is_squarefree(d) {
        return Err(format!("radicand {d} is not squarefree > 1"));
    }
    let u = QuadUnit { d, a, b, denom, norm };
    if !u.satisfies_pell() {
        return Err(format!("record for d={d} fails the Pell identity"));
    }
    Ok(u)
}

/// Reads a cache file and seeds the process-wide memo. Returns the number
/// of records loaded. A missing file is an empty cache.
pub fn load(path: &Path) -> Result<usize, CacheError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e.into()),
    };
    let mut count = 0;
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if n == 1 {
            let h: Header = serde_json::from_str(&line)
                .map_err(|e| CacheError::Bad { line: n, reason: e.to_string() })?;
            if h.format != FORMAT || h.version != CACHE_VERSION {
                return Err(CacheError::Bad {
                    line: n,
                    reason: format!("unsupported cache {} v{}", h.format, h.version),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let u = parse_record(&line).map_err(|reason| CacheError::Bad { line: n, reason })?;
        memo_insert(u);
        count += 1;
    }
    Ok(count)
}

/// Writes every memoized unit to `path` (atomically via a temporary file).
pub fn save(path: &Path) -> Result<usize, CacheError> {
    let units = memo_snapshot();
    let tmp = path.with_extension("tmp");
    {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        let header = Header { format: FORMAT.to_string(), version: CACHE_VERSION };
        writeln!(f, "{}", serde_json::to_string(&header).unwrap())?;
        for u in &units {
            let r = Record {
                d: u.d.to_string(),
                a: u.a.to_string(),
                b: u.b.to_string(),
                denom: u.denom.to_string(),
                norm: u.norm.to_string(),
            };
            writeln!(f, "{}", serde_json::to_string(&r).unwrap())?;
        }
        f.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(units.len())
}
