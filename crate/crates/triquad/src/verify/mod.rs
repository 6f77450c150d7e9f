//! Independent checks of the case analysis: regulator indices, the
//! reference table and lemma-level sweeps.

pub mod index;
pub mod props;
pub mod regulator;
pub mod sweep;

use serde::Serialize;
use thiserror::Error;

use crate::mfield::FieldError;
use crate::quadratic::{NormSignature, QuadError};
use crate::theorems::{analyze_with, AnalyzeOptions, TheoremError};

pub use index::{check_pair_index, index_pairs, run_index, verify_index, IndexCheck};
pub use regulator::{regulator, regulator_ratio, RegulatorMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl From<QuadError> for VerifyError {
    fn from(e: QuadError) -> Self {
        VerifyError::Theorem(e.into())
    }
}

/// Outcome of one property over a range of inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub scope: String,
    pub tested: usize,
    pub violations: Vec<String>,
}

impl Check {
    pub fn new(name: &str, scope: String) -> Check {
        Check { name: name.to_string(), scope, tested: 0, violations: Vec::new() }
    }

    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.tested += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Primes ≡ 1 (mod 4) below `bound`.
pub fn primes_1mod4(bound: u64) -> Vec<u64> {
    crate::arith::primes_below(bound).into_iter().filter(|p| p % 4 == 1).collect()
}

/// Unordered pairs `p < q` of primes ≡ 1 (mod 4) below `bound`.
pub fn pairs_below(bound: u64) -> Vec<(u64, u64)> {
    let ps = primes_1mod4(bound);
    let mut out = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        for &q in &ps[i + 1..] {
            out.push((p, q));
        }
    }
    out
}

/// Reference rows: pair, norm signature and q(K).
pub const TABLE1: [(u64, u64, [i8; 4], u64); 10] = [
    (89, 73, [1, 1, 1, 1], 32),
    (193, 97, [1, 1, 1, 1], 32),
    (41, 13, [-1, -1, -1, -1], 16),
    (41, 29, [-1, -1, -1, -1], 32),
    (457, 41, [-1, -1, -1, -1], 16),
    (457, 113, [-1, -1, -1, -1], 32),
    (97, 17, [1, 1, -1, 1], 32),
    (281, 17, [1, 1, -1, 1], 16),
    (41, 73, [-1, 1, 1, 1], 32),
    (41, 337, [-1, 1, 1, 1], 16),
];

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub pair: [u64; 2],
    pub expected_signature: [i8; 4],
    #[serde(rename = "expected_qK")]
    pub expected_q: u64,
    pub signature: Option<[i8; 4]>,
    #[serde(rename = "qK")]
    pub q: Option<u64>,
    pub case: Option<String>,
    pub pass: bool,
    /// The full report of a failing row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn run_table1(opts: &AnalyzeOptions) -> Vec<Table1Row> {
    use rayon::prelude::*;
    TABLE1
        .par_iter()
        .map(|&(p1, p2, sig, q)| {
            let mut row = Table1Row {
                pair: [p1, p2],
                expected_signature: sig,
                expected_q: q,
                signature: None,
                q: None,
                case: None,
                pass: false,
                report: None,
                error: None,
            };
            match analyze_with(p1, p2, opts) {
                Ok(r) => {
                    row.signature = Some(r.signature.as_array());
                    row.q = Some(r.q_k);
                    row.case = Some(r.case.to_string());
                    row.pass = r.signature == NormSignature::from_array(sig) && r.q_k == q;
                    if !row.pass {
                        row.report = serde_json::to_value(&r).ok();
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_enumeration() {
        assert_eq!(pairs_below(14), vec![(5, 13)]);
        assert_eq!(primes_1mod4(40), vec![5, 13, 17, 29, 37]);
    }

    #[test]
    fn table_rows() {
        let rows = run_table1(&AnalyzeOptions::default());
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
    }
}
