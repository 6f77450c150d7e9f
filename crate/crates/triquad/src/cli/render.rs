//! CSV rows and plain-text layouts.

use std::fmt::Write;

use serde::Serialize;

use crate::theorems::CaseReport;

pub const CSV_HEADER: &str = "p1,p2,p1mod8,p2mod8,n1,n2,n3,n4,case,qK,h2K,qL,h2L,resolved_by_search";

/// The per-pair summary emitted by `scan`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub p1: u64,
    pub p2: u64,
    pub p1mod8: u64,
    pub p2mod8: u64,
    pub n1: i8,
    pub n2: i8,
    pub n3: i8,
    pub n4: i8,
    pub case: String,
    #[serde(rename = "qK")]
    pub q_k: u64,
    #[serde(rename = "h2K")]
    pub h2_k: Option<u64>,
    #[serde(rename = "qL")]
    pub q_l: u64,
    #[serde(rename = "h2L")]
    pub h2_l: Option<u64>,
    pub resolved_by_search: bool,
}

impl ScanRow {
    pub fn from_report(r: &CaseReport) -> ScanRow {
        let s = r.signature;
        ScanRow {
            p1: r.pair[0],
            p2: r.pair[1],
            p1mod8: r.mod8[0],
            p2mod8: r.mod8[1],
            n1: s.n1,
            n2: s.n2,
            n3: s.n3,
            n4: s.n4,
            case: r.case.short(),
            q_k: r.q_k,
            h2_k: r.h2_k,
            q_l: r.q_l,
            h2_l: r.h2_l,
            resolved_by_search: r.resolved_by_search,
        }
    }

    pub fn csv(&self) -> String {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p1,
            self.p2,
            self.p1mod8,
            self.p2mod8,
            self.n1,
            self.n2,
            self.n3,
            self.n4,
            self.case,
            self.q_k,
            opt(self.h2_k),
            self.q_l,
            opt(self.h2_l),
            self.resolved_by_search
        )
    }
}

fn opt(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

pub fn text_report(r: &CaseReport) -> String {
    let mut s = String::new();
    let [p1, p2] = r.pair;
    let [a, b] = r.canonical_pair;
    let sig = r.signature.as_array();
    let _ = writeln!(s, "K = Q(√2, √{p1}, √{p2})   residues mod 8: {}, {}", r.mod8[0], r.mod8[1]);
    let _ = writeln!(s, "norm signature: ({}, {}, {}, {})", sig[0], sig[1], sig[2], sig[3]);
    let _ = writeln!(s, "case: {} on ({a}, {b})", r.case_label);
    let _ = writeln!(s, "fundamental system of units:");
    for g in &r.generators {
        let _ = writeln!(s, "  {g}");
    }
    let _ = writeln!(s, "qK = {}   h2K = {}", r.q_k, opt(r.h2_k));
    let _ = writeln!(s, "qL = {}   torsion = {}   h2L = {}", r.q_l, r.torsion_l, opt(r.h2_l));
    for t in r.h2_k_trace.iter().chain(r.h2_l_trace.iter()) {
        let _ = writeln!(s, "  {t}");
    }
    if let Some(res) = &r.resolution {
        let _ = writeln!(s, "resolved by search: {}", res.outcome);
    }
    for n in &r.notes {
        let _ = writeln!(s, "note: {n}");
    }
    s
}

pub fn text_table(rows: &[ScanRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>6} {:>6}  mod8  signature        {:<8} {:>4} {:>6} {:>4} {:>6}  search", "p1", "p2", "case", "qK", "h2K", "qL", "h2L");
    for r in rows {
        let sig = format!("({},{},{},{})", r.n1, r.n2, r.n3, r.n4);
        let _ = writeln!(
            s,
            "{:>6} {:>6}  {},{}   {:<16} {:<8} {:>4} {:>6} {:>4} {:>6}  {}",
            r.p1,
            r.p2,
            r.p1mod8,
            r.p2mod8,
            sig,
            r.case,
            r.q_k,
            opt(r.h2_k),
            r.q_l,
            opt(r.h2_l),
            if r.resolved_by_search { "yes" } else { "" }
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_shape() {
        let r = crate::theorems::analyze(41, 73).unwrap();
        let row = ScanRow::from_report(&r);
        assert!(row.csv().starts_with("41,73,1,1,-1,1,1,1,MT3.7,32,"), "{}", row.csv());
        assert_eq!(row.csv().split(',').count(), CSV_HEADER.split(',').count());
    }
}
