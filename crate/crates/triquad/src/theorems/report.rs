//! The full per-pair report and the pipeline that produces it.

use serde::Serialize;

use super::cases::{canonical_order, synthesize_fsu, CaseId, Resolution, Synthesis, Theorem};
use super::conditions::{evaluate, Conditions};
use super::word::{NamedWord, PairContext};
use super::TheoremError;
use crate::quadratic::{h2_lemma, norm_signature, ClassNumber2, NormSignature, QuadDescriptor, QuadError, ORACLE_BOUND};
use crate::quadratic::h2::h2_oracle;

/// Exponent v in the class number formula for a degree-8 multiquadratic field.
pub const WADA_V: u32 = 9;

/// Torsion of L = K(√−1), recorded symbolically.
pub const TORSION_L: &str = "ζ8";

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    /// Largest discriminant handed to the form oracle.
    pub oracle_bound: u64,
    /// Also run the oracle when a lemma rule already gives the value.
    pub cross_check: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { oracle_bound: ORACLE_BOUND, cross_check: true }
    }
}

/// One quadratic 2-class number with both of its sources.
#[derive(Debug, Clone, Serialize)]
pub struct H2Input {
    pub d: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<ClassNumber2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<ClassNumber2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub schema: u32,
    /// The pair as given.
    pub pair: [u64; 2],
    /// The ordering the case applies to.
    pub canonical_pair: [u64; 2],
    pub mod8: [u64; 2],
    /// Norm signature in the given order.
    pub signature: NormSignature,
    pub case: CaseId,
    pub case_label: String,
    /// The canonical ordering needed a first prime ≡ 5 (mod 8).
    pub relaxed_order: bool,
    pub conditions: Conditions,
    pub generators: Vec<NamedWord>,
    #[serde(rename = "qK")]
    pub q_k: u64,
    pub h2_inputs: Vec<H2Input>,
    #[serde(rename = "h2K")]
    pub h2_k: Option<u64>,
    #[serde(rename = "h2K_trace")]
    pub h2_k_trace: Option<String>,
    pub delta: u8,
    #[serde(rename = "qL")]
    pub q_l: u64,
    #[serde(rename = "torsionL")]
    pub torsion_l: &'static str,
    #[serde(rename = "h2L")]
    pub h2_l: Option<u64>,
    #[serde(rename = "h2L_trace")]
    pub h2_l_trace: Option<String>,
    pub resolved_by_search: bool,
    pub resolution: Option<Resolution>,
    pub notes: Vec<String>,
}

impl CaseReport {
    pub fn h2_of(&self, d: u64) -> Option<u64> {
        self.h2_inputs.iter().find(|h| h.d == d).and_then(|h| h.value)
    }
}

fn descriptors(p1: u64, p2: u64) -> [QuadDescriptor; 7] {
    [
        QuadDescriptor::Two,
        QuadDescriptor::Prime(p1),
        QuadDescriptor::Prime(p2),
        QuadDescriptor::TwicePrime(p1),
        QuadDescriptor::TwicePrime(p2),
        QuadDescriptor::PrimePair(p1, p2),
        QuadDescriptor::TwicePrimePair(p1, p2),
    ]
}

fn oracle_or_none(d: i64, bound: u64) -> Result<Option<ClassNumber2>, TheoremError> {
    match h2_oracle(d, bound) {
        Ok(v) => Ok(Some(v)),
        Err(QuadError::AboveOracleBound { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Lemma and oracle values for the seven quadratic subfields; a
/// disagreement is an inconsistency.
pub fn h2_inputs(p1: u64, p2: u64, opts: &AnalyzeOptions) -> Result<Vec<H2Input>, TheoremError> {
    let mut out = Vec::with_capacity(7);
    for desc in descriptors(p1, p2) {
        let d = desc.radicand();
        let lemma = h2_lemma(desc);
        let oracle = if lemma.is_none() || opts.cross_check {
            oracle_or_none(d as i64, opts.oracle_bound)?
        } else {
            None
        };
        if let (Some(l), Some(o)) = (&lemma, &oracle) {
            if l.value != o.value {
                return Err(TheoremError::Inconsistency(format!(
                    "h2({d}): rule gives {}, forms give {}",
                    l.value, o.value
                )));
            }
        }
        let value = lemma.or(oracle).map(|c| c.value);
        out.push(H2Input { d, lemma, oracle, value });
    }
    Ok(out)
}

/// `h2(K) = q(K)·Π h2(k)/2^9`, with its trace.
pub fn h2_k(q_k: u64, subfield_h2: &[u64]) -> Result<(u64, String), TheoremError> {
    let prod: u64 = subfield_h2.iter().product();
    let num = q_k * prod;
    let den = 1u64 << WADA_V;
    let factors: Vec<String> = subfield_h2.iter().map(|h| h.to_string()).collect();
    if num % den != 0 || num == 0 {
        return Err(TheoremError::Inconsistency(format!(
            "h2(K) = {q_k}·{}/2^{WADA_V} is not an integer",
            factors.join("·")
        )));
    }
    let v = num / den;
    Ok((v, format!("h2(K) = 2^{}·{}/2^{WADA_V} = {v}", q_k.trailing_zeros(), factors.join("·"))))
}

/// `h2(L) = h2(p1p2)·h2(2p1p2)·h2(−p1p2)·h2(−2p1p2)/2^(5−δ)` for pairs
/// of primes both ≡ 5 (mod 8).
pub fn h2_l(p1: u64, p2: u64, delta: u8, real: [u64; 2], opts: &AnalyzeOptions) -> Result<(Option<u64>, String), TheoremError> {
    let d = (p1 * p2) as i64;
    let im1 = oracle_or_none(-d, opts.oracle_bound)?;
    let im2 = oracle_or_none(-2 * d, opts.oracle_bound)?;
    let (Some(im1), Some(im2)) = (im1, im2) else {
        return Ok((None, "imaginary discriminant above the oracle bound".into()));
    };
    let num = real[0] * real[1] * im1.value * im2.value;
    let shift = 5 - delta as u32;
    let den = 1u64 << shift;
    if num % den != 0 {
        return Err(TheoremError::Inconsistency(format!("h2(L) = {num}/2^{shift} is not an integer")));
    }
    let v = num / den;
    Ok((
        Some(v),
        format!("h2(L) = {}·{}·{}·{}/2^{shift} = {v}", real[0], real[1], im1.value, im2.value),
    ))
}

pub fn analyze(p1: u64, p2: u64) -> Result<CaseReport, TheoremError> {
    analyze_with(p1, p2, &AnalyzeOptions::default())
}

/// Classification, generators and 2-class numbers of one pair.
pub fn analyze_with(p1: u64, p2: u64, opts: &AnalyzeOptions) -> Result<CaseReport, TheoremError> {
    let (a, b, swapped, theorem, item, relaxed) = canonical_order(p1, p2)?;
    let signature = norm_signature(p1, p2)?;
    let pc = PairContext::new(a, b)?;
    let conditions = evaluate(&pc)?;
    let Synthesis { case, generators, q_exp, resolution, mut notes } = synthesize_fsu(&pc, theorem, item, swapped, &conditions)?;
    if relaxed {
        notes.push(format!("no ordering with first prime ≡ 1 (mod 8) matches; using ({a},{b})"));
    }
    let q_k = 1u64 << q_exp;
    let inputs = h2_inputs(a, b, opts)?;
    let values: Option<Vec<u64>> = inputs.iter().map(|h| h.value).collect();
    let (h2k, h2k_trace) = match &values {
        Some(v) => {
            let (h, t) = h2_k(q_k, v)?;
            (Some(h), Some(t))
        }
        None => {
            notes.push("some subfield 2-class number is above the oracle bound".into());
            (None, None)
        }
    };
    let h_pq = inputs[5].value;
    if theorem == Theorem::MT1A {
        if let (Some(h), Some(hpq)) = (h2k, h_pq) {
            // Items 1 and 2 give half of h2(p1p2); the nested system of item 3 gives all of it.
            let expected = if q_exp == 5 { Some(hpq) } else { (hpq % 2 == 0).then_some(hpq / 2) };
            if expected != Some(h) {
                return Err(TheoremError::Inconsistency(format!("h2(K) = {h} against h2({}) = {hpq}", a * b)));
            }
        }
    }
    let delta = (q_exp - 4) as u8;
    let q_l = 1u64 << (5 + delta);
    let (h2l, h2l_trace) = if a % 8 == 5 && b % 8 == 5 {
        match (inputs[5].value, inputs[6].value) {
            (Some(x), Some(y)) => {
                let (v, t) = h2_l(a, b, delta, [x, y], opts)?;
                (v, Some(t))
            }
            _ => (None, None),
        }
    } else {
        (None, None)
    };
    let generators = generators.iter().map(|g| pc.named(g)).collect();
    Ok(CaseReport {
        schema: 1,
        pair: [p1, p2],
        canonical_pair: [a, b],
        mod8: [p1 % 8, p2 % 8],
        signature,
        case,
        case_label: case.to_string(),
        relaxed_order: relaxed,
        conditions,
        generators,
        q_k,
        h2_inputs: inputs,
        h2_k: h2k,
        h2_k_trace: h2k_trace,
        delta,
        q_l,
        torsion_l: TORSION_L,
        h2_l: h2l,
        h2_l_trace: h2l_trace,
        resolved_by_search: resolution.is_some(),
        resolution,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_number_formula() {
        assert_eq!(h2_k(32, &[1, 1, 1, 2, 2, 2, 4]).unwrap().0, 2);
        assert_eq!(h2_k(16, &[1, 1, 1, 2, 2, 2, 4]).unwrap().0, 1);
        assert!(h2_k(16, &[1, 1, 1, 1, 2, 2, 4]).is_err());
    }

    #[test]
    fn reference_pairs() {
        for (p1, p2, q) in [(41u64, 13u64, 16u64), (41, 29, 32), (89, 73, 32), (281, 17, 16)] {
            let r = analyze(p1, p2).unwrap();
            assert_eq!(r.q_k, q, "({p1},{p2})");
            assert!(r.h2_k.is_some());
            assert_eq!(r.q_l, 2 * q);
        }
    }

    #[test]
    fn five_mod_eight_pairs() {
        let r = analyze(13, 5).unwrap();
        assert_eq!(r.case.theorem, Theorem::MT1A);
        assert!(r.h2_l.is_some());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["schema"], 1);
        assert!(json["qK"].is_u64());
    }

    #[test]
    fn bad_input() {
        assert_eq!(analyze(41, 41).unwrap_err().exit_code(), 2);
        assert_eq!(analyze(7, 13).unwrap_err().exit_code(), 2);
    }
}
