//! The dispatched q(K) against index found by saturating the quadratic units.

use triquad::theorems::{analyze, PairContext};
use triquad::verify::index::saturation_index;
use triquad::verify::pairs_below;

#[test]
fn dispatch_matches_saturation() {
    let mut bad = Vec::new();
    for (p, q) in pairs_below(150) {
        let r = analyze(p, q).unwrap();
        let [a, b] = r.canonical_pair;
        let s = saturation_index(&PairContext::new(a, b).unwrap()).unwrap();
        if s != r.q_k {
            bad.push((p, q, r.case.to_string(), r.q_k, s));
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn ordering_does_not_change_index() {
    for (p, q) in pairs_below(120) {
        assert_eq!(analyze(p, q).unwrap().q_k, analyze(q, p).unwrap().q_k, "({p},{q})");
    }
}
