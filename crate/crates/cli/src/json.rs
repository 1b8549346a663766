//! JSON encodings. `serde_json::Map` is ordered by key, so every object
//! below serializes with sorted keys and identical bytes for identical
//! inputs.

use ncmckay_core::endo::EndoElement;
use ncmckay_core::scheme::{Bidegree, Bounds, DivisorData, SheafHom, SliceReport};
use ncmckay_core::suite::CheckReport;
use serde_json::{json, Value};

use crate::config::Settings;

pub fn bounds(b: &Bounds) -> Value {
    json!({ "t": b.t, "xy": b.xy })
}

fn bidegree(b: Bidegree) -> Value {
    json!({ "principal": b.principal, "weight": b.weight })
}

pub fn divisor(d: &DivisorData) -> Value {
    json!(d.as_slice())
}

pub fn sheaf_hom(h: &SheafHom) -> Value {
    json!({
        "components": h.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "source_d": divisor(h.source()),
        "target_d": divisor(h.target()),
    })
}

pub fn endo(a: &EndoElement) -> Value {
    let blocks: Vec<Value> = a.blocks().map(|(&(i, j), h)| json!({ "hom": sheaf_hom(h), "i": i, "j": j })).collect();
    json!({ "blocks": blocks, "n": a.n() })
}

pub fn check(r: &CheckReport) -> Value {
    json!({
        "claim": r.claim,
        "detail": r.detail,
        "name": r.name,
        "passed": r.passed,
        "suite": r.suite.name(),
    })
}

pub fn verify_report(s: &Settings, suites: &[&str], reports: &[CheckReport]) -> Value {
    let failures = reports.iter().filter(|r| !r.passed).count();
    json!({
        "checks": reports.iter().map(check).collect::<Vec<_>>(),
        "failures": failures,
        "n": s.n,
        "params": {
            "bounds": bounds(&s.bounds),
            "deg": s.deg,
            "samples": s.samples,
            "seed": s.seed,
        },
        "passed": failures == 0,
        "suites": suites,
    })
}

pub fn hom_slice(b: Bidegree, dim: usize) -> Value {
    json!({ "dim": dim, "slice": bidegree(b) })
}

pub fn ext1_slice(r: &SliceReport) -> Value {
    json!({
        "exact": r.exact,
        "h1": r.h1_dim,
        "hom": r.hom_dim,
        "slice": bidegree(r.bidegree),
        "stable": r.stable,
    })
}

/// Pretty-printed with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
