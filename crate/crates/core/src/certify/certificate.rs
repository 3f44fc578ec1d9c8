use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::params::ParameterBox;
use super::verify::{
    check_iterative_hypotheses, verify_eps_zero, verify_intercept_order, verify_row_orders,
    verify_slope_order, EpsZeroReport, HypothesisReport, Margin, SlopeMargin,
};
use super::CertifyError;
use crate::exactnum::{rat, ratio_text, Interval, Rational};
use crate::omatrix::{affine_upper_bound, enumerate_bounded_faces, serialize_omatrix, OMatrix};

pub const CERTIFICATE_FORMAT: &str = "kobon-realization-certificate";
pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Verified,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsThresholds {
    #[serde(with = "ratio_text")]
    pub half_reciprocal: Rational,
    pub eps_hi_below_half_reciprocal: bool,
    #[serde(with = "ratio_text")]
    pub reciprocal: Rational,
    pub eps_hi_below_reciprocal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusSummary {
    pub triangles: usize,
    pub bound: Option<u64>,
    pub touching_distinguished: usize,
    pub unused_segments: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format: String,
    pub version: u32,
    pub target_sha256: String,
    pub box_sha256: String,
    pub target: OMatrix,
    pub parameter_box: ParameterBox,
    pub distinguished_line: usize,
    pub intercept_labels: Vec<String>,
    pub eps_interval: Interval,
    pub eps_thresholds: EpsThresholds,
    pub intercept_order: Vec<Margin>,
    pub row_orders: Vec<Margin>,
    pub slope_order: Vec<SlopeMargin>,
    pub eps_zero: Option<EpsZeroReport>,
    pub hypotheses: HypothesisReport,
    pub census: CensusSummary,
    pub failures: Vec<String>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn row_margin_count(&self) -> usize {
        self.row_orders.len()
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn target_hash(target: &OMatrix) -> String {
    sha256_hex(serialize_omatrix(target).as_bytes())
}

pub fn box_hash(b: &ParameterBox) -> String {
    sha256_hex(serde_json::to_string(b).expect("box serializes").as_bytes())
}

fn record<T>(failures: &mut Vec<String>, stage: &str, r: Result<Vec<T>, CertifyError>) -> Vec<T> {
    r.unwrap_or_else(|e| {
        failures.push(format!("{stage}: {e}"));
        Vec::new()
    })
}

/// Runs every check and records the outcome, passing or not.
pub fn emit_certificate(b: &ParameterBox, target: &OMatrix) -> Result<Certificate, CertifyError> {
    b.validate()?;
    if target.n() != b.line_count() {
        return Err(CertifyError::Config(format!(
            "target has {} lines, box describes {}",
            target.n(),
            b.line_count()
        )));
    }
    let mut failures = Vec::new();
    let intercept_order = record(&mut failures, "intercept order", verify_intercept_order(b, target));
    let slope_order = record(&mut failures, "slope order", verify_slope_order(b));
    let row_orders = if failures.is_empty() {
        record(&mut failures, "row order", verify_row_orders(b, target))
    } else {
        Vec::new()
    };
    let eps_zero = if failures.is_empty() {
        match verify_eps_zero(b, target) {
            Ok(r) => Some(r),
            Err(e) => {
                failures.push(format!("eps = 0: {e}"));
                None
            }
        }
    } else {
        None
    };

    let n = b.n as i64;
    let half = rat(1, 2 * n.max(1));
    let whole = rat(1, n.max(1));
    let eps_thresholds = EpsThresholds {
        eps_hi_below_half_reciprocal: b.eps_hi < half,
        half_reciprocal: half,
        eps_hi_below_reciprocal: b.eps_hi < whole,
        reciprocal: whole,
    };
    let census = enumerate_bounded_faces(target);
    let verdict = if failures.is_empty() { Verdict::Verified } else { Verdict::Failed };
    Ok(Certificate {
        format: CERTIFICATE_FORMAT.to_string(),
        version: CERTIFICATE_VERSION,
        target_sha256: target_hash(target),
        box_sha256: box_hash(b),
        target: target.clone(),
        parameter_box: b.clone(),
        distinguished_line: 0,
        intercept_labels: b
            .intercepts
            .iter()
            .enumerate()
            .map(|(i, s)| format!("L{}: {s}", i + 1))
            .collect(),
        eps_interval: b.eps_interval(),
        eps_thresholds,
        intercept_order,
        row_orders,
        slope_order,
        eps_zero,
        hypotheses: check_iterative_hypotheses(b, target),
        census: CensusSummary {
            triangles: census.triangles,
            bound: affine_upper_bound(target.n() as u64).ok(),
            touching_distinguished: census.touching.get(&0).copied().unwrap_or(0),
            unused_segments: census.unused_segments.len(),
        },
        failures,
        verdict,
    })
}

fn regenerated(target: &OMatrix, b: &ParameterBox) -> Result<Value, CertifyError> {
    static CACHE: OnceLock<Mutex<HashMap<(String, String), Value>>> = OnceLock::new();
    let key = (target_hash(target), box_hash(b));
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let cert = emit_certificate(b, target)?;
    let v = serde_json::to_value(&cert).expect("certificate serializes");
    cache.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

fn first_difference(path: &str, given: &Value, fresh: &Value) -> Option<String> {
    match (given, fresh) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, vb) in b {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match a.get(k) {
                    None => return Some(p),
                    Some(va) => {
                        if let Some(d) = first_difference(&p, va, vb) {
                            return Some(d);
                        }
                    }
                }
            }
            a.keys()
                .find(|k| !b.contains_key(*k))
                .map(|k| if path.is_empty() { k.clone() } else { format!("{path}.{k}") })
        }
        (Value::Array(a), Value::Array(b)) => {
            for (i, (va, vb)) in a.iter().zip(b).enumerate() {
                if let Some(d) = first_difference(&format!("{path}[{i}]"), va, vb) {
                    return Some(d);
                }
            }
            (a.len() != b.len()).then(|| path.to_string())
        }
        _ => (given != fresh).then(|| path.to_string()),
    }
}

/// Re-derives the certificate from its embedded target and box and demands
/// an exact match, field by field.
pub fn recheck_certificate(text: &str) -> Result<Verdict, CertifyError> {
    let given: Value =
        serde_json::from_str(text).map_err(|e| CertifyError::Malformed(e.to_string()))?;
    let tamper = |field: &str| CertifyError::TamperDetected { field: field.to_string() };
    let target: OMatrix = given
        .get("target")
        .cloned()
        .and_then(|v| serde_json::from_value(v).ok())
        .ok_or_else(|| tamper("target"))?;
    let b: ParameterBox = given
        .get("parameter_box")
        .cloned()
        .and_then(|v| serde_json::from_value(v).ok())
        .ok_or_else(|| tamper("parameter_box"))?;
    if given.get("target_sha256").and_then(Value::as_str) != Some(target_hash(&target).as_str()) {
        return Err(tamper("target_sha256"));
    }
    if given.get("box_sha256").and_then(Value::as_str) != Some(box_hash(&b).as_str()) {
        return Err(tamper("box_sha256"));
    }
    let fresh = regenerated(&target, &b).map_err(|_| tamper("parameter_box"))?;
    if let Some(field) = first_difference("", &given, &fresh) {
        return Err(CertifyError::TamperDetected { field });
    }
    let cert: Certificate = serde_json::from_value(fresh).expect("regenerated certificate parses");
    Ok(cert.verdict)
}
