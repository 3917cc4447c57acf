//! Serializable result shapes and their JSON / CSV renderings.

use serde::Serialize;

use crate::{Method, VerifyResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inputs {
    pub weights: String,
    #[serde(rename = "L")]
    pub width: Option<i64>,
    #[serde(rename = "N")]
    pub walkers: usize,
    pub t: u32,
    pub yi: Vec<i64>,
    pub yf: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyInputs {
    pub weights: String,
    #[serde(rename = "L")]
    pub width: i64,
    #[serde(rename = "N")]
    pub walkers: usize,
    pub t: u32,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yi: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub yf: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralValue {
    pub re: f64,
    pub im: f64,
    /// Relative error against the exact value.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueResult {
    pub method: Method,
    pub inputs: Inputs,
    /// Exact value as `"p/q"`; for `spectral` this is the exact reference.
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_wall: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    error: ErrorDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ErrorDetail {
    kind: String,
    message: String,
}

impl ErrorBody {
    pub fn new(kind: &str, message: String) -> Self {
        ErrorBody {
            error: ErrorDetail {
                kind: kind.to_string(),
                message,
            },
        }
    }
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s
}

fn heights(h: &[i64]) -> String {
    h.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn method_name(m: Method) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// One header line and one data line. Heights are space separated.
pub fn value_csv(r: &ValueResult) -> String {
    let width = r.inputs.width.map(|w| w.to_string()).unwrap_or_default();
    let (re, im, residual) = match r.spectral {
        Some(s) => (s.re.to_string(), s.im.to_string(), s.residual.to_string()),
        None => Default::default(),
    };
    let mut out = String::from("method,L,N,t,yi,yf,value,re,im,residual\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        method_name(r.method),
        width,
        r.inputs.walkers,
        r.inputs.t,
        heights(&r.inputs.yi),
        heights(&r.inputs.yf),
        r.value.as_deref().unwrap_or(""),
        re,
        im,
        residual
    ));
    out
}

/// One line per checked relation.
pub fn verify_csv(r: &VerifyResult) -> String {
    let mut out = String::from("relation,max_residual,passed\n");
    out.push_str(&format!(
        "exact_agreement,{},{}\n",
        r.mismatches.len(),
        r.all_equal
    ));
    let tol = r.inputs.tolerance;
    let mut line = |name: &str, value: f64| {
        out.push_str(&format!("{name},{value:e},{}\n", value <= tol));
    };
    line("spectral_relative_error", r.spectral.max_relative_error);
    line("spectral_imaginary", r.spectral.max_imaginary);
    if let Some(b) = &r.spectral.bethe {
        for rel in &b.relations {
            line(rel.relation, rel.max_residual);
        }
    }
    out
}
