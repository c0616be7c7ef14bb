//! JSON input and output.
//!
//! Coefficients are written as `{"re", "im"}` in float mode and as decimal
//! strings `{"re_num", "re_den", "im_num", "im_den"}` in exact mode. Input
//! terms may use either form.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::PotentialJet;
use crate::jet::{Jet, JetMatrix, MultiIndex};
use crate::recursion::CoefficientSequence;
use crate::scalar::{Coefficient, GaussianRational};
use crate::twisted::BundleMetricJet;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Coefficients with a JSON form.
pub trait JsonCoefficient: Coefficient {
    fn write_fields(&self, out: &mut Map<String, Value>);
}

impl JsonCoefficient for GaussianRational {
    fn write_fields(&self, out: &mut Map<String, Value>) {
        out.insert("re_num".into(), self.re.numer().to_string().into());
        out.insert("re_den".into(), self.re.denom().to_string().into());
        out.insert("im_num".into(), self.im.numer().to_string().into());
        out.insert("im_den".into(), self.im.denom().to_string().into());
    }
}

impl JsonCoefficient for Complex64 {
    fn write_fields(&self, out: &mut Map<String, Value>) {
        out.insert("re".into(), self.re.into());
        out.insert("im".into(), self.im.into());
    }
}

/// Scalar value as a plain JSON number (real part) when it is real, or `[re, im]`.
pub fn coefficient_value<C: Coefficient>(c: &C) -> Value {
    let z = c.to_c64();
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

pub fn coefficient_json<C: JsonCoefficient>(c: &C) -> Value {
    let mut m = Map::new();
    c.write_fields(&mut m);
    Value::Object(m)
}

/// `{"num_vars", "trunc_degree", "terms": [{"exponents", …coefficient}]}`.
pub fn jet_json<C: JsonCoefficient>(jet: &Jet<C>) -> Value {
    let terms: Vec<Value> = jet
        .terms()
        .map(|(k, c)| {
            let mut m = Map::new();
            m.insert("exponents".into(), json!(k.exponents(jet.num_vars())));
            c.write_fields(&mut m);
            Value::Object(m)
        })
        .collect();
    json!({
        "num_vars": jet.num_vars(),
        "trunc_degree": jet.trunc_degree(),
        "terms": terms,
    })
}

pub fn matrix_json<C: JsonCoefficient>(m: &JetMatrix<C>) -> Value {
    let mut entries = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            entries.push(json!({"i": i, "j": j, "jet": jet_json(m.get(i, j))}));
        }
    }
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

/// Serialized coefficient sequence; `b_m` is a jet in `(x, z)`, read at `z = x̄`
/// for its diagonal values.
pub fn sequence_json<C: JsonCoefficient>(seq: &CoefficientSequence<C>, degree: u32) -> Value {
    let b: Vec<Value> = seq
        .b
        .iter()
        .enumerate()
        .map(|(m, bm)| {
            json!({
                "m": m,
                "valid_degree": seq.valid_degrees[m],
                "value": if seq.rank == 1 { jet_json(bm.get(0, 0)) } else { matrix_json(bm) },
            })
        })
        .collect();
    let base: Vec<Value> = seq
        .base_values()
        .iter()
        .map(|vals| {
            if seq.rank == 1 {
                coefficient_value(&vals[0])
            } else {
                Value::Array(vals.iter().map(coefficient_value).collect())
            }
        })
        .collect();
    let base_exact: Vec<Value> = seq
        .base_values()
        .iter()
        .map(|vals| Value::Array(vals.iter().map(coefficient_json).collect()))
        .collect();
    json!({
        "n": seq.dim,
        "N": seq.order(),
        "rank": seq.rank,
        "degree": degree,
        "mode": C::MODE,
        "variables": "(x_1..x_n, z_1..z_n); diagonal values at z = conj(x)",
        "valid_degrees": seq.valid_degrees,
        "base_values": base,
        "base_coefficients": base_exact,
        "b": b,
    })
}

/// Wraps a result with the crate version and the producing configuration.
pub fn envelope(config: Value, result: Value) -> Value {
    json!({"version": VERSION, "config": config, "result": result})
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntText {
    Int(i64),
    Text(String),
}

impl IntText {
    fn to_big(&self, path: &str) -> Result<BigInt> {
        match self {
            IntText::Int(v) => Ok(BigInt::from(*v)),
            IntText::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{path}: `{s}` is not an integer"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSpec {
    x_exp: Vec<u32>,
    xbar_exp: Vec<u32>,
    re: Option<f64>,
    im: Option<f64>,
    re_num: Option<IntText>,
    re_den: Option<IntText>,
    im_num: Option<IntText>,
    im_den: Option<IntText>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    dimension: usize,
    terms: Vec<TermSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleEntry {
    i: usize,
    j: usize,
    terms: Vec<TermSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    dimension: usize,
    rank: usize,
    entries: Vec<BundleEntry>,
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn rational_part(
    num: &Option<IntText>,
    den: &Option<IntText>,
    float: Option<f64>,
    path: &str,
) -> Result<Option<BigRational>> {
    match (num, den) {
        (Some(n), d) => {
            let d = match d {
                Some(d) => d.to_big(path)?,
                None => BigInt::one(),
            };
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("{path}: zero denominator")));
            }
            if float.is_some() {
                return Err(Error::InvalidInput(format!(
                    "{path}: give either a float or a rational value, not both"
                )));
            }
            Ok(Some(BigRational::new(n.to_big(path)?, d)))
        }
        (None, Some(_)) => Err(Error::InvalidInput(format!("{path}: denominator without numerator"))),
        (None, None) => Ok(None),
    }
}

fn term_coefficient<C: Coefficient>(t: &TermSpec, path: &str) -> Result<C> {
    let re_q = rational_part(&t.re_num, &t.re_den, t.re, &format!("{path}.re"))?;
    let im_q = rational_part(&t.im_num, &t.im_den, t.im, &format!("{path}.im"))?;
    for v in [t.re, t.im].into_iter().flatten() {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("{path}: non-finite coefficient")));
        }
    }
    if re_q.is_some() || im_q.is_some() {
        let re = match re_q {
            Some(q) => q,
            None => approx_part::<C>(t.re.unwrap_or(0.0)),
        };
        let im = match im_q {
            Some(q) => q,
            None => approx_part::<C>(t.im.unwrap_or(0.0)),
        };
        return Ok(C::from_big_ratio(&re, &im));
    }
    Ok(C::from_c64(Complex64::new(t.re.unwrap_or(0.0), t.im.unwrap_or(0.0))))
}

fn approx_part<C: Coefficient>(x: f64) -> BigRational {
    let q = GaussianRational::from_c64(Complex64::new(x, 0.0));
    if C::EXACT {
        q.re
    } else {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }
}

fn terms_to_jet<C: Coefficient>(terms: &[TermSpec], n: usize, degree: u32, path: &str) -> Result<Jet<C>> {
    let mut jet = Jet::zero(2 * n, degree);
    for (idx, t) in terms.iter().enumerate() {
        let p = format!("{path}[{idx}]");
        if t.x_exp.len() != n || t.xbar_exp.len() != n {
            return Err(Error::InvalidInput(format!(
                "{p}: exponent vectors must have length {n}"
            )));
        }
        let mut exps = t.x_exp.clone();
        exps.extend_from_slice(&t.xbar_exp);
        if exps.iter().any(|&e| e > 31) {
            return Err(Error::InvalidInput(format!("{p}: exponent exceeds 31")));
        }
        let c: C = term_coefficient(t, &p)?;
        jet.add_term(MultiIndex::from_exponents(&exps), &c);
    }
    Ok(jet)
}

/// Potential from `{"dimension", "terms": [{"x_exp", "xbar_exp", …}]}`,
/// truncated at `degree`.
pub fn parse_potential<C: Coefficient>(text: &str, degree: u32) -> Result<PotentialJet<C>> {
    let file: PotentialFile = parse_json(text)?;
    if file.dimension == 0 || file.dimension > 6 {
        return Err(Error::InvalidInput(format!(
            "dimension must be between 1 and 6, got {}",
            file.dimension
        )));
    }
    let phi = terms_to_jet(&file.terms, file.dimension, degree, "terms")?;
    PotentialJet::new(file.dimension, phi)
}

/// Bundle metric from `{"dimension", "rank", "entries": [{"i", "j", "terms"}]}`.
/// Missing entries are zero.
pub fn parse_bundle<C: Coefficient>(text: &str, degree: u32) -> Result<BundleMetricJet<C>> {
    let file: BundleFile = parse_json(text)?;
    let (n, r) = (file.dimension, file.rank);
    if n == 0 || n > 6 || r == 0 {
        return Err(Error::InvalidInput("dimension must be 1..=6 and rank positive".into()));
    }
    let mut entries = vec![Jet::zero(2 * n, degree); r * r];
    for (idx, e) in file.entries.iter().enumerate() {
        if e.i >= r || e.j >= r {
            return Err(Error::InvalidInput(format!(
                "entries[{idx}]: index ({}, {}) out of range for rank {r}",
                e.i, e.j
            )));
        }
        let jet = terms_to_jet(&e.terms, n, degree, &format!("entries[{idx}].terms"))?;
        entries[e.i * r + e.j] = &entries[e.i * r + e.j] + &jet;
    }
    BundleMetricJet::new(n, JetMatrix::new(r, r, entries)?)
}

/// Potential file for a jet in `(x, x̄)`.
pub fn potential_json<C: JsonCoefficient>(phi: &PotentialJet<C>) -> Value {
    let n = phi.dim();
    let terms: Vec<Value> = phi
        .phi()
        .terms()
        .map(|(k, c)| {
            let e = k.exponents(2 * n);
            let mut m = Map::new();
            m.insert("x_exp".into(), json!(e[..n]));
            m.insert("xbar_exp".into(), json!(e[n..]));
            c.write_fields(&mut m);
            Value::Object(m)
        })
        .collect();
    json!({"dimension": n, "terms": terms})
}
