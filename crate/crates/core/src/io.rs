//! JSON file formats.
//!
//! Every file names its field as `{"p": 5}` or `{"p": 2, "e": 2, "modulus": [1, 1, 1]}`
//! (modulus low-to-high, monic). A field element is written as the array of
//! its e power-basis coordinates; on input a bare integer is accepted too.
//! Integers may be arbitrarily large (JSON numbers or decimal strings) and are
//! reduced mod p. Unknown keys are rejected everywhere.
//!
//! Output goes through `serde_json::Value`, whose maps are ordered, so keys
//! come out sorted and terms keep their canonical graded-lex order.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::poly::MultiPoly;
use crate::series::{Branch, TruncatedSeries};

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedInput(msg.into())
}

/// Parses JSON text into a typed value, mapping failures to `MalformedInput`
/// with line and column.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| malformed(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<i64>>,
}

fn one() -> u32 {
    1
}

impl FieldSpec {
    pub fn to_field(&self) -> Result<Field> {
        Field::new(self.p, self.e, self.modulus.as_deref())
    }

    pub fn of(field: &Field) -> FieldSpec {
        FieldSpec {
            p: field.p(),
            e: field.e(),
            modulus: field.modulus().map(|m| m.iter().map(|&x| x as i64).collect()),
        }
    }
}

pub fn field_json(field: &Field) -> Value {
    serde_json::to_value(FieldSpec::of(field)).expect("field spec serializes")
}

pub fn field_from_json(v: &Value) -> Result<Field> {
    let spec: FieldSpec = serde_json::from_value(v.clone()).map_err(|e| malformed(format!("field: {e}")))?;
    spec.to_field()
}

fn big_from_json(v: &Value, what: &str) -> Result<BigInt> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        _ => return Err(malformed(format!("{what}: expected an integer, got {v}"))),
    };
    BigInt::from_str(&text).map_err(|_| malformed(format!("{what}: `{text}` is not an integer")))
}

/// Field element from an integer or an array of at most e integers.
pub fn elem_from_json(field: &Field, v: &Value, what: &str) -> Result<FieldElem> {
    let coords: Vec<BigInt> = match v {
        Value::Array(items) => items.iter().map(|x| big_from_json(x, what)).collect::<Result<_>>()?,
        _ => vec![big_from_json(v, what)?],
    };
    if coords.len() > field.e() as usize {
        return Err(malformed(format!("{what}: {} coordinates for a degree-{} field", coords.len(), field.e())));
    }
    let reduced: Vec<i64> = coords.iter().map(|c| field.from_bigint(c).packed() as i64).collect();
    field.from_coeffs(&reduced)
}

pub fn elem_json(field: &Field, x: FieldElem) -> Value {
    json!(field.coeffs(x))
}

fn exps_from_json(v: &Value, len: usize, what: &str) -> Result<Vec<u32>> {
    let items = v.as_array().ok_or_else(|| malformed(format!("{what}: exponent must be an array")))?;
    if items.len() != len {
        return Err(malformed(format!("{what}: exponent has {} entries, expected {len}", items.len())));
    }
    items
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(|| malformed(format!("{what}: bad exponent {x}")))
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRaw {
    e: Value,
    c: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyBody {
    n: usize,
    terms: Vec<TermRaw>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyFile {
    field: Value,
    n: usize,
    terms: Vec<TermRaw>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesFile {
    field: Value,
    n: usize,
    prec: usize,
    terms: Vec<TermRaw>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchFile {
    field: Value,
    poly: PolyBody,
    y0: Value,
    #[serde(default)]
    check_prec: Option<usize>,
}

fn parse_terms(field: &Field, terms: &[TermRaw], len: usize) -> Result<Vec<(Vec<u32>, FieldElem)>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let what = format!("terms[{i}]");
            Ok((exps_from_json(&t.e, len, &what)?, elem_from_json(field, &t.c, &what)?))
        })
        .collect()
}

fn terms_json(field: &Field, terms: impl Iterator<Item = (Vec<u32>, FieldElem)>) -> Value {
    Value::Array(terms.map(|(e, c)| json!({"e": e, "c": elem_json(field, c)})).collect())
}

pub fn poly_from_value(field: &Field, n: usize, terms: &Value) -> Result<MultiPoly> {
    let raw: Vec<TermRaw> = serde_json::from_value(terms.clone()).map_err(|e| malformed(format!("terms: {e}")))?;
    MultiPoly::from_terms(field, n, parse_terms(field, &raw, n + 1)?)
}

/// `{"field", "n", "terms": [{"e": [i1, …, in, j], "c": …}]}`
pub fn poly_from_json(text: &str) -> Result<MultiPoly> {
    let f: PolyFile = parse_json(text)?;
    let field = field_from_json(&f.field)?;
    MultiPoly::from_terms(&field, f.n, parse_terms(&field, &f.terms, f.n + 1)?)
}

fn poly_body(a: &MultiPoly) -> Value {
    json!({
        "n": a.nvars(),
        "terms": terms_json(a.field(), a.terms().map(|(m, c)| (m.as_slice().to_vec(), c))),
    })
}

pub fn poly_to_value(a: &MultiPoly) -> Value {
    let mut v = poly_body(a);
    v["field"] = field_json(a.field());
    v
}

pub fn poly_to_json(a: &MultiPoly) -> String {
    to_json_text(&poly_to_value(a))
}

/// `{"field", "n", "prec", "terms": [{"e": [i1, …, in], "c": …}]}`; terms
/// must have total degree below `prec`.
pub fn import_series(text: &str) -> Result<TruncatedSeries> {
    let f: SeriesFile = parse_json(text)?;
    let field = field_from_json(&f.field)?;
    TruncatedSeries::from_terms(&field, f.n, f.prec, parse_terms(&field, &f.terms, f.n)?)
}

pub fn series_to_value(s: &TruncatedSeries) -> Value {
    json!({
        "field": field_json(s.field()),
        "n": s.nvars(),
        "prec": s.prec(),
        "terms": terms_json(s.field(), s.terms().into_iter()),
    })
}

pub fn series_to_json(s: &TruncatedSeries) -> String {
    to_json_text(&series_to_value(s))
}

/// A branch with its optional relation-check precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSpec {
    pub branch: Branch,
    pub check_prec: Option<usize>,
}

/// `{"field", "poly": {"n", "terms"}, "y0", "check_prec"?}`
pub fn branch_from_json(text: &str) -> Result<BranchSpec> {
    let f: BranchFile = parse_json(text)?;
    let field = field_from_json(&f.field)?;
    let e = MultiPoly::from_terms(&field, f.poly.n, parse_terms(&field, &f.poly.terms, f.poly.n + 1)?)?;
    let y0 = elem_from_json(&field, &f.y0, "y0")?;
    Ok(BranchSpec { branch: Branch::new(e, y0)?, check_prec: f.check_prec })
}

pub fn branch_to_json(spec: &BranchSpec) -> String {
    let b = &spec.branch;
    let mut v = json!({
        "field": field_json(b.field()),
        "poly": poly_body(b.annihilator()),
        "y0": elem_json(b.field(), b.y0()),
    });
    if let Some(c) = spec.check_prec {
        v["check_prec"] = json!(c);
    }
    to_json_text(&v)
}
