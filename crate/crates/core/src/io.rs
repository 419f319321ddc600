//! File formats.
//!
//! - Moment sequence: JSON array, `"p/q"` strings in exact mode and plain
//!   numbers in float mode. Readers also accept an object carrying the
//!   array under `"moments"`.
//! - Moment tensor: `{"dims": j, "max_orders": [...], "values": [{"index": [...], "value": v}, ...]}`.
//! - Lattice distribution: `{"h": v, "m": n, "support": [...], "probs": [...]}`.
//! - Histogram CSV: `midpoint,frequency`, header optional. Frequencies that
//!   do not sum to 1 are treated as counts and normalized.
//! - Joint table CSV: `s1,…,sj,prob`, header optional.
//! - Sample file: one value per line; blank lines and `#` comments skipped.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grouping::{Histogram, JointLatticeDist, LatticeDist};
use crate::multivariate::{MomentTensor, MultiIndex};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::umbral::MomentSeq;

/// Scalars with a JSON and text representation.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Result<Value>;
    fn from_json(value: &Value) -> Result<Self>;
    fn parse_text(text: &str) -> Result<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Result<Value> {
        Ok(Value::String(format_rational(self)))
    }

    /// Strings and integers only; a non-integer JSON number is float-only
    /// input and is rejected.
    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!(
                "exact mode expects \"p/q\" strings or integers, found {other}"
            ))),
        }
    }

    fn parse_text(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Result<Value> {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .ok_or_else(|| Error::Parse(format!("non-finite value {self}")))
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => Self::parse_text(s),
            other => Err(Error::Parse(format!("expected a number, found {other}"))),
        }
    }

    fn parse_text(text: &str) -> Result<Self> {
        let t = text.trim();
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => parse_rational(t).map(|r| Scalar::to_f64(&r)),
        }
    }
}

pub fn moments_to_json<T: JsonScalar>(seq: &MomentSeq<T>) -> Result<Value> {
    Ok(Value::Array(seq.values().iter().map(JsonScalar::to_json).collect::<Result<_>>()?))
}

pub fn moments_from_json<T: JsonScalar>(value: &Value) -> Result<MomentSeq<T>> {
    let array = match value {
        Value::Array(a) => a,
        Value::Object(o) => match o.get("moments") {
            Some(Value::Array(a)) => a,
            _ => return Err(Error::Parse("expected a \"moments\" array".into())),
        },
        _ => return Err(Error::Parse("expected a JSON array of moments".into())),
    };
    MomentSeq::new(array.iter().map(T::from_json).collect::<Result<_>>()?)
}

pub fn tensor_to_json<T: JsonScalar>(tensor: &MomentTensor<T>) -> Result<Value> {
    let values = tensor
        .entries()
        .map(|(idx, v)| Ok(json!({ "index": idx.orders(), "value": v.to_json()? })))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "dims": tensor.dims(),
        "max_orders": tensor.max_orders(),
        "values": values,
    }))
}

fn usize_array(value: Option<&Value>, what: &str) -> Result<Vec<usize>> {
    value
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing \"{what}\" array")))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::Parse(format!("\"{what}\" must hold non-negative integers")))
        })
        .collect()
}

/// Reads a tensor object, or an object carrying one under `"tensor"`.
pub fn tensor_from_json<T: JsonScalar>(value: &Value) -> Result<MomentTensor<T>> {
    let obj = value.as_object().ok_or_else(|| Error::Parse("expected a tensor object".into()))?;
    let obj = match obj.get("tensor").and_then(Value::as_object) {
        Some(inner) => inner,
        None => obj,
    };
    let dims = obj
        .get("dims")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"dims\"".into()))? as usize;
    let max_orders = usize_array(obj.get("max_orders"), "max_orders")?;
    if max_orders.len() != dims {
        return Err(Error::DimensionMismatch { expected: dims, found: max_orders.len() });
    }
    let entries = obj
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"values\" array".into()))?
        .iter()
        .map(|e| {
            let idx = usize_array(e.get("index"), "index")?;
            let v = T::from_json(e.get("value").ok_or_else(|| Error::Parse("entry without \"value\"".into()))?)?;
            Ok((MultiIndex::new(idx)?, v))
        })
        .collect::<Result<Vec<_>>>()?;
    MomentTensor::from_entries(max_orders, entries)
}

/// Whether a JSON document looks like a tensor rather than a sequence.
pub fn is_tensor_json(value: &Value) -> bool {
    value.get("dims").is_some() || value.get("tensor").is_some()
}

pub fn lattice_to_json(dist: &LatticeDist) -> Value {
    json!({
        "h": format_rational(dist.h()),
        "m": dist.m(),
        "support": dist.support(),
        "probs": dist.probs().iter().map(format_rational).collect::<Vec<_>>(),
    })
}

pub fn lattice_from_json(value: &Value) -> Result<LatticeDist> {
    let field = |name: &str| value.get(name).ok_or_else(|| Error::Parse(format!("missing \"{name}\"")));
    let h = Rational::from_json(field("h")?)?;
    let m = field("m")?
        .as_u64()
        .and_then(|m| u32::try_from(m).ok())
        .ok_or_else(|| Error::Parse("\"m\" must be a positive integer".into()))?;
    let support = field("support")?
        .as_array()
        .ok_or_else(|| Error::Parse("\"support\" must be an array".into()))?
        .iter()
        .map(|v| v.as_i64().ok_or_else(|| Error::Parse("support points must be integers".into())))
        .collect::<Result<Vec<_>>>()?;
    let probs = field("probs")?
        .as_array()
        .ok_or_else(|| Error::Parse("\"probs\" must be an array".into()))?
        .iter()
        .map(Rational::from_json)
        .collect::<Result<Vec<_>>>()?;
    LatticeDist::new(h, m, support, probs)
}

fn csv_rows(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(record.iter().map(str::to_owned).collect());
    }
    Ok(rows)
}

/// Drops a leading header row: one whose first field is not numeric.
fn strip_header(mut rows: Vec<Vec<String>>) -> Vec<Vec<String>> {
    if let Some(first) = rows.first() {
        if first.first().is_some_and(|f| f64::parse_text(f).is_err()) {
            rows.remove(0);
        }
    }
    rows
}

/// Parsed histogram and whether the frequencies were rescaled from counts.
pub struct HistogramInput<T> {
    pub histogram: Histogram<T>,
    pub normalized_from_counts: bool,
}

pub fn parse_histogram_csv<T: JsonScalar>(text: &str) -> Result<HistogramInput<T>> {
    let rows = strip_header(csv_rows(text)?);
    let mut mids = Vec::with_capacity(rows.len());
    let mut freqs = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 2 {
            return Err(Error::Parse(format!("histogram row {} needs 2 columns, has {}", i + 1, row.len())));
        }
        mids.push(T::parse_text(&row[0])?);
        freqs.push(T::parse_text(&row[1])?);
    }
    let total = freqs.iter().fold(T::zero(), |acc, f| acc + f.clone());
    let is_relative = if T::is_exact() {
        total.is_one()
    } else {
        (total.to_f64() - 1.0).abs() <= crate::grouping::DEFAULT_NORM_TOL
    };
    let histogram = if is_relative {
        Histogram::new(mids, freqs)?
    } else {
        Histogram::from_counts(mids, freqs)?
    };
    Ok(HistogramInput { histogram, normalized_from_counts: !is_relative })
}

pub fn parse_samples<T: JsonScalar>(text: &str) -> Result<Vec<T>> {
    let samples: Vec<T> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(T::parse_text)
        .collect::<Result<_>>()?;
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples)
}

/// Joint table `s1,…,sj,prob` on the lattice described by `axes`.
pub fn parse_joint_table(text: &str, axes: Vec<(Rational, u32)>) -> Result<JointLatticeDist> {
    let rows = strip_header(csv_rows(text)?);
    let j = axes.len();
    let mut points = Vec::with_capacity(rows.len());
    let mut probs = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != j + 1 {
            return Err(Error::Parse(format!("joint table row {} needs {} columns, has {}", i + 1, j + 1, row.len())));
        }
        let pt = row[..j]
            .iter()
            .map(|s| s.parse::<i64>().map_err(|_| Error::Parse(format!("lattice index {s:?} is not an integer"))))
            .collect::<Result<Vec<_>>>()?;
        points.push(pt);
        probs.push(parse_rational(&row[j])?);
    }
    JointLatticeDist::new(axes, points, probs)
}
