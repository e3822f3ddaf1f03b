//! Typed access to scenario parameter maps.

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::numrange::IndexOptions;
use crate::spaces::{Descriptor, NormSpace};

pub(crate) type Params = Map<String, Value>;

fn bad(key: &str, why: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("parameter `{key}`: {why}"))
}

pub(crate) fn opt<T: DeserializeOwned>(p: &Params, key: &str) -> Result<Option<T>> {
    match p.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| bad(key, e)),
    }
}

pub(crate) fn req<T: DeserializeOwned>(p: &Params, key: &str) -> Result<T> {
    opt(p, key)?.ok_or_else(|| bad(key, "missing"))
}

pub(crate) fn or<T: DeserializeOwned>(p: &Params, key: &str, default: T) -> Result<T> {
    Ok(opt(p, key)?.unwrap_or(default))
}

/// A real that may be given as a number or as `"inf"`.
pub(crate) fn real(v: &Value, key: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad(key, "not a real")),
        Value::String(s) if matches!(s.as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
        other => Err(bad(key, format!("expected a real, got {other}"))),
    }
}

pub(crate) fn real_or(p: &Params, key: &str, default: f64) -> Result<f64> {
    match p.get(key) {
        None | Some(Value::Null) => Ok(default),
        Some(v) => real(v, key),
    }
}

pub(crate) fn reals(p: &Params, key: &str) -> Result<Vec<f64>> {
    match p.get(key) {
        Some(Value::Array(a)) => a.iter().map(|v| real(v, key)).collect(),
        Some(other) => Err(bad(key, format!("expected an array, got {other}"))),
        None => Err(bad(key, "missing")),
    }
}

pub(crate) fn tolerance(p: &Params, key: &str, default: f64) -> Result<f64> {
    let t = real_or(p, key, default)?;
    if t.is_nan() || t < 0.0 {
        return Err(bad(key, "tolerance must be non-negative"));
    }
    Ok(t)
}

pub(crate) fn space(p: &Params, key: &str) -> Result<NormSpace> {
    let d: Descriptor = req(p, key)?;
    d.build()
}

pub(crate) fn spaces(p: &Params, key: &str) -> Result<Vec<NormSpace>> {
    let ds: Vec<Descriptor> = req(p, key)?;
    if ds.is_empty() {
        return Err(bad(key, "empty list"));
    }
    ds.iter().map(Descriptor::build).collect()
}

pub(crate) fn seed(p: &Params, default: u64) -> Result<u64> {
    or(p, "seed", default)
}

/// Optimizer settings: `restarts`, `budget`, `radius_samples`,
/// `final_samples`.
pub(crate) fn index_options(p: &Params, seed: u64) -> Result<IndexOptions> {
    let d = IndexOptions::default();
    let o = IndexOptions {
        restarts: or(p, "restarts", 8)?,
        seed,
        budget: or(p, "budget", 1500)?,
        radius_samples: or(p, "radius_samples", d.radius_samples)?,
        final_samples: or(p, "final_samples", d.final_samples)?,
        starts: Vec::new(),
        certify: true,
    };
    if o.restarts == 0 {
        return Err(bad("restarts", "must be >= 1"));
    }
    Ok(o)
}
