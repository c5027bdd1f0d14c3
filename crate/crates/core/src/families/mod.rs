//! Built-in generating-set families.

mod beta;
mod dyck;
mod gaps;
mod nongibbs;
mod three_mme;

pub use beta::{Beta, BetaExpansion, Rational, PERIODICITY_TOL};
pub use dyck::{
    balanced_words, is_primitive_balanced, sample_balanced, Dyck, DyckCounts, DyckPatterns, DyckVariant,
    CLOSE_ROUND, CLOSE_SQUARE, OPEN_ROUND, OPEN_SQUARE,
};
pub use gaps::{parse_gap_set, GapShift};
pub use nongibbs::{NonGibbs, Schedule};
pub use three_mme::ThreeMme;

use std::sync::Arc;

use serde_json::Value;

use crate::error::{param, Error, Result};
use crate::genset::{GeneratingSet, GeneratorFamily};

/// Names accepted by [`family`] and [`preset`].
pub const FAMILY_NAMES: [&str; 10] = [
    "sgap",
    "multigap",
    "beta",
    "dyck",
    "dyck_g1",
    "dyck_g2",
    "nongibbs",
    "three_mme",
    "theorem_a",
    "augmented",
];

/// Digits checked for periodicity when a beta family is built without `depth`.
pub const DEFAULT_BETA_DEPTH: usize = 64;

/// Instantiates a named family from JSON parameters.
pub fn family(name: &str, params: &Value) -> Result<Arc<dyn GeneratorFamily>> {
    if !(params.is_object() || params.is_null()) {
        return Err(param("params", "expected a JSON object"));
    }
    let params = if params.is_null() { &Value::Object(Default::default()) } else { params };
    Ok(match name {
        "sgap" => Arc::new(GapShift::from_params(true, params)?),
        "multigap" => Arc::new(GapShift::from_params(false, params)?),
        "beta" => Arc::new(beta_from_params(params)?),
        "dyck" => Arc::new(Dyck::new(DyckVariant::Canonical)),
        "dyck_g1" => Arc::new(Dyck::new(DyckVariant::G1)),
        "dyck_g2" => Arc::new(Dyck::new(DyckVariant::G2)),
        "nongibbs" => Arc::new(NonGibbs::from_params(params)?),
        "three_mme" => Arc::new(ThreeMme::new()),
        "theorem_a" => crate::constructions::theorem_a_family(params)?,
        "augmented" => crate::constructions::augmented_family(params)?,
        other => return Err(Error::UnknownFamily(other.to_string())),
    })
}

/// A named family wrapped as a generating set, with its tail bound validated.
pub fn preset(name: &str, params: &Value) -> Result<GeneratingSet> {
    GeneratingSet::from_arc(family(name, params)?, None)
}

fn beta_from_params(params: &Value) -> Result<Beta> {
    let depth = match params.get("depth") {
        None => DEFAULT_BETA_DEPTH,
        Some(v) => v.as_u64().ok_or_else(|| param("depth", "expected a positive integer"))? as usize,
    };
    let beta = match params.get("beta") {
        Some(Value::Number(x)) => Rational::from_f64(x.as_f64().ok_or_else(|| param("beta", "not a number"))?)?,
        Some(Value::String(s)) => Rational::parse(s)?,
        _ => return Err(param("beta", "expected a number or a \"p/q\" string")),
    };
    Beta::new(beta, depth)
}

/// Greedy expansion of `beta` to `depth` digits together with its generating set.
pub fn beta_generators(beta: f64, depth: usize) -> Result<(BetaExpansion, GeneratingSet)> {
    let fam = Arc::new(Beta::from_f64(beta, depth)?);
    let expansion = fam.expansion(depth);
    Ok((expansion, GeneratingSet::from_arc(fam, None)?))
}

pub fn dyck_counts(n: usize) -> Result<DyckCounts> {
    DyckCounts::new(n)
}

pub fn dyck_generators(variant: DyckVariant) -> GeneratingSet {
    GeneratingSet::from_family(Dyck::new(variant)).expect("built-in tail bound holds")
}
