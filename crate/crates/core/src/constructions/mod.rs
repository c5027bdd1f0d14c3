//! Explicit generator constructions: small sequential entropy over a prescribed
//! SFT, and augmentation of an existing code by marker-framed generators.

mod augment;
mod sft;
mod theorem_a;

use std::sync::Arc;

use serde_json::Value;

pub use augment::{build_augmentation, find_markers, AugmentationBuild, AugmentedFamily};
pub use sft::{SftDocument, SftSpec};
pub use theorem_a::{build_theorem_a, Bridge, TheoremABuild, TheoremAFamily};

use crate::error::{param, Result};
use crate::genset::GeneratorFamily;

pub const DEFAULT_THEOREM_A_EPSILON: f64 = 0.1;
pub const DEFAULT_THEOREM_A_N: usize = 4;
pub const DEFAULT_AUGMENT_EPSILON: f64 = 0.05;
pub const DEFAULT_AUGMENT_DEPTH: usize = 2;

fn number(params: &Value, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| param(key, "expected a number")),
    }
}

fn count(params: &Value, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| param(key, "expected a nonnegative integer")),
    }
}

/// `{"sft": {...}, "epsilon": ε, "n": N}`; the golden-mean shift by default.
pub fn theorem_a_build(params: &Value) -> Result<TheoremABuild> {
    let z = match params.get("sft") {
        None => SftSpec::golden_mean(),
        Some(doc) => SftSpec::from_document(
            &serde_json::from_value(doc.clone()).map_err(|e| param("sft", e.to_string()))?,
        )?,
    };
    let epsilon = number(params, "epsilon", DEFAULT_THEOREM_A_EPSILON)?;
    let n = count(params, "n", DEFAULT_THEOREM_A_N)?;
    build_theorem_a(&z, epsilon, n)
}

/// `{"base": {"name", "params"}, "epsilon": ε, "depth": d, "m": [...]}`; base `three_mme` by default.
pub fn augmentation_build(params: &Value) -> Result<AugmentationBuild> {
    let base = match params.get("base") {
        None => crate::families::preset("three_mme", &Value::Null)?,
        Some(b) => {
            let name = b
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| param("base", "expected {\"name\": ..., \"params\": ...}"))?;
            if name == "augmented" {
                return Err(param("base", "augmentations do not nest"));
            }
            crate::families::preset(name, b.get("params").unwrap_or(&Value::Null))?
        }
    };
    let epsilon = number(params, "epsilon", DEFAULT_AUGMENT_EPSILON)?;
    let depth = count(params, "depth", DEFAULT_AUGMENT_DEPTH)?;
    let m = match params.get("m") {
        None => None,
        Some(v) => Some(
            v.as_array()
                .ok_or_else(|| param("m", "expected a list"))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| param("m", "expected positive integers")))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    build_augmentation(&base, epsilon, depth, m.as_deref())
}

pub fn theorem_a_family(params: &Value) -> Result<Arc<dyn GeneratorFamily>> {
    Ok(Arc::new(theorem_a_build(params)?.family()))
}

pub fn augmented_family(params: &Value) -> Result<Arc<dyn GeneratorFamily>> {
    let b = augmentation_build(params)?;
    Ok(Arc::new(AugmentedFamily::new(
        b.base.clone(),
        b.f.clone(),
        serde_json::json!({ "epsilon": b.epsilon, "depth": b.f.len() }),
    )))
}
