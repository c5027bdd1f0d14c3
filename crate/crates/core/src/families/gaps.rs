//! S-gap and multi-gap (S-graph) shifts.

use num_bigint::BigUint;
use serde_json::Value;

use crate::entropy::{GapSet, SGraphSpec};
use crate::error::{param, Result};
use crate::genset::{GeneratorFamily, TailBound};
use crate::words::{Alphabet, Symbol, Word};

/// Reads a gap set from a list of integers, a `{finite, progressions}`
/// object, or the string `"N"` for all nonnegative integers.
pub fn parse_gap_set(v: &Value, name: &str) -> Result<GapSet> {
    let set = match v {
        Value::Array(items) => GapSet::finite(
            items
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| param(name, "gaps must be nonnegative integers")))
                .collect::<Result<Vec<_>>>()?,
        ),
        Value::String(s) if matches!(s.as_str(), "N" | "N0" | "naturals") => GapSet::naturals(),
        Value::Object(_) => {
            let mut g: GapSet =
                serde_json::from_value(v.clone()).map_err(|e| param(name, e.to_string()))?;
            g.finite.sort_unstable();
            g.finite.dedup();
            g
        }
        _ => return Err(param(name, "expected a list, an object or \"N\"")),
    };
    set.validate(name)?;
    Ok(set)
}

fn gap_set_json(g: &GapSet) -> Value {
    if g.is_finite() {
        serde_json::json!(g.finite)
    } else {
        serde_json::to_value(g).expect("serializable")
    }
}

/// Multi-gap shift on digits `0..=d+r`: generators `0 i^s` for `s in S_i`
/// (`1 <= i <= d`) and the letters `d+1..=d+r`. With `d = 1, r = 0` this is
/// the S-gap shift `{0 1^s}`.
#[derive(Debug)]
pub struct GapShift {
    spec: SGraphSpec,
    alphabet: Alphabet,
    single: bool,
}

impl GapShift {
    pub fn sgap(s: GapSet) -> Result<Self> {
        let mut g = Self::multigap(vec![s], 0)?;
        g.single = true;
        Ok(g)
    }

    pub fn multigap(gap_sets: Vec<GapSet>, r: usize) -> Result<Self> {
        let spec = SGraphSpec::new(gap_sets, r)?;
        if spec.d + r == 0 {
            return Err(param("gaps", "need at least one gap set or letter"));
        }
        // 0 i^0 is the same word for every i
        if spec.gap_sets.iter().filter(|s| s.contains(0)).count() > 1 {
            return Err(param("gaps", "0 may belong to at most one gap set"));
        }
        let alphabet = Alphabet::digits(spec.d + r + 1)?;
        Ok(Self {
            spec,
            alphabet,
            single: false,
        })
    }

    pub fn from_params(single: bool, params: &Value) -> Result<Self> {
        if single {
            let s = params.get("S").ok_or_else(|| param("S", "missing"))?;
            Self::sgap(parse_gap_set(s, "S")?)
        } else {
            let gaps = params
                .get("gaps")
                .and_then(Value::as_array)
                .ok_or_else(|| param("gaps", "expected a list of gap sets"))?;
            let sets = gaps
                .iter()
                .enumerate()
                .map(|(i, g)| parse_gap_set(g, &format!("gaps[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let r = match params.get("r") {
                None => 0,
                Some(v) => v.as_u64().ok_or_else(|| param("r", "expected a nonnegative integer"))? as usize,
            };
            Self::multigap(sets, r)
        }
    }

    pub fn spec(&self) -> &SGraphSpec {
        &self.spec
    }
}

impl GeneratorFamily for GapShift {
    fn name(&self) -> &str {
        if self.single {
            "sgap"
        } else {
            "multigap"
        }
    }

    fn params(&self) -> Value {
        if self.single {
            serde_json::json!({ "S": gap_set_json(&self.spec.gap_sets[0]) })
        } else {
            let gaps: Vec<Value> = self.spec.gap_sets.iter().map(gap_set_json).collect();
            serde_json::json!({ "gaps": gaps, "r": self.spec.r })
        }
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        if self.max_len().is_some() {
            return None;
        }
        Some(TailBound {
            c: self.spec.d.max(self.spec.r).max(1) as f64,
            rho: 1.0,
            n0: 1,
        })
    }

    fn max_len(&self) -> Option<usize> {
        let mut top = usize::from(self.spec.r > 0);
        for s in &self.spec.gap_sets {
            top = top.max(s.max()? as usize + 1);
        }
        Some(top)
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        if n == 0 {
            return Ok(out);
        }
        for (i, s) in self.spec.gap_sets.iter().enumerate() {
            if s.contains(n as u64 - 1) {
                let mut w = vec![0 as Symbol];
                w.extend(std::iter::repeat_n(i as Symbol + 1, n - 1));
                out.push(Word(w));
            }
        }
        if n == 1 {
            let d = self.spec.d;
            out.extend((d + 1..=d + self.spec.r).map(|a| Word(vec![a as Symbol])));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        Some(BigUint::from(self.generators(n).ok()?.len()))
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let d = self.spec.d;
        match w {
            [] => false,
            [a] => {
                (*a == 0 && self.spec.gap_sets.iter().any(|s| s.contains(0)))
                    || (*a as usize > d && (*a as usize) <= d + self.spec.r)
            }
            [0, rest @ ..] => {
                let i = rest[0];
                i >= 1
                    && (i as usize) <= d
                    && rest.iter().all(|&x| x == i)
                    && self.spec.gap_sets[i as usize - 1].contains(rest.len() as u64)
            }
            _ => false,
        }
    }

    fn generator_entropy(&self) -> Option<f64> {
        Some(0.0)
    }
}
