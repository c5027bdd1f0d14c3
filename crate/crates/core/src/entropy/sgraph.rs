use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// `{start + k*step : k >= 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
}

/// A set of nonnegative gap sizes: finitely many values plus arithmetic progressions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSet {
    #[serde(default)]
    pub finite: Vec<u64>,
    #[serde(default)]
    pub progressions: Vec<Progression>,
}

impl GapSet {
    pub fn finite(values: impl IntoIterator<Item = u64>) -> Self {
        let mut finite: Vec<u64> = values.into_iter().collect();
        finite.sort_unstable();
        finite.dedup();
        Self {
            finite,
            progressions: Vec::new(),
        }
    }

    pub fn progression(start: u64, step: u64) -> Self {
        Self {
            finite: Vec::new(),
            progressions: vec![Progression { start, step }],
        }
    }

    /// All nonnegative integers.
    pub fn naturals() -> Self {
        Self::progression(0, 1)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.finite.is_empty() && self.progressions.is_empty() {
            return Err(param(name, "gap set must be nonempty"));
        }
        if self.progressions.iter().any(|p| p.step == 0) {
            return Err(param(name, "progression step must be positive"));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    /// Largest element when the set is finite.
    pub fn max(&self) -> Option<u64> {
        if self.is_finite() {
            self.finite.iter().max().copied()
        } else {
            None
        }
    }

    pub fn contains(&self, s: u64) -> bool {
        self.finite.binary_search(&s).is_ok()
            || self
                .progressions
                .iter()
                .any(|p| s >= p.start && (s - p.start).is_multiple_of(p.step))
    }

    /// Elements `<= n` in increasing order.
    pub fn elements_upto(&self, n: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.finite.iter().copied().filter(|&s| s <= n).collect();
        for p in &self.progressions {
            let mut s = p.start;
            while s <= n {
                out.push(s);
                s += p.step;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `sum_{s in S, s <= n} x^s`.
    pub fn sum_upto(&self, x: f64, n: u64) -> f64 {
        self.elements_upto(n).into_iter().map(|s| x.powf(s as f64)).sum()
    }

    /// Upper bound for `sum_{s in S, s > n} x^s` (exact unless progressions overlap).
    pub fn tail_after(&self, x: f64, n: u64) -> f64 {
        let mut t: f64 = self
            .finite
            .iter()
            .filter(|&&s| s > n && !self.progressions.iter().any(|p| s >= p.start && (s - p.start) % p.step == 0))
            .map(|&s| x.powf(s as f64))
            .sum();
        for p in &self.progressions {
            let first = if p.start > n {
                p.start
            } else {
                p.start + ((n - p.start) / p.step + 1) * p.step
            };
            t += x.powf(first as f64) / (1.0 - x.powf(p.step as f64));
        }
        t
    }
}

/// S-graph shift shape: `d` gap branches plus `r` one-letter generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SGraphSpec {
    pub d: usize,
    pub gap_sets: Vec<GapSet>,
    pub r: usize,
}

impl SGraphSpec {
    pub fn new(gap_sets: Vec<GapSet>, r: usize) -> Result<Self> {
        let spec = Self {
            d: gap_sets.len(),
            gap_sets,
            r,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gap_sets.len() != self.d {
            return Err(param("gap_sets", format!("expected {} sets, got {}", self.d, self.gap_sets.len())));
        }
        for (i, s) in self.gap_sets.iter().enumerate() {
            s.validate(&format!("gap_sets[{i}]"))?;
        }
        Ok(())
    }
}

/// A truncated series value; the full value lies in `[value - tail, value]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail: f64,
}

/// `1 - r*x - x * sum_i sum_{s in S_i, s <= n} x^s`, with the omitted part bounded by `tail`.
pub fn sgraph_char_value(spec: &SGraphSpec, x: f64, n: u64) -> Result<SeriesValue> {
    spec.validate()?;
    if !(x > 0.0 && x < 1.0) {
        return Err(param("x", "must lie in (0, 1)"));
    }
    let mut value = 1.0 - spec.r as f64 * x;
    let mut tail = 0.0;
    for s in &spec.gap_sets {
        value -= x * s.sum_upto(x, n);
        tail += x * s.tail_after(x, n);
    }
    Ok(SeriesValue { value, tail })
}
