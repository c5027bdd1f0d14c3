use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{param, Result};
use crate::genset::GeneratingSet;

/// Estimates of `h(G) = limsup (1/n) log c(n)` from the spectrum up to depth `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub depth: usize,
    /// `max (log c(n))/n` over the terminal window `(N - w, N]`.
    pub ratio_estimate: f64,
    /// Secant `(log c(n2) - log c(n1)) / (n2 - n1)` between the last nonzero
    /// counts at or below `N/2` and `N`; cancels the subexponential factor.
    pub slope_estimate: f64,
    pub window: usize,
    pub closed_form: Option<f64>,
}

pub fn genset_entropy(g: &GeneratingSet, depth: usize) -> Result<GrowthEstimate> {
    if depth == 0 {
        return Err(param("N", "must be at least 1"));
    }
    let mut spec = Spectrum::new(g);
    let window = (depth / 10).max(1);
    let mut ratio = 0.0f64;
    for n in depth + 1 - window..=depth {
        let l = spec.ln_count(n)?;
        if l > f64::NEG_INFINITY {
            ratio = ratio.max(l / n as f64);
        }
    }
    let last_nonzero = |spec: &mut Spectrum<'_>, top: usize| -> Result<Option<(usize, f64)>> {
        for n in (1..=top).rev() {
            let l = spec.ln_count(n)?;
            if l > f64::NEG_INFINITY {
                return Ok(Some((n, l)));
            }
        }
        Ok(None)
    };
    let hi = last_nonzero(&mut spec, depth)?;
    let lo = last_nonzero(&mut spec, depth / 2)?;
    let slope = match (lo, hi) {
        (Some((n1, l1)), Some((n2, l2))) if n2 > n1 && n2 + window > depth => (l2 - l1) / (n2 - n1) as f64,
        _ => 0.0,
    };
    Ok(GrowthEstimate {
        depth,
        ratio_estimate: ratio,
        slope_estimate: slope.max(0.0),
        window,
        closed_form: g.generator_entropy_closed_form(),
    })
}
