//! Characteristic series, entropy and pressure solvers.
//!
//! Every series here has nonnegative terms, so a partial sum is always a
//! lower bound and partial sum plus tail bound is an upper bound. The
//! solver only moves a bracket end when the corresponding bound certifies it.

mod growth;
mod sgraph;
mod sofic;

pub use growth::{genset_entropy, GrowthEstimate};
pub use sgraph::{sgraph_char_value, GapSet, Progression, SGraphSpec, SeriesValue};
pub use sofic::{sofic_approx_entropies, sofic_chain_by_length, sofic_lambda, SoficApprox};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genset::GeneratingSet;
use crate::words::{Symbol, Word};

/// Default absolute tolerance on `|f(lambda) - 1|` and relative bracket width.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest truncation depth the solver will sum to.
pub const MAX_DEPTH: usize = 1 << 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// Root at `lambda = 1`: zero entropy.
    Degenerate,
    /// The series stays below 1 on the whole admissible range.
    NoRoot,
    /// Bounds could not decide the position of the root.
    Inconclusive,
}

/// Root of a weighted characteristic equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSolution {
    pub status: SolveStatus,
    pub lambda_star: Option<f64>,
    pub h_top: Option<f64>,
    pub bracket: [f64; 2],
    pub depth: usize,
    /// Bound on `|f(lambda_star) - 1|` from the final evaluation.
    pub residual: f64,
    pub tol: f64,
}

impl CharacteristicSolution {
    pub fn lambda(&self) -> Result<f64> {
        self.lambda_star.ok_or_else(|| Error::NoRoot(format!("solver status {:?}", self.status)))
    }

    pub fn h(&self) -> Result<f64> {
        self.lambda().map(f64::ln)
    }
}

/// Potential constant on G-cylinders: `Phi(g) = offset + slope*|g|` unless overridden.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedPotential {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub slope: f64,
    #[serde(default)]
    pub overrides: Vec<(Word, f64)>,
}

impl WeightedPotential {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `Phi(g) = -t*|g|`.
    pub fn length(t: f64) -> Self {
        Self {
            offset: 0.0,
            slope: -t,
            overrides: Vec::new(),
        }
    }

    /// `Phi(g) = log q_g` on the listed generators and `-inf` elsewhere.
    pub fn finite_support(weights: Vec<(Word, f64)>) -> Self {
        Self {
            offset: f64::NEG_INFINITY,
            slope: 0.0,
            overrides: weights.into_iter().map(|(w, q)| (w, q.ln())).collect(),
        }
    }

    pub fn value(&self, g: &[Symbol]) -> f64 {
        match self.overrides.iter().find(|(w, _)| w.as_slice() == g) {
            Some(&(_, v)) => v,
            None => self.base(g.len()),
        }
    }

    fn base(&self, len: usize) -> f64 {
        if self.offset == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.offset + self.slope * len as f64
        }
    }

    fn validate(&self, g: &GeneratingSet) -> Result<()> {
        if self.offset.is_nan() || self.slope.is_nan() || self.offset == f64::INFINITY {
            return Err(crate::error::param("potential", "offset and slope must be finite or offset -inf"));
        }
        for (w, v) in &self.overrides {
            if !g.contains(w) {
                return Err(Error::UnknownGenerator(g.alphabet().render(w)));
            }
            if v.is_nan() || *v == f64::INFINITY {
                return Err(crate::error::param("potential", "override values must be below +inf"));
            }
        }
        Ok(())
    }
}

/// Cached `ln c(n)` values for repeated series evaluation.
pub(crate) struct Spectrum<'a> {
    set: &'a GeneratingSet,
    ln_c: Vec<f64>,
}

impl<'a> Spectrum<'a> {
    pub(crate) fn new(set: &'a GeneratingSet) -> Self {
        Self {
            set,
            ln_c: vec![f64::NEG_INFINITY],
        }
    }

    pub(crate) fn set(&self) -> &'a GeneratingSet {
        self.set
    }

    fn ensure(&mut self, n: usize) -> Result<()> {
        while self.ln_c.len() <= n {
            let k = self.ln_c.len();
            self.ln_c.push(self.set.ln_count(k)?);
        }
        Ok(())
    }

    pub(crate) fn ln_count(&mut self, n: usize) -> Result<f64> {
        self.ensure(n)?;
        Ok(self.ln_c[n])
    }

    /// `sum_{n <= depth} n^power c(n) y^n`.
    pub(crate) fn partial(&mut self, y: f64, depth: usize, power: u32) -> Result<f64> {
        self.ensure(depth)?;
        let ly = y.ln();
        let mut s = 0.0;
        for n in 1..=depth {
            let l = self.ln_c[n];
            if l == f64::NEG_INFINITY {
                continue;
            }
            s += (n as f64).powi(power as i32) * (l + n as f64 * ly).exp();
        }
        Ok(s)
    }

    /// Smallest depth whose certified tail is at most `target`, capped at `max_depth`.
    pub(crate) fn depth_for(
        &mut self,
        y: f64,
        power: u32,
        target: f64,
        max_depth: usize,
    ) -> Result<(usize, Option<f64>)> {
        if let Some(m) = self.set.max_len() {
            return Ok((m.min(max_depth), self.set.series_tail(y, m.min(max_depth), power)?));
        }
        let ok = |s: &Self, n: usize| -> Result<Option<f64>> { s.set.series_tail(y, n, power) };
        let mut hi = 16usize;
        loop {
            match ok(self, hi)? {
                Some(t) if t <= target => break,
                _ if hi >= max_depth => {
                    return Ok((max_depth, ok(self, max_depth)?));
                }
                _ => hi = (hi * 2).min(max_depth),
            }
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match ok(self, mid)? {
                Some(t) if t <= target => hi = mid,
                _ => lo = mid,
            }
        }
        Ok((hi, ok(self, hi)?))
    }
}

/// `(sum_{n <= depth} c(n) lambda^-n, tail bound for n > depth)`.
pub fn characteristic_fn(g: &GeneratingSet, lambda: f64, depth: usize) -> Result<(f64, f64)> {
    let y = 1.0 / lambda;
    let tail = g.series_tail(y, depth, 0)?.ok_or_else(|| Error::Divergent {
        lambda,
        rho: g.tail().map_or(1.0, |t| t.rho),
    })?;
    let value = Spectrum::new(g).partial(y, depth, 0)?;
    Ok((value, tail))
}

/// One evaluation of a weighted series at `lambda`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Eval {
    pub value: f64,
    /// `None` when the tail cannot be certified at this `lambda`.
    pub tail: Option<f64>,
    pub depth: usize,
}

/// `sum_g e^{Phi(g)} lambda^{-|g|}` with partial sums and a certified tail.
pub(crate) struct WeightedSeries<'a> {
    spectrum: Spectrum<'a>,
    phi: WeightedPotential,
    // (length, overridden value, base value) per override
    corrections: Vec<(usize, f64, f64)>,
}

impl<'a> WeightedSeries<'a> {
    pub(crate) fn new(g: &'a GeneratingSet, phi: &WeightedPotential) -> Result<Self> {
        phi.validate(g)?;
        let corrections = phi
            .overrides
            .iter()
            .map(|(w, v)| (w.len(), *v, phi.base(w.len())))
            .collect();
        Ok(Self {
            spectrum: Spectrum::new(g),
            phi: phi.clone(),
            corrections,
        })
    }

    /// Effective growth rate of the base weights: `rho * e^{slope}`.
    fn rho(&self) -> f64 {
        if self.phi.offset == f64::NEG_INFINITY {
            return 0.0;
        }
        let base = if self.spectrum.set().is_finite() {
            0.0
        } else {
            self.spectrum.set().tail().map_or(1.0, |t| t.rho)
        };
        base * self.phi.slope.exp()
    }

    fn corrections_at(&self, lambda: f64) -> f64 {
        let ll = lambda.ln();
        self.corrections
            .iter()
            .map(|&(len, v, b)| (v - len as f64 * ll).exp() - (b - len as f64 * ll).exp())
            .sum()
    }

    fn override_depth(&self) -> usize {
        self.corrections.iter().map(|c| c.0).max().unwrap_or(0)
    }

    /// Evaluation whose depth is chosen to bring the tail below `target`.
    pub(crate) fn eval(&mut self, lambda: f64, target: f64, max_depth: usize) -> Result<Eval> {
        let mut value = self.corrections_at(lambda);
        if self.phi.offset == f64::NEG_INFINITY {
            return Ok(Eval {
                value,
                tail: Some(0.0),
                depth: self.override_depth(),
            });
        }
        let y = self.phi.slope.exp() / lambda;
        let scale = self.phi.offset.exp();
        let (depth, tail) = self.spectrum.depth_for(y, 0, target / scale, max_depth)?;
        let depth = depth.max(self.override_depth());
        value += scale * self.spectrum.partial(y, depth, 0)?;
        let tail = if depth == self.override_depth() {
            self.spectrum.set().series_tail(y, depth, 0)?
        } else {
            tail
        };
        Ok(Eval {
            value,
            tail: tail.map(|t| t * scale),
            depth,
        })
    }

    /// Evaluation at a fixed depth (raised to cover every override).
    pub(crate) fn eval_depth(&mut self, lambda: f64, depth: usize) -> Result<Eval> {
        let mut value = self.corrections_at(lambda);
        if self.phi.offset == f64::NEG_INFINITY {
            return Ok(Eval {
                value,
                tail: Some(0.0),
                depth: self.override_depth(),
            });
        }
        let mut depth = depth.max(self.override_depth());
        if let Some(m) = self.spectrum.set().max_len() {
            depth = depth.min(m.max(self.override_depth()));
        }
        let y = self.phi.slope.exp() / lambda;
        let scale = self.phi.offset.exp();
        value += scale * self.spectrum.partial(y, depth, 0)?;
        let tail = self.spectrum.set().series_tail(y, depth, 0)?;
        Ok(Eval {
            value,
            tail: tail.map(|t| t * scale),
            depth,
        })
    }

    /// Evaluation near the radius of convergence: deepens only until the
    /// partial sum reaches 1 or the certified upper bound falls below 1.
    pub(crate) fn eval_lower(&mut self, lambda: f64) -> Result<Eval> {
        let mut depth = 16;
        loop {
            let e = self.eval_depth(lambda, depth)?;
            let decided = e.value >= 1.0 || e.tail.is_some_and(|t| e.value + t < 1.0);
            if decided || e.depth < depth || depth >= MAX_DEPTH {
                return Ok(e);
            }
            depth = (depth * 2).min(MAX_DEPTH);
        }
    }
}

/// Bisection for `f(lambda) = 1` on a decreasing series.
pub(crate) fn solve_series(series: &mut WeightedSeries<'_>, tol: f64) -> Result<CharacteristicSolution> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(crate::error::param("tol", "must lie in (0, 1)"));
    }
    let target = tol / 10.0;
    let rho = series.rho();
    let floor = rho.max(1.0);
    let fail = |status, lo: f64, hi: f64, depth, residual| CharacteristicSolution {
        status,
        lambda_star: None,
        h_top: None,
        bracket: [lo, hi],
        depth,
        residual,
        tol,
    };

    // lower end: lambda = 1 when the series converges there, else just above rho
    let mut lo = if rho < 1.0 { 1.0 } else { floor + 1e-9 * floor };
    let at_lo = if rho < 1.0 {
        series.eval(lo, target, MAX_DEPTH)?
    } else {
        series.eval_lower(lo)?
    };
    if rho < 1.0 {
        let upper = at_lo.tail.map(|t| at_lo.value + t);
        if let Some(u) = upper {
            if (at_lo.value - 1.0).abs() <= tol && (u - 1.0).abs() <= tol {
                return Ok(CharacteristicSolution {
                    status: SolveStatus::Degenerate,
                    lambda_star: Some(1.0),
                    h_top: Some(0.0),
                    bracket: [1.0, 1.0],
                    depth: at_lo.depth,
                    residual: (at_lo.value - 1.0).abs().max((u - 1.0).abs()),
                    tol,
                });
            }
            if u < 1.0 {
                return Ok(fail(SolveStatus::NoRoot, 1.0, 1.0, at_lo.depth, u));
            }
        }
    }
    if at_lo.value < 1.0 {
        let status = match at_lo.tail {
            Some(t) if at_lo.value + t < 1.0 => SolveStatus::NoRoot,
            _ => SolveStatus::Inconclusive,
        };
        return Ok(fail(status, lo, lo, at_lo.depth, at_lo.tail.unwrap_or(f64::INFINITY)));
    }

    // upper end: double until the upper bound drops below 1
    let mut hi = lo + 1.0;
    let mut depth = at_lo.depth;
    loop {
        let e = series.eval(hi, target, MAX_DEPTH)?;
        depth = depth.max(e.depth);
        if let Some(t) = e.tail {
            if e.value + t < 1.0 {
                break;
            }
        }
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() || hi > 1e300 {
            return Ok(fail(SolveStatus::Inconclusive, lo, hi, depth, f64::INFINITY));
        }
    }

    // ambiguous steps (f within its tail of 1) only occur once the bracket
    // is within tail/f' of the root, so they never stall convergence
    while hi - lo > tol * lo {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let e = series.eval(mid, target, MAX_DEPTH)?;
        depth = depth.max(e.depth);
        let t = e.tail.unwrap_or(f64::INFINITY);
        if e.value + 0.5 * t >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let e = series.eval(lambda, target, MAX_DEPTH)?;
    depth = depth.max(e.depth);
    let t = e.tail.unwrap_or(f64::INFINITY);
    // |f(lambda) - 1| is at most this, with f in [value, value + t]
    let residual = (e.value - 1.0).abs().max((e.value + t - 1.0).abs());
    let status = if hi - lo <= tol * lo && t <= target {
        SolveStatus::Converged
    } else {
        SolveStatus::Inconclusive
    };
    Ok(CharacteristicSolution {
        status,
        lambda_star: Some(lambda),
        h_top: Some(lambda.ln()),
        bracket: [lo, hi],
        depth,
        residual,
        tol,
    })
}

/// Root of `sum_g e^{Phi(g)} lambda^{-|g|} = 1`; the pressure is `ln lambda`.
pub fn solve_pressure(
    g: &GeneratingSet,
    phi: &WeightedPotential,
    tol: f64,
) -> Result<CharacteristicSolution> {
    let mut series = WeightedSeries::new(g, phi)?;
    solve_series(&mut series, tol)
}

/// Root of the characteristic equation `sum_g lambda^{-|g|} = 1`.
pub fn solve_entropy(g: &GeneratingSet, tol: f64) -> Result<CharacteristicSolution> {
    solve_pressure(g, &WeightedPotential::zero(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn explicit(words: &[&str]) -> GeneratingSet {
        GeneratingSet::from_strs(Alphabet::from_chars("0123").unwrap(), words).unwrap()
    }

    #[test]
    fn golden_mean_code() {
        let g = explicit(&["0", "01"]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (v, t) = characteristic_fn(&g, phi, 8).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(t, 0.0);
        let sol = solve_entropy(&g, 1e-12).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged);
        assert!((sol.lambda().unwrap() - phi).abs() < 1e-11);
        assert!(sol.bracket[1] - sol.bracket[0] <= 1e-12 * phi);
    }

    #[test]
    fn degenerate_single_generator() {
        let sol = solve_entropy(&explicit(&["01"]), 1e-12).unwrap();
        assert_eq!(sol.status, SolveStatus::Degenerate);
        assert_eq!(sol.h_top, Some(0.0));
    }

    #[test]
    fn finite_probability_potential_has_zero_pressure() {
        let g = explicit(&["0", "12", "312"]);
        let w = |s: &str| g.alphabet().parse(s).unwrap();
        let phi = WeightedPotential::finite_support(vec![(w("0"), 0.5), (w("12"), 0.25), (w("312"), 0.25)]);
        let sol = solve_pressure(&g, &phi, 1e-12).unwrap();
        assert_eq!(sol.lambda_star, Some(1.0));
        assert_eq!(sol.status, SolveStatus::Degenerate);
    }

    #[test]
    fn no_root_below_one() {
        let g = explicit(&["0", "12"]);
        let w = |s: &str| g.alphabet().parse(s).unwrap();
        let phi = WeightedPotential::finite_support(vec![(w("0"), 0.25), (w("12"), 0.25)]);
        let sol = solve_pressure(&g, &phi, 1e-12).unwrap();
        assert_eq!(sol.status, SolveStatus::NoRoot);
        assert!(sol.lambda().is_err());
    }

    #[test]
    fn length_potential_shifts_pressure() {
        let g = explicit(&["0", "1", "23"]);
        let h = solve_entropy(&g, 1e-13).unwrap().h().unwrap();
        let p = solve_pressure(&g, &WeightedPotential::length(0.1), 1e-13).unwrap().h().unwrap();
        assert!((p - (h - 0.1)).abs() < 1e-11);
    }

    #[test]
    fn unknown_override_rejected() {
        let g = explicit(&["0", "1"]);
        let phi = WeightedPotential {
            overrides: vec![(Word(vec![2]), 0.0)],
            ..Default::default()
        };
        assert!(solve_pressure(&g, &phi, 1e-10).is_err());
    }
}
