//! Augmenting a code by long marker-framed generators.
//!
//! `f_i = u^{2^i |w(i)|} w(i) v^{2^i |w(i)|}` where `u`, `v` are distinct
//! primitive non-conjugate words of equal length absent from the language, and
//! `w(i)` is a concatenation of generators covering the length-`i` words.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::entropy::{characteristic_fn, solve_entropy, CharacteristicSolution};
use crate::error::{Error, Result};
use crate::genset::{CodeAutomaton, GeneratingSet, GeneratorFamily, TailBound};
use crate::sofic::factor_automaton;
use crate::words::{Alphabet, Symbol, Word};

/// Generators enumerated for the marker and covering horizons.
pub const PREFIX_BUDGET: usize = 4096;

/// Longest marker length tried.
pub const MAX_MARKER_LEN: usize = 8;

/// Total length budget for `f_1..f_depth`.
pub const LENGTH_BUDGET: usize = 10_000_000;

/// Rounds of doubling the `m`-schedule before giving up.
pub const MAX_ROUNDS: usize = 24;

const SOLVER_TOL: f64 = 1e-13;

/// Depth of the exact part when bounding `f(λ* e^ε)`.
const CERT_DEPTH: usize = 256;

#[derive(Clone, Debug)]
pub struct AugmentationBuild {
    pub base: GeneratingSet,
    pub epsilon: f64,
    pub u: Word,
    pub v: Word,
    /// Longest generator length used to certify the markers are absent.
    pub marker_horizon: usize,
    pub m: Vec<usize>,
    pub w: Vec<Word>,
    pub f: Vec<Word>,
    /// Generator-length horizons used when covering length-`i` words.
    pub cover_horizons: Vec<usize>,
    pub lambda_star: f64,
    /// Upper bound on `f~(λ* e^ε)` including every unbuilt `f_i`.
    pub bound_at_target: f64,
    pub augmented: GeneratingSet,
    pub solution: CharacteristicSolution,
}

impl AugmentationBuild {
    pub fn lambda_tilde(&self) -> Option<f64> {
        self.solution.lambda_star
    }

    /// `λ* < λ~* < λ* e^ε`.
    pub fn within_bounds(&self) -> bool {
        self.lambda_tilde()
            .is_some_and(|l| l > self.lambda_star && l < self.lambda_star * self.epsilon.exp())
    }

    pub fn to_json(&self) -> Value {
        let a = self.base.alphabet();
        json!({
            "base": { "name": self.base.name(), "params": self.base.family().params() },
            "epsilon": self.epsilon,
            "u": a.render(&self.u),
            "v": a.render(&self.v),
            "marker_horizon": self.marker_horizon,
            "m": self.m,
            "w": self.w.iter().map(|w| a.render(w)).collect::<Vec<_>>(),
            "f": self.f.iter().map(|w| a.render(w)).collect::<Vec<_>>(),
            "f_lengths": self.f.iter().map(Word::len).collect::<Vec<_>>(),
            "cover_horizons": self.cover_horizons,
            "lambda_star": self.lambda_star,
            "lambda_tilde": self.lambda_tilde(),
            "lambda_upper": self.lambda_star * self.epsilon.exp(),
            "bound_at_target": self.bound_at_target,
            "solution": self.solution,
            "within_bounds": self.within_bounds(),
        })
    }
}

/// Longest length `H` such that generators of length at most `H` number at most the budget.
fn horizon(g: &GeneratingSet, at_least: usize) -> Result<usize> {
    let cap = g.max_len().unwrap_or(usize::MAX);
    let mut total = BigUint::from(0u8);
    let mut h = 0;
    let limit = BigUint::from(PREFIX_BUDGET);
    for n in 1..=cap.min(4096) {
        total += g.count(n)?;
        if total > limit {
            break;
        }
        h = n;
    }
    Ok(h.max(at_least.min(cap)))
}

/// Markers `u`, `v`: the first two absent primitive words of the least length, not conjugate.
pub fn find_markers(g: &GeneratingSet) -> Result<(Word, Word, usize)> {
    let h = horizon(g, 1)?;
    let prefix = GeneratingSet::explicit(g.alphabet().clone(), g.enumerate(h)?)?;
    let dfa = factor_automaton(&prefix)?;
    for len in 2..=MAX_MARKER_LEN {
        let mut found: Vec<Word> = Vec::new();
        for w in g.alphabet().words_of_length(len) {
            if dfa.accepts(&w) || !w.is_primitive() || found.iter().any(|x| x.is_conjugate(&w)) {
                continue;
            }
            found.push(w);
            if found.len() == 2 {
                let v = found.pop().expect("two markers");
                return Ok((found.pop().expect("two markers"), v, h));
            }
        }
    }
    Err(Error::Construction(format!(
        "no pair of absent marker words up to length {MAX_MARKER_LEN}"
    )))
}

/// Flower automaton state: generator index and position (position 0 is the hub).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Pos {
    block: usize,
    at: usize,
}

/// A run reading a target word: the enclosing block concatenation and its final block.
struct Witness {
    segment: Vec<Symbol>,
    last_block: usize,
}

/// Length-`n` factors of `blocks^*`, each with a covering block concatenation.
fn factors_with_witnesses(blocks: &[Word], n: usize) -> BTreeMap<Word, Witness> {
    let mut out: BTreeMap<Word, Witness> = BTreeMap::new();
    // starts: the hub plus every interior position
    let mut starts = vec![None];
    for (b, w) in blocks.iter().enumerate() {
        for at in 1..w.len() {
            starts.push(Some(Pos { block: b, at }));
        }
    }
    struct Frame {
        label: Vec<Symbol>,
        // blocks entered, in order; the first may be entered mid-way
        path: Vec<usize>,
        state: Option<Pos>,
    }
    for start in starts {
        let mut stack = vec![Frame {
            label: Vec::new(),
            path: start.map(|p| vec![p.block]).unwrap_or_default(),
            state: start,
        }];
        while let Some(fr) = stack.pop() {
            if fr.label.len() == n {
                let word = Word(fr.label);
                if out.contains_key(&word) {
                    continue;
                }
                let mut segment = Vec::new();
                for &b in &fr.path {
                    segment.extend_from_slice(&blocks[b]);
                }
                let last_block = *fr.path.last().expect("nonempty path");
                out.insert(word, Witness { segment, last_block });
                continue;
            }
            match fr.state {
                None => {
                    for (b, w) in blocks.iter().enumerate().rev() {
                        let mut label = fr.label.clone();
                        label.push(w[0]);
                        let mut path = fr.path.clone();
                        path.push(b);
                        let state = (w.len() > 1).then_some(Pos { block: b, at: 1 });
                        stack.push(Frame { label, path, state });
                    }
                }
                Some(p) => {
                    let w = &blocks[p.block];
                    let mut label = fr.label;
                    label.push(w[p.at]);
                    let state = (p.at + 1 < w.len()).then_some(Pos { block: p.block, at: p.at + 1 });
                    stack.push(Frame { label, path: fr.path, state });
                }
            }
        }
    }
    out
}

/// `w(i)`: extends `prev` by block concatenations until every length-`i` word
/// of the truncated code is a factor, then pads with `filler` to length `min_len`.
fn covering_word(
    prev: &[Symbol],
    blocks: &[Word],
    in_base: &[bool],
    filler: &Word,
    i: usize,
    min_len: usize,
) -> Vec<Symbol> {
    let mut w = prev.to_vec();
    let mut covered: HashSet<Vec<Symbol>> = w.windows(i).map(<[Symbol]>::to_vec).collect();
    let mut last_in_base = true;
    for (t, wit) in factors_with_witnesses(blocks, i) {
        if covered.contains(t.as_slice()) {
            continue;
        }
        let from = w.len().saturating_sub(i - 1);
        w.extend_from_slice(&wit.segment);
        covered.extend(w[from..].windows(i).map(<[Symbol]>::to_vec));
        last_in_base = in_base[wit.last_block];
    }
    if !last_in_base || w.len() == prev.len() {
        w.extend_from_slice(filler);
    }
    while w.len() < min_len {
        w.extend_from_slice(filler);
    }
    w
}

/// `u^{2^i n} w v^{2^i n}` with `n = |w|`.
fn framed(u: &Word, v: &Word, w: &[Symbol], i: usize) -> Result<Word> {
    let reps = w
        .len()
        .checked_mul(1usize.checked_shl(i as u32).unwrap_or(usize::MAX))
        .filter(|r| r.saturating_mul(2 * u.len()).saturating_add(w.len()) <= LENGTH_BUDGET)
        .ok_or_else(|| Error::Construction(format!("f_{i} exceeds the length budget {LENGTH_BUDGET}")))?;
    let mut out = u.repeat(reps).0;
    out.extend_from_slice(w);
    out.extend(v.repeat(reps).0);
    Ok(Word(out))
}

fn build_words(
    base: &GeneratingSet,
    u: &Word,
    v: &Word,
    depth: usize,
    m: &[usize],
) -> Result<(Vec<Word>, Vec<Word>, Vec<usize>)> {
    let short = base.enumerate(horizon(base, 1)?)?;
    let filler = short.first().cloned().ok_or(Error::EmptyCode(0))?;
    let first = (1..)
        .take_while(|&n| base.max_len().is_none_or(|c| n <= c) && n <= LENGTH_BUDGET)
        .filter(|&n| n >= m[0].max(3))
        .find_map(|n| base.generators(n).ok().and_then(|g| g.first().cloned()))
        .ok_or_else(|| Error::Construction("base has no generator of length at least 3".into()))?;
    let mut ws = vec![first.clone()];
    let mut fs = vec![framed(u, v, &first, 1)?];
    let mut horizons = vec![first.len()];
    for i in 2..=depth {
        let h = horizon(base, 2 * i)?;
        let mut blocks = base.enumerate(h)?;
        let mut in_base = vec![true; blocks.len()];
        blocks.extend(fs.iter().cloned());
        in_base.resize(blocks.len(), false);
        let w = covering_word(&ws[i - 2], &blocks, &in_base, &filler, i, m[i - 1]);
        let f = framed(u, v, &w, i)?;
        if fs.iter().map(Word::len).sum::<usize>() + f.len() > LENGTH_BUDGET {
            return Err(Error::Construction(format!("f_1..f_{i} exceed the length budget {LENGTH_BUDGET}")));
        }
        ws.push(Word(w));
        fs.push(f);
        horizons.push(h);
    }
    Ok((ws, fs, horizons))
}

/// Upper bound on `sum_G λ^{-|g|} + sum_i λ^{-|f_i|}`, counting every unbuilt `f_i` (all longer than the last).
fn augmented_bound(base: &GeneratingSet, f: &[Word], lambda: f64) -> Result<f64> {
    let (value, tail) = characteristic_fn(base, lambda, CERT_DEPTH)?;
    let built: f64 = f.iter().map(|w| lambda.powi(-(w.len() as i32))).sum();
    let last = f.last().map_or(0, Word::len);
    let unbuilt = lambda.powf(-((last + 1) as f64)) / (1.0 - 1.0 / lambda);
    Ok(value + tail + built + unbuilt)
}

/// Adds `f_1..f_depth` to `base`, doubling the `m`-schedule until `f~(λ* e^ε) < 1`.
pub fn build_augmentation(
    base: &GeneratingSet,
    epsilon: f64,
    depth: usize,
    m_schedule: Option<&[usize]>,
) -> Result<AugmentationBuild> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Construction("epsilon: must be positive".into()));
    }
    if depth == 0 {
        return Err(Error::Construction("depth: at least one new generator".into()));
    }
    let base_sol = solve_entropy(base, SOLVER_TOL)?;
    let lambda_star = base_sol.lambda()?;
    if let Some(h) = base.generator_entropy_closed_form() {
        if h >= lambda_star.ln() {
            return Err(Error::Construction(format!(
                "base: h(G) = {h} is not below log λ* = {}",
                lambda_star.ln()
            )));
        }
    }
    let (u, v, marker_horizon) = find_markers(base)?;
    let mut m: Vec<usize> = match m_schedule {
        Some(s) if s.len() >= depth => s[..depth].to_vec(),
        Some(s) => {
            return Err(Error::Construction(format!(
                "m: {} entries given, depth {depth} needs {depth}",
                s.len()
            )))
        }
        None => vec![1; depth],
    };
    let target = lambda_star * epsilon.exp();
    for _ in 0..MAX_ROUNDS {
        let (w, f, cover_horizons) = build_words(base, &u, &v, depth, &m)?;
        let bound = augmented_bound(base, &f, target)?;
        if bound < 1.0 {
            let family = AugmentedFamily::new(base.clone(), f.clone(), json!({ "epsilon": epsilon, "depth": depth }));
            let augmented = GeneratingSet::from_arc(Arc::new(family), None)?;
            let solution = solve_entropy(&augmented, SOLVER_TOL)?;
            return Ok(AugmentationBuild {
                base: base.clone(),
                epsilon,
                u,
                v,
                marker_horizon,
                m,
                w,
                f,
                cover_horizons,
                lambda_star,
                bound_at_target: bound,
                augmented,
                solution,
            });
        }
        for (mi, wi) in m.iter_mut().zip(&w) {
            *mi = (2 * wi.len()).max(2 * *mi);
        }
    }
    Err(Error::Construction(format!(
        "m-schedule did not certify λ~* < λ* e^ε after {MAX_ROUNDS} doublings"
    )))
}

/// `G ∪ {f_1, ..., f_d}`.
#[derive(Debug)]
pub struct AugmentedFamily {
    base: GeneratingSet,
    /// Sorted by length (strictly increasing).
    extra: Vec<Word>,
    params: Value,
}

impl AugmentedFamily {
    pub fn new(base: GeneratingSet, extra: Vec<Word>, params: Value) -> Self {
        Self { base, extra, params }
    }

    pub fn base(&self) -> &GeneratingSet {
        &self.base
    }

    pub fn extra(&self) -> &[Word] {
        &self.extra
    }

    fn extra_of_len(&self, n: usize) -> impl Iterator<Item = &Word> {
        self.extra.iter().filter(move |f| f.len() == n)
    }
}

impl GeneratorFamily for AugmentedFamily {
    fn name(&self) -> &str {
        "augmented"
    }

    fn params(&self) -> Value {
        let mut p = self.params.clone();
        if let Value::Object(map) = &mut p {
            map.insert(
                "base".into(),
                json!({ "name": self.base.name(), "params": self.base.family().params() }),
            );
        }
        p
    }

    fn alphabet(&self) -> &Alphabet {
        self.base.alphabet()
    }

    fn tail(&self) -> Option<TailBound> {
        let last = self.extra.iter().map(Word::len).max().unwrap_or(0);
        self.base.tail().map(|t| TailBound {
            n0: t.n0.max(last + 1),
            ..t
        })
    }

    fn max_len(&self) -> Option<usize> {
        let last = self.extra.iter().map(Word::len).max().unwrap_or(0);
        self.base.max_len().map(|m| m.max(last))
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        let mut out: Vec<Word> = self.base.generators(n)?.as_ref().clone();
        out.extend(self.extra_of_len(n).cloned());
        out.sort();
        Ok(out)
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        let c = self.base.count(n).ok()?;
        Some(c + self.extra_of_len(n).count())
    }

    fn ln_count(&self, n: usize) -> Option<f64> {
        let base = self.base.ln_count(n).ok()?;
        let k = self.extra_of_len(n).count() as f64;
        Some(if k == 0.0 {
            base
        } else if base == f64::NEG_INFINITY {
            k.ln()
        } else {
            base + (k * (-base).exp()).ln_1p()
        })
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        self.base.contains(w) || self.extra.iter().any(|f| f.as_slice() == w)
    }

    fn generator_entropy(&self) -> Option<f64> {
        self.base.generator_entropy_closed_form()
    }

    fn series_tail(&self, y: f64, from: usize, power: u32) -> Option<Option<f64>> {
        let base = match self.base.series_tail(y, from, power) {
            Ok(t) => t,
            Err(_) => return Some(None),
        };
        let extra: f64 = self
            .extra
            .iter()
            .filter(|f| f.len() > from)
            .map(|f| (f.len() as f64).powi(power as i32) * y.powi(f.len() as i32))
            .sum();
        Some(base.map(|b| b + extra))
    }

    fn automaton(&self, max_len: usize) -> Option<Result<CodeAutomaton>> {
        let base = match self.base.automaton(max_len) {
            Ok(a) => a,
            Err(e) => return Some(Err(e)),
        };
        let fitting: Vec<Word> = self.extra.iter().filter(|f| f.len() <= max_len).cloned().collect();
        if fitting.is_empty() {
            return Some(Ok(base.as_ref().clone()));
        }
        let extra = CodeAutomaton::from_words(self.alphabet().len(), &fitting, max_len);
        Some(Ok(CodeAutomaton::union(&base, &extra)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::preset;
    use crate::genset::unique_representation_check;

    #[test]
    fn three_mme_markers_and_first_generator() {
        let g = preset("three_mme", &Value::Null).unwrap();
        let (u, v, _) = find_markers(&g).unwrap();
        let a = g.alphabet();
        assert_eq!((a.render(&u), a.render(&v)), ("04".into(), "14".into()));
        let b = build_augmentation(&g, 0.05, 2, None).unwrap();
        assert_eq!(a.render(&b.w[0]), "024");
        assert_eq!(b.f[0].len(), 2 * (2 * 3) * 2 + 3);
        assert_eq!(a.render(&b.f[0]), format!("{}024{}", "04".repeat(6), "14".repeat(6)));
        assert!(b.within_bounds(), "{:?}", b.solution);
        assert!(b.w[1].len() > b.w[0].len());
        assert!(b.w[1].starts_with(&b.w[0]));
        assert!(b.f[1].len() > b.f[0].len());
    }

    #[test]
    fn covering_word_contains_every_factor() {
        let a = Alphabet::from_chars("01").unwrap();
        let blocks: Vec<Word> = ["0", "011", "0111"].iter().map(|s| a.parse(s).unwrap()).collect();
        let filler = blocks[0].clone();
        let w = covering_word(&blocks[1], &blocks, &[true; 3], &filler, 4, 30);
        let factors = factors_with_witnesses(&blocks, 4);
        for t in factors.keys() {
            assert!(w.windows(4).any(|x| x == t.as_slice()), "{}", a.render(t));
        }
        assert!(w.len() >= 30 && w.starts_with(&blocks[1]));
        // the result parses as a concatenation of blocks
        let set = GeneratingSet::explicit(a.clone(), blocks).unwrap();
        let parses = crate::words::factorize(&w, &set, 4, 1).count;
        assert!(parses >= 1u8.into());
    }

    #[test]
    fn augmented_family_counts() {
        let g = preset("three_mme", &Value::Null).unwrap();
        let b = build_augmentation(&g, 0.05, 1, None).unwrap();
        let aug = &b.augmented;
        assert_eq!(aug.count(27).unwrap(), BigUint::from(4u64.pow(9) + 1));
        assert_eq!(aug.count(26).unwrap(), BigUint::from(0u8));
        assert!(aug.contains(&b.f[0]));
        let report = unique_representation_check(aug, 2 * b.f[0].len()).unwrap();
        assert!(report.pass);
    }
}
