//! Generating sets: explicit word lists and lazily enumerated families.
//!
//! Every generating set is a [`GeneratorFamily`] behind a shared
//! [`GeneratingSet`] handle. The handle memoizes the length spectrum, the
//! per-length generator lists and the truncated code automaton, so all
//! queries are cheap to repeat and safe to issue from several threads.

pub(crate) mod automaton;
mod file;
mod patterns;
mod ud;

pub use automaton::CodeAutomaton;
pub use file::{FamilyRef, GenSetDocument, GenSetKind, TailDoc};
pub use patterns::{AutomatonPatterns, ListPatterns, PatternSums};
pub use ud::{
    ambiguity_search, brute_force_ambiguity, sardinas_patterson, sardinas_patterson_words,
    unique_representation_check,
    AmbiguityWitness, UdVerdict, UniqueRepresentationReport,
};

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Membership, Symbol, Word};

/// Default truncation for generator lengths whenever a finite cut is needed.
pub const DEFAULT_MAX_GEN_LEN: usize = 64;

/// Largest number of generators materialized for one length.
pub const ENUMERATION_BUDGET: usize = 1 << 21;

/// Codes with at most this many generators get list-scanning pattern sums.
const LIST_PATTERN_LIMIT: usize = 4096;

/// Certifies `c(n) <= C * rho^n` for every `n >= n0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: f64,
    #[serde(rename = "N0")]
    pub n0: usize,
}

impl TailBound {
    pub fn new(c: f64, rho: f64, n0: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(crate::error::param("tail.C", "must be positive"));
        }
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(crate::error::param("tail.rho", "must be >= 1"));
        }
        Ok(Self { c, rho, n0: n0.max(1) })
    }

    /// Upper bound for `sum_{n > from} n^power * C * (rho*y)^n`, or `None` when it diverges.
    pub fn geometric_tail(&self, y: f64, from: usize, power: u32) -> Option<f64> {
        let q = self.rho * y;
        if q.is_nan() || q >= 1.0 {
            return None;
        }
        Some(self.c * poly_geometric_tail(q, from, power))
    }
}

/// `sum_{n > from} n^power q^n` for `0 <= q < 1` and `power <= 2`.
pub(crate) fn poly_geometric_tail(q: f64, from: usize, power: u32) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    q.powf((from + 1) as f64) * shifted_poly_geometric(q, from + 1, power)
}

/// `sum_{j >= 0} (m + j)^power q^j` for `0 <= q < 1` and `power <= 2`.
pub(crate) fn shifted_poly_geometric(q: f64, m: usize, power: u32) -> f64 {
    let m = m as f64;
    let r = 1.0 - q;
    match power {
        0 => 1.0 / r,
        1 => m / r + q / (r * r),
        2 => m * m / r + (2.0 * m + 1.0) * q / (r * r) + 2.0 * q * q / (r * r * r),
        _ => panic!("shifted_poly_geometric supports power <= 2"),
    }
}

/// A (possibly infinite) generating set described by its enumerator.
///
/// Implementors only need `name`, `alphabet`, `tail`/`max_len` and
/// `generators`; everything else has a default derived from enumeration.
pub trait GeneratorFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn params(&self) -> serde_json::Value {
        serde_json::Value::Object(Default::default())
    }

    fn alphabet(&self) -> &Alphabet;

    /// Growth certificate; `None` only for finite sets.
    fn tail(&self) -> Option<TailBound>;

    /// Length of the longest generator for finite sets.
    fn max_len(&self) -> Option<usize> {
        None
    }

    /// Unique-representation certificate carried by families with a known proof.
    fn certificate(&self) -> Option<&str> {
        None
    }

    /// Generators of length exactly `n`, lexicographically sorted.
    fn generators(&self, n: usize) -> Result<Vec<Word>>;

    /// Closed form for `c(n)` when one is known.
    fn closed_count(&self, _n: usize) -> Option<BigUint> {
        None
    }

    /// Closed form for `ln c(n)` (`-inf` when `c(n) = 0`).
    fn ln_count(&self, n: usize) -> Option<f64> {
        self.closed_count(n).map(|c| ln_biguint(&c))
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        self.generators(w.len())
            .map(|g| g.binary_search_by(|x| x.as_slice().cmp(w)).is_ok())
            .unwrap_or(false)
    }

    /// Closed form for `h(G) = limsup (1/n) log c(n)`.
    fn generator_entropy(&self) -> Option<f64> {
        None
    }

    /// Family-specific bound for `sum_{n > from} n^power c(n) y^n`; `None` defers to the tail bound.
    fn series_tail(&self, _y: f64, _from: usize, _power: u32) -> Option<Option<f64>> {
        None
    }

    /// Uniform generator of length `n` when the family can do better than enumeration.
    fn sample(&self, _n: usize, _rng: &mut dyn RngCore) -> Option<Result<Word>> {
        None
    }

    /// Unambiguous automaton for the code truncated at `max_len`, when cheaper than a trie.
    fn automaton(&self, _max_len: usize) -> Option<Result<CodeAutomaton>> {
        None
    }

    /// Length-weighted pattern statistics, when cheaper than the automaton route.
    fn pattern_sums(&self, _x: f64, _max_len: usize) -> Option<Result<Box<dyn PatternSums>>> {
        None
    }
}

/// Natural log of a big unsigned integer (`-inf` for zero).
pub fn ln_biguint(c: &BigUint) -> f64 {
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = c.bits();
    if bits <= 1000 {
        return c.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (c >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A finite, explicitly listed code.
#[derive(Debug)]
pub struct ExplicitCode {
    alphabet: Alphabet,
    by_len: Vec<Vec<Word>>,
}

impl ExplicitCode {
    pub fn new(alphabet: Alphabet, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut by_len: Vec<Vec<Word>> = Vec::new();
        for w in words {
            if w.is_empty() {
                return Err(Error::Format("words: the empty word is not a generator".into()));
            }
            if let Some(&s) = w.iter().find(|&&s| s as usize >= alphabet.len()) {
                return Err(Error::Format(format!("words: symbol index {s} outside alphabet")));
            }
            if by_len.len() <= w.len() {
                by_len.resize(w.len() + 1, Vec::new());
            }
            by_len[w.len()].push(w);
        }
        for class in &mut by_len {
            class.sort();
            class.dedup();
        }
        if by_len.iter().all(Vec::is_empty) {
            return Err(Error::EmptyCode(0));
        }
        Ok(Self { alphabet, by_len })
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.by_len.iter().flatten()
    }
}

impl GeneratorFamily for ExplicitCode {
    fn name(&self) -> &str {
        "explicit"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        None
    }

    fn max_len(&self) -> Option<usize> {
        Some(self.by_len.len().saturating_sub(1))
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        Ok(self.by_len.get(n).cloned().unwrap_or_default())
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        Some(BigUint::from(self.by_len.get(n).map_or(0, Vec::len)))
    }
}

#[derive(Default)]
struct Memo {
    counts: Vec<Option<BigUint>>,
    ln_counts: Vec<f64>,
    generators: HashMap<usize, Arc<Vec<Word>>>,
    automaton: Option<Arc<CodeAutomaton>>,
}

struct Inner {
    family: Arc<dyn GeneratorFamily>,
    tail: Option<TailBound>,
    memo: Mutex<Memo>,
}

/// Shared handle to a generating set with internally synchronized caches.
#[derive(Clone)]
pub struct GeneratingSet {
    inner: Arc<Inner>,
}

impl fmt::Debug for GeneratingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingSet")
            .field("family", &self.inner.family)
            .field("tail", &self.inner.tail)
            .finish()
    }
}

impl GeneratingSet {
    /// Wraps a family, validating its tail bound on `N0..=N0+64`.
    pub fn from_family(family: impl GeneratorFamily + 'static) -> Result<Self> {
        Self::from_arc(Arc::new(family), None)
    }

    /// Wraps a family with an explicit tail bound replacing the built-in one.
    pub fn from_arc(family: Arc<dyn GeneratorFamily>, tail: Option<TailBound>) -> Result<Self> {
        let tail = tail.or_else(|| family.tail());
        if tail.is_none() && family.max_len().is_none() {
            return Err(Error::Format(format!(
                "tail: family {:?} is infinite and needs a tail bound",
                family.name()
            )));
        }
        let set = Self {
            inner: Arc::new(Inner {
                family,
                tail,
                memo: Mutex::new(Memo::default()),
            }),
        };
        if let Some(t) = tail {
            set.validate_tail(t)?;
        }
        Ok(set)
    }

    pub fn explicit(alphabet: Alphabet, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        Self::from_family(ExplicitCode::new(alphabet, words)?)
    }

    /// Explicit set parsed from rendered words.
    pub fn from_strs(alphabet: Alphabet, words: &[&str]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|w| alphabet.parse(w))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(alphabet, parsed)
    }

    fn validate_tail(&self, t: TailBound) -> Result<()> {
        for n in t.n0..=t.n0 + 64 {
            if self.inner.family.max_len().is_some_and(|m| n > m) {
                break;
            }
            let ln_c = self.ln_count(n)?;
            let ln_bound = t.c.ln() + n as f64 * t.rho.ln();
            if ln_c > ln_bound + 1e-9 * ln_bound.abs().max(1.0) {
                return Err(Error::TailViolation {
                    n,
                    count: self.count(n)?.to_string(),
                    bound: ln_bound.exp(),
                });
            }
        }
        Ok(())
    }

    pub fn family(&self) -> &dyn GeneratorFamily {
        self.inner.family.as_ref()
    }

    pub fn name(&self) -> &str {
        self.inner.family.name()
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.inner.family.alphabet()
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.inner.tail
    }

    pub fn max_len(&self) -> Option<usize> {
        self.inner.family.max_len()
    }

    pub fn is_finite(&self) -> bool {
        self.max_len().is_some()
    }

    pub fn certificate(&self) -> Option<&str> {
        self.inner.family.certificate()
    }

    pub fn generator_entropy_closed_form(&self) -> Option<f64> {
        self.inner.family.generator_entropy()
    }

    /// Generators of length `n` (memoized, lexicographically sorted).
    pub fn generators(&self, n: usize) -> Result<Arc<Vec<Word>>> {
        if let Some(g) = self.memo().generators.get(&n) {
            return Ok(g.clone());
        }
        if let Some(c) = self.inner.family.closed_count(n) {
            if c > BigUint::from(ENUMERATION_BUDGET) {
                return Err(Error::Budget {
                    n,
                    count: c.to_string(),
                    budget: ENUMERATION_BUDGET,
                });
            }
        }
        let list = Arc::new(self.inner.family.generators(n)?);
        self.memo().generators.insert(n, list.clone());
        Ok(list)
    }

    /// All generators of length at most `max_len`, in shortlex order.
    pub fn enumerate(&self, max_len: usize) -> Result<Vec<Word>> {
        let top = self.max_len().map_or(max_len, |m| m.min(max_len));
        let mut out = Vec::new();
        for n in 1..=top {
            out.extend(self.generators(n)?.iter().cloned());
            if out.len() > ENUMERATION_BUDGET {
                return Err(Error::Budget {
                    n,
                    count: out.len().to_string(),
                    budget: ENUMERATION_BUDGET,
                });
            }
        }
        Ok(out)
    }

    /// The first `m` generators in shortlex order (fewer if the set is smaller).
    pub fn prefix(&self, m: usize) -> Result<Vec<Word>> {
        let mut out = Vec::with_capacity(m);
        let mut n = 1;
        while out.len() < m {
            if self.max_len().is_some_and(|top| n > top) {
                break;
            }
            let g = self.generators(n)?;
            out.extend(g.iter().take(m - out.len()).cloned());
            n += 1;
        }
        Ok(out)
    }

    /// Exact `c(n)`.
    pub fn count(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(BigUint::zero());
        }
        if let Some(Some(c)) = self.memo().counts.get(n) {
            return Ok(c.clone());
        }
        let c = match self.inner.family.closed_count(n) {
            Some(c) => c,
            None => BigUint::from(self.generators(n)?.len()),
        };
        let mut memo = self.memo();
        if memo.counts.len() <= n {
            memo.counts.resize(n + 1, None);
        }
        memo.counts[n] = Some(c.clone());
        Ok(c)
    }

    /// `ln c(n)`, memoized; `-inf` when there is no generator of length `n`.
    pub fn ln_count(&self, n: usize) -> Result<f64> {
        if n == 0 || self.max_len().is_some_and(|m| n > m) {
            return Ok(f64::NEG_INFINITY);
        }
        {
            let memo = self.memo();
            if let Some(&v) = memo.ln_counts.get(n) {
                if !v.is_nan() {
                    return Ok(v);
                }
            }
        }
        let v = match self.inner.family.ln_count(n) {
            Some(v) => v,
            None => ln_biguint(&self.count(n)?),
        };
        let mut memo = self.memo();
        if memo.ln_counts.len() <= n {
            memo.ln_counts.resize(n + 1, f64::NAN);
        }
        memo.ln_counts[n] = v;
        Ok(v)
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        !w.is_empty()
            && !self.max_len().is_some_and(|m| w.len() > m)
            && self.inner.family.contains(w)
    }

    /// Bound for `sum_{n > from} n^power c(n) y^n` (`None` when not certifiable).
    pub fn series_tail(&self, y: f64, from: usize, power: u32) -> Result<Option<f64>> {
        if let Some(m) = self.max_len() {
            if from >= m {
                return Ok(Some(0.0));
            }
        }
        if let Some(t) = self.inner.family.series_tail(y, from, power) {
            return Ok(t);
        }
        let Some(tail) = self.inner.tail else {
            // finite set: sum the remaining terms exactly
            let m = self.max_len().expect("finite set");
            let mut s = 0.0;
            for n in from + 1..=m {
                s += (n as f64).powi(power as i32) * (self.ln_count(n)? + n as f64 * y.ln()).exp();
            }
            return Ok(Some(s));
        };
        let start = from.max(tail.n0.saturating_sub(1));
        let Some(geo) = tail.geometric_tail(y, start, power) else {
            return Ok(None);
        };
        let mut exact = 0.0;
        for n in from + 1..=start {
            exact += (n as f64).powi(power as i32) * (self.ln_count(n)? + n as f64 * y.ln()).exp();
        }
        Ok(Some(exact + geo))
    }

    /// Uniformly random generator of length `n`.
    pub fn sample_generator(&self, n: usize, rng: &mut dyn RngCore) -> Result<Word> {
        if let Some(r) = self.inner.family.sample(n, rng) {
            return r;
        }
        let small = self
            .count(n)
            .map(|c| c <= BigUint::from(1usize << 16))
            .unwrap_or(false);
        if small {
            let g = self.generators(n)?;
            if g.is_empty() {
                return Err(Error::Enumeration {
                    n,
                    reason: "no generator of this length".into(),
                });
            }
            let k = (rng.next_u64() % g.len() as u64) as usize;
            return Ok(g[k].clone());
        }
        self.automaton(n)?.sample_uniform(n, rng)
    }

    /// Unambiguous automaton recognizing the generators of length at most `max_len`.
    pub fn automaton(&self, max_len: usize) -> Result<Arc<CodeAutomaton>> {
        if let Some(a) = &self.memo().automaton {
            if a.max_len() == max_len {
                return Ok(a.clone());
            }
        }
        let built = match self.inner.family.automaton(max_len) {
            Some(a) => a?,
            None => CodeAutomaton::from_words(self.alphabet().len(), &self.enumerate(max_len)?, max_len),
        };
        let built = Arc::new(built);
        self.memo().automaton = Some(built.clone());
        Ok(built)
    }

    /// Pattern statistics with weight `x^|g|` over generators of length at most `max_len`.
    pub fn pattern_sums(&self, x: f64, max_len: usize) -> Result<Box<dyn PatternSums>> {
        if let Some(p) = self.inner.family.pattern_sums(x, max_len) {
            return p;
        }
        let top = self.max_len().map_or(max_len, |m| m.min(max_len));
        let mut total = BigUint::zero();
        for n in 1..=top {
            total += self.count(n)?;
        }
        if total <= BigUint::from(LIST_PATTERN_LIMIT) {
            return Ok(Box::new(ListPatterns::new(self.enumerate(top)?, x, top)));
        }
        let a = self.automaton(top)?;
        Ok(Box::new(AutomatonPatterns::new(a, x, top)))
    }

    /// JSON document describing this set.
    pub fn to_document(&self) -> Result<GenSetDocument> {
        let family = self.family();
        if family.name() == "explicit" {
            let words = self
                .enumerate(self.max_len().unwrap_or(0))?
                .iter()
                .map(|w| self.alphabet().render(w))
                .collect();
            Ok(GenSetDocument {
                alphabet: Some(self.alphabet().tokens().to_vec()),
                kind: GenSetKind::Explicit,
                words: Some(words),
                family: None,
                tail: None,
            })
        } else {
            Ok(GenSetDocument {
                alphabet: Some(self.alphabet().tokens().to_vec()),
                kind: GenSetKind::Family,
                words: None,
                family: Some(FamilyRef {
                    name: family.name().to_string(),
                    params: family.params(),
                }),
                tail: self.tail().map(TailDoc::from),
            })
        }
    }

    fn memo(&self) -> std::sync::MutexGuard<'_, Memo> {
        self.inner.memo.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl Membership for GeneratingSet {
    fn is_generator(&self, block: &[Symbol]) -> bool {
        self.contains(block)
    }
}

/// `c(1..=n_max)`.
pub fn length_spectrum(set: &GeneratingSet, n_max: usize) -> Result<Vec<BigUint>> {
    if n_max == 0 {
        return Err(crate::error::param("N", "must be at least 1"));
    }
    (1..=n_max).map(|n| set.count(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_spectrum() {
        let a = Alphabet::from_chars("01").unwrap();
        let g = GeneratingSet::from_strs(a, &["0", "01"]).unwrap();
        let spec = length_spectrum(&g, 4).unwrap();
        assert_eq!(spec, vec![1u8, 1, 0, 0].into_iter().map(BigUint::from).collect::<Vec<_>>());
        assert!(g.contains(&[0, 1]));
        assert!(!g.contains(&[1]));
        assert!(length_spectrum(&g, 0).is_err());
    }

    #[test]
    fn explicit_rejects_empty_word() {
        let a = Alphabet::from_chars("01").unwrap();
        assert!(GeneratingSet::explicit(a, [Word::empty()]).is_err());
    }

    #[test]
    fn prefix_is_shortlex() {
        let a = Alphabet::from_chars("01").unwrap();
        let g = GeneratingSet::from_strs(a.clone(), &["11", "0", "10", "011"]).unwrap();
        let p: Vec<String> = g.prefix(3).unwrap().iter().map(|w| a.render(w)).collect();
        assert_eq!(p, ["0", "10", "11"]);
    }

    #[test]
    fn geometric_tail_closed_forms() {
        // compare against direct summation
        for &(q, from) in &[(0.5f64, 0usize), (0.9, 10), (0.3, 3)] {
            for power in 0..=2u32 {
                let direct: f64 = (from + 1..5000)
                    .map(|n| (n as f64).powi(power as i32) * q.powi(n as i32))
                    .sum();
                let closed = poly_geometric_tail(q, from, power);
                assert!((direct - closed).abs() <= 1e-12 * direct.max(1.0), "{q} {from} {power}");
            }
        }
    }

    #[test]
    fn ln_biguint_large() {
        let big = BigUint::from(3u8).pow(2000);
        assert!((ln_biguint(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(ln_biguint(&BigUint::zero()), f64::NEG_INFINITY);
    }
}
