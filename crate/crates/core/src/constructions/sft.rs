//! Subshifts of finite type given by forbidden words.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Symbol, Word};

/// Largest number of `L`-blocks materialized for the follower graph.
pub const BLOCK_BUDGET: usize = 1 << 20;

/// JSON form: `{"alphabet": [...], "forbidden": [...], "periodic": "..."}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SftDocument {
    pub alphabet: Vec<String>,
    pub forbidden: Vec<String>,
    pub periodic: String,
}

/// An irreducible SFT `Z` with a periodic word `p` and a minimal forbidden word `a = k ã`.
#[derive(Clone, Debug)]
pub struct SftSpec {
    alphabet: Alphabet,
    forbidden: Vec<Word>,
    periodic: Word,
    /// Memory: states of the follower graph are words of this length.
    memory: usize,
    /// Essential states (those on bi-infinite paths).
    essential: HashSet<Vec<Symbol>>,
    prefixes: HashSet<Vec<Symbol>>,
    a: Word,
}

impl SftSpec {
    /// Validates irreducibility, admissibility of `p^∞` and that `Z` is not a full shift.
    pub fn new(alphabet: Alphabet, forbidden: Vec<Word>, periodic: Word) -> Result<Self> {
        if forbidden.iter().any(Word::is_empty) {
            return Err(Error::Construction("forbidden: the empty word forbids everything".into()));
        }
        if periodic.is_empty() {
            return Err(Error::Construction("periodic: must be nonempty".into()));
        }
        let memory = forbidden.iter().map(Word::len).max().unwrap_or(1).saturating_sub(1).max(1);
        let k = alphabet.len();
        if (k as f64).powi(memory as i32) > BLOCK_BUDGET as f64 {
            return Err(Error::Construction(format!(
                "forbidden: memory {memory} over {k} symbols exceeds the block budget"
            )));
        }
        let clean = |w: &[Symbol]| !forbidden.iter().any(|f| w.windows(f.len()).any(|x| x == f.as_slice()));
        let mut states: Vec<Vec<Symbol>> = alphabet.words_of_length(memory).map(|w| w.0).filter(|w| clean(w)).collect();
        // trim to the essential graph
        loop {
            let live: HashSet<&[Symbol]> = states.iter().map(Vec::as_slice).collect();
            let succ = |s: &[Symbol]| {
                (0..k as Symbol).filter(|&a| {
                    let mut e = s.to_vec();
                    e.push(a);
                    clean(&e) && live.contains(&e[1..])
                })
                .count()
            };
            let mut has_pred: HashSet<&[Symbol]> = HashSet::new();
            for s in &states {
                for a in 0..k as Symbol {
                    let mut e = s.clone();
                    e.push(a);
                    if clean(&e) {
                        if let Some(t) = live.get(&e[1..]) {
                            has_pred.insert(t);
                        }
                    }
                }
            }
            let keep: Vec<Vec<Symbol>> = states
                .iter()
                .filter(|s| succ(s) > 0 && has_pred.contains(s.as_slice()))
                .cloned()
                .collect();
            if keep.len() == states.len() {
                break;
            }
            states = keep;
        }
        if states.is_empty() {
            return Err(Error::Construction("forbidden: the subshift is empty".into()));
        }
        let essential: HashSet<Vec<Symbol>> = states.into_iter().collect();
        let mut prefixes = HashSet::new();
        for s in &essential {
            for i in 0..=s.len() {
                prefixes.insert(s[..i].to_vec());
            }
        }
        let mut z = Self {
            alphabet,
            forbidden,
            periodic,
            memory,
            essential,
            prefixes,
            a: Word::empty(),
        };
        if !z.strongly_connected() {
            return Err(Error::Construction("forbidden: the subshift is not irreducible".into()));
        }
        let reps = (z.memory + z.periodic.len()).div_ceil(z.periodic.len()) + 1;
        if !z.admissible(&z.periodic.repeat(reps)) {
            return Err(Error::Construction("periodic: p^∞ is not a point of the subshift".into()));
        }
        z.a = z.minimal_forbidden()?;
        Ok(z)
    }

    pub fn from_document(doc: &SftDocument) -> Result<Self> {
        let alphabet = Alphabet::new(doc.alphabet.clone())?;
        let forbidden = doc.forbidden.iter().map(|w| alphabet.parse(w)).collect::<Result<Vec<_>>>()?;
        let periodic = alphabet.parse(&doc.periodic)?;
        Self::new(alphabet, forbidden, periodic)
    }

    /// Golden-mean shift: forbid `11`, periodic word `0`.
    pub fn golden_mean() -> Self {
        let alphabet = Alphabet::from_chars("01").expect("valid alphabet");
        Self::new(alphabet, vec![Word(vec![1, 1])], Word(vec![0])).expect("golden mean is a valid SFT")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Word] {
        &self.forbidden
    }

    pub fn periodic(&self) -> &Word {
        &self.periodic
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Shortest-then-lex word outside the language whose proper factors are all admissible.
    pub fn a(&self) -> &Word {
        &self.a
    }

    pub fn k(&self) -> Symbol {
        self.a.0[0]
    }

    pub fn a_tilde(&self) -> &[Symbol] {
        &self.a.0[1..]
    }

    pub fn document(&self) -> SftDocument {
        SftDocument {
            alphabet: self.alphabet.tokens().to_vec(),
            forbidden: self.forbidden.iter().map(|w| self.alphabet.render(w)).collect(),
            periodic: self.alphabet.render(&self.periodic),
        }
    }

    /// Membership in the language of `Z`.
    pub fn admissible(&self, w: &[Symbol]) -> bool {
        let l = self.memory;
        if w.len() <= l {
            return self.prefixes.contains(w);
        }
        w.windows(l).all(|s| self.essential.contains(s))
            && !self
                .forbidden
                .iter()
                .any(|f| w.windows(f.len()).any(|x| x == f.as_slice()))
    }

    fn successors(&self, s: &[Symbol]) -> impl Iterator<Item = Vec<Symbol>> + '_ {
        let s = s.to_vec();
        (0..self.alphabet.len() as Symbol).filter_map(move |a| {
            let mut e = s.clone();
            e.push(a);
            self.admissible(&e).then(|| e[1..].to_vec())
        })
    }

    fn strongly_connected(&self) -> bool {
        let Some(start) = self.essential.iter().min() else {
            return false;
        };
        let reach = |forward: bool| {
            let mut pred: HashMap<Vec<Symbol>, Vec<Vec<Symbol>>> = HashMap::new();
            if !forward {
                for s in &self.essential {
                    for t in self.successors(s) {
                        pred.entry(t).or_default().push(s.clone());
                    }
                }
            }
            let mut seen: HashSet<Vec<Symbol>> = HashSet::from([start.clone()]);
            let mut queue = VecDeque::from([start.clone()]);
            while let Some(s) = queue.pop_front() {
                let next: Vec<Vec<Symbol>> = if forward {
                    self.successors(&s).collect()
                } else {
                    pred.get(&s).cloned().unwrap_or_default()
                };
                for t in next {
                    if seen.insert(t.clone()) {
                        queue.push_back(t);
                    }
                }
            }
            seen.len()
        };
        reach(true) == self.essential.len() && reach(false) == self.essential.len()
    }

    fn minimal_forbidden(&self) -> Result<Word> {
        for n in 1..=self.memory + 1 {
            for w in self.alphabet.words_of_length(n) {
                if !self.admissible(&w) && self.admissible(&w[1..]) && self.admissible(&w[..n - 1]) {
                    return Ok(w);
                }
            }
        }
        Err(Error::Construction("forbidden: the subshift is a full shift".into()))
    }

    /// Admissible words in length-then-lex order, starting at length 1.
    pub fn language(&self) -> LanguageIter<'_> {
        LanguageIter {
            z: self,
            level: Vec::new(),
            pos: 0,
        }
    }

    /// Shortest-then-lex `v` with `left v right` admissible, containing `k` when `need_k`.
    ///
    /// `left` is the text preceding the bridge; only its last `memory` symbols matter.
    pub fn bridge(&self, left: &[Symbol], right: &[Symbol], need_k: bool) -> Result<Word> {
        self.search(left, right, need_k, false)
    }

    /// As [`SftSpec::bridge`] with `k` required, and the prefix ending at the first `k`
    /// chosen so that appending `ã` creates `a` only as a suffix.
    pub fn marked_bridge(&self, left: &[Symbol], right: &[Symbol]) -> Result<Word> {
        self.search(left, right, true, true)
    }

    fn search(&self, left: &[Symbol], right: &[Symbol], need_k: bool, marked: bool) -> Result<Word> {
        let l = self.memory;
        let k = self.k();
        let start_ctx = left[left.len().saturating_sub(l)..].to_vec();
        type Node = (Vec<Symbol>, bool);
        let mut parent: HashMap<Node, Option<(Node, Symbol)>> = HashMap::new();
        let start: Node = (start_ctx, false);
        parent.insert(start.clone(), None);
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            let (ctx, has_k) = &node;
            if (*has_k || !need_k) && self.admissible(&[ctx.as_slice(), right].concat()) {
                let mut v = Vec::new();
                let mut cur = node.clone();
                while let Some(Some((prev, a))) = parent.get(&cur) {
                    v.push(*a);
                    cur = prev.clone();
                }
                v.reverse();
                return Ok(Word(v));
            }
            for a in 0..self.alphabet.len() as Symbol {
                let mut ext = ctx.clone();
                ext.push(a);
                if !self.admissible(&ext) {
                    continue;
                }
                if marked && !*has_k && a == k && !self.ends_only_marker(&ext) {
                    continue;
                }
                let cut = ext.len().saturating_sub(l);
                let child: Node = (ext[cut..].to_vec(), *has_k || a == k);
                if !parent.contains_key(&child) {
                    parent.insert(child.clone(), Some((node.clone(), a)));
                    queue.push_back(child);
                }
            }
        }
        Err(Error::Construction(format!(
            "no bridge from {} to {}; the subshift is not irreducible",
            self.alphabet.render(left),
            self.alphabet.render(right)
        )))
    }
}

impl SftSpec {
    /// Whether `text ã` contains `a` only as its suffix, given `text` ends with `k`.
    fn ends_only_marker(&self, text: &[Symbol]) -> bool {
        let probe = [text, self.a_tilde()].concat();
        let a = self.a.as_slice();
        probe.windows(a.len()).position(|w| w == a) == Some(probe.len() - a.len())
    }
}

/// See [`SftSpec::language`].
pub struct LanguageIter<'a> {
    z: &'a SftSpec,
    level: Vec<Word>,
    pos: usize,
}

impl Iterator for LanguageIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.pos == self.level.len() {
            let next: Vec<Word> = if self.level.is_empty() {
                self.z.alphabet.words_of_length(1).filter(|w| self.z.admissible(w)).collect()
            } else {
                self.level
                    .iter()
                    .flat_map(|w| (0..self.z.alphabet.len() as Symbol).map(move |a| w.concat(&[a])))
                    .filter(|w| self.z.admissible(w))
                    .collect()
            };
            if next.is_empty() {
                return None;
            }
            self.level = next;
            self.pos = 0;
        }
        self.pos += 1;
        Some(self.level[self.pos - 1].clone())
    }
}
