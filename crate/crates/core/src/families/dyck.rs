//! Dyck shift generators: primitive balanced words over two bracket types.
//!
//! Symbols are `( ) [ ]` with indices 0..4; even indices open, `s ^ 1` is
//! the partner of `s`. `W_n` is every `(u)` or `[u]` with `u` balanced of
//! length `2n - 2`, so `|W_n| = 2^n Cat(n-1)`.

use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::genset::{shifted_poly_geometric, GeneratorFamily, PatternSums, TailBound};
use crate::words::{Alphabet, Symbol, Word};

pub const OPEN_ROUND: Symbol = 0;
pub const CLOSE_ROUND: Symbol = 1;
pub const OPEN_SQUARE: Symbol = 2;
pub const CLOSE_SQUARE: Symbol = 3;

fn is_open(s: Symbol) -> bool {
    s.is_multiple_of(2)
}

/// Exact `d_1..d_N` from the convolution recursion.
#[derive(Clone, Debug)]
pub struct DyckCounts {
    d: Vec<BigUint>,
}

impl DyckCounts {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(crate::error::param("N", "must be at least 1"));
        }
        let mut d = vec![BigUint::zero(), BigUint::from(2u8)];
        for k in 1..n {
            let next: BigUint = (1..=k).map(|j| &d[j] * &d[k - j + 1]).sum();
            d.push(next);
        }
        Ok(Self { d })
    }

    pub fn len(&self) -> usize {
        self.d.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `d_n` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> &BigUint {
        assert!(n >= 1 && n < self.d.len(), "index {n} outside 1..={}", self.len());
        &self.d[n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigUint> {
        self.d[1..].iter()
    }

    /// `2^{n-1} (2n)! / ((2n-1) (n!)^2)`.
    pub fn closed_form(n: usize) -> BigUint {
        assert!(n >= 1);
        let mut central = BigUint::one();
        for i in 1..=n {
            central = central * BigUint::from(n + i) / BigUint::from(i);
        }
        (central << (n - 1)) / BigUint::from(2 * n - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyckVariant {
    Canonical,
    /// Adds the opening letters `(` and `[`.
    G1,
    /// Adds the closing letters `)` and `]`.
    G2,
}

#[derive(Debug)]
pub struct Dyck {
    variant: DyckVariant,
    alphabet: Alphabet,
    ln_d: Mutex<Vec<f64>>,
}

impl Dyck {
    pub fn new(variant: DyckVariant) -> Self {
        Self {
            variant,
            alphabet: Alphabet::from_chars("()[]").expect("valid alphabet"),
            ln_d: Mutex::new(vec![f64::NEG_INFINITY, 2f64.ln()]),
        }
    }

    pub fn variant(&self) -> DyckVariant {
        self.variant
    }

    fn letters(&self) -> &'static [Symbol] {
        match self.variant {
            DyckVariant::Canonical => &[],
            DyckVariant::G1 => &[OPEN_ROUND, OPEN_SQUARE],
            DyckVariant::G2 => &[CLOSE_ROUND, CLOSE_SQUARE],
        }
    }

    /// `ln d_k`, from `d_{k+1}/d_k = 4(2k-1)/(k+1)`.
    fn ln_d(&self, k: usize) -> f64 {
        let mut memo = self.ln_d.lock().unwrap_or_else(|e| e.into_inner());
        while memo.len() <= k {
            let j = memo.len() - 1;
            let prev = memo[j];
            memo.push(prev + (4.0 * (2 * j - 1) as f64 / (j + 1) as f64).ln());
        }
        memo[k]
    }
}

/// Primitive balanced words: the first symbol opens and is closed by the last.
pub fn is_primitive_balanced(w: &[Symbol]) -> bool {
    if w.len() < 2 || w.len() % 2 == 1 {
        return false;
    }
    let mut stack = Vec::with_capacity(w.len() / 2);
    for (i, &s) in w.iter().enumerate() {
        if i > 0 && stack.is_empty() {
            return false;
        }
        if is_open(s) {
            stack.push(s);
        } else if stack.pop() != Some(s ^ 1) {
            return false;
        }
    }
    stack.is_empty()
}

/// Balanced words of length `2k` in lexicographic order.
pub fn balanced_words(k: usize) -> Vec<Vec<Symbol>> {
    fn go(len: usize, cur: &mut Vec<Symbol>, stack: &mut Vec<Symbol>, out: &mut Vec<Vec<Symbol>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let remaining = len - cur.len();
        for s in 0..4 as Symbol {
            if is_open(s) {
                if remaining > stack.len() + 1 {
                    stack.push(s);
                    cur.push(s);
                    go(len, cur, stack, out);
                    cur.pop();
                    stack.pop();
                }
            } else if stack.last() == Some(&(s ^ 1)) {
                let top = stack.pop().expect("nonempty");
                cur.push(s);
                go(len, cur, stack, out);
                cur.pop();
                stack.push(top);
            }
        }
    }
    let mut out = Vec::new();
    go(2 * k, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Uniform balanced word of length `2k`: cycle lemma for the shape, fair coins for the types.
pub fn sample_balanced(k: usize, rng: &mut dyn RngCore) -> Vec<Symbol> {
    let mut steps: Vec<i8> = std::iter::repeat_n(1, k).chain(std::iter::repeat_n(-1, k + 1)).collect();
    steps.shuffle(rng);
    // rotate to start just after the first minimum of the prefix sums
    let (mut h, mut best, mut at) = (0i64, 0i64, 0usize);
    for (i, &s) in steps.iter().enumerate() {
        h += s as i64;
        if h < best {
            best = h;
            at = i + 1;
        }
    }
    let len = steps.len();
    steps.rotate_left(at % len);
    steps.pop();
    let mut out = Vec::with_capacity(2 * k);
    let mut stack = Vec::new();
    for s in steps {
        if s > 0 {
            let open = if rng.next_u32() & 1 == 0 { OPEN_ROUND } else { OPEN_SQUARE };
            stack.push(open);
            out.push(open);
        } else {
            out.push(stack.pop().expect("valid path") ^ 1);
        }
    }
    out
}

impl GeneratorFamily for Dyck {
    fn name(&self) -> &str {
        match self.variant {
            DyckVariant::Canonical => "dyck",
            DyckVariant::G1 => "dyck_g1",
            DyckVariant::G2 => "dyck_g2",
        }
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        Some(TailBound {
            c: 1.0,
            rho: 2f64.powf(1.5),
            n0: 1,
        })
    }

    fn certificate(&self) -> Option<&str> {
        Some(match self.variant {
            DyckVariant::Canonical => "canonical Dyck generators do not overlap, so representations are unique",
            _ => "Dyck generators with one family of single brackets added represent sequential points uniquely",
        })
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        if n % 2 == 1 {
            return Ok(if n == 1 {
                self.letters().iter().map(|&s| Word(vec![s])).collect()
            } else {
                Vec::new()
            });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let inner = balanced_words(n / 2 - 1);
        let mut out = Vec::with_capacity(2 * inner.len());
        for open in [OPEN_ROUND, OPEN_SQUARE] {
            for u in &inner {
                let mut w = Vec::with_capacity(n);
                w.push(open);
                w.extend_from_slice(u);
                w.push(open ^ 1);
                out.push(Word(w));
            }
        }
        Ok(out)
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        Some(match n {
            0 => BigUint::zero(),
            1 => BigUint::from(self.letters().len()),
            _ if n % 2 == 1 => BigUint::zero(),
            _ => DyckCounts::closed_form(n / 2),
        })
    }

    fn ln_count(&self, n: usize) -> Option<f64> {
        Some(match n {
            1 if !self.letters().is_empty() => 2f64.ln(),
            _ if n == 0 || n % 2 == 1 => f64::NEG_INFINITY,
            _ => self.ln_d(n / 2),
        })
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        (w.len() == 1 && self.letters().contains(&w[0])) || is_primitive_balanced(w)
    }

    fn generator_entropy(&self) -> Option<f64> {
        Some(1.5 * 2f64.ln())
    }

    fn series_tail(&self, y: f64, from: usize, power: u32) -> Option<Option<f64>> {
        let q = 8.0 * y * y;
        if q >= 1.0 {
            return Some(None);
        }
        // d_{k+1} / d_k < 8, so terms from k1 on are dominated by a geometric series
        let k1 = from / 2 + 1;
        let term = (self.ln_d(k1) + 2.0 * k1 as f64 * y.ln()).exp();
        let mut t = term * 2f64.powi(power as i32) * shifted_poly_geometric(q, k1, power);
        if from == 0 {
            t += self.letters().len() as f64 * y;
        }
        Some(Some(t))
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Option<Result<Word>> {
        if n == 1 && !self.letters().is_empty() {
            let l = self.letters();
            return Some(Ok(Word(vec![l[(rng.next_u32() & 1) as usize]])));
        }
        if n < 2 || n % 2 == 1 {
            return Some(Err(Error::Enumeration {
                n,
                reason: "no generator of this length".into(),
            }));
        }
        let open = if rng.next_u32() & 1 == 0 { OPEN_ROUND } else { OPEN_SQUARE };
        let mut w = Vec::with_capacity(n);
        w.push(open);
        w.extend(sample_balanced(n / 2 - 1, rng));
        w.push(open ^ 1);
        Some(Ok(Word(w)))
    }

    fn pattern_sums(&self, x: f64, max_len: usize) -> Option<Result<Box<dyn PatternSums>>> {
        Some(Ok(Box::new(DyckPatterns::new(x, max_len, self.letters()))))
    }
}

/// Pattern sums over Dyck generators by dynamic programming on the height profile.
///
/// Each free opening bracket carries a factor 2 for its type; a pattern's
/// unmatched closers pin the types of that many openers, costing `2^-a`.
pub struct DyckPatterns {
    x: f64,
    max_len: usize,
    letters: Vec<Symbol>,
    // fwd[t][h]: prefixes of length t ending at height h, heights >= 1 after time 0
    fwd: Vec<Vec<f64>>,
    // bwd_cum[l][h]: completions of length <= l from height h, first reaching 0 at the end
    bwd_cum: Vec<Vec<f64>>,
}

impl DyckPatterns {
    pub fn new(x: f64, max_len: usize, letters: &[Symbol]) -> Self {
        let l = max_len;
        let mut fwd = vec![vec![0.0; l + 2]; l + 1];
        fwd[0][0] = 1.0;
        if l >= 1 {
            fwd[1][1] = 2.0 * x;
        }
        for t in 1..l {
            for h in 1..=t.min(l) {
                let v = fwd[t][h];
                if v == 0.0 {
                    continue;
                }
                fwd[t + 1][h + 1] += 2.0 * x * v;
                if h >= 2 {
                    fwd[t + 1][h - 1] += x * v;
                }
            }
        }
        let mut bwd = vec![vec![0.0; l + 2]; l + 1];
        bwd[0][0] = 1.0;
        for len in 1..=l {
            for h in 1..=l.min(len) {
                let up = if h < l { bwd[len - 1][h + 1] } else { 0.0 };
                bwd[len][h] = 2.0 * x * up + x * bwd[len - 1][h - 1];
            }
        }
        let mut bwd_cum = bwd;
        for len in 1..=l {
            let (done, rest) = bwd_cum.split_at_mut(len);
            for (cur, prev) in rest[0].iter_mut().zip(&done[len - 1]) {
                *cur += prev;
            }
        }
        Self {
            x,
            max_len,
            letters: letters.to_vec(),
            fwd,
            bwd_cum,
        }
    }

    fn letter_term(&self, w: &[Symbol]) -> f64 {
        if self.max_len >= 1 && w.len() == 1 && self.letters.contains(&w[0]) {
            self.x
        } else {
            0.0
        }
    }

    fn canonical_prefix(&self, s: &[Symbol]) -> f64 {
        let l = self.max_len;
        if s.is_empty() {
            return if l >= 1 { 2.0 * self.x * self.bwd_cum[l - 1][1] } else { 0.0 };
        }
        if s.len() > l {
            return 0.0;
        }
        let mut stack = Vec::new();
        for (i, &a) in s.iter().enumerate() {
            if i > 0 && stack.is_empty() {
                return 0.0;
            }
            if is_open(a) {
                stack.push(a);
            } else if stack.pop() != Some(a ^ 1) {
                return 0.0;
            }
        }
        let xm = self.x.powi(s.len() as i32);
        if stack.is_empty() {
            xm
        } else {
            xm * self.bwd_cum[l - s.len()][stack.len()]
        }
    }
}

fn mirror(s: &[Symbol]) -> Vec<Symbol> {
    s.iter().rev().map(|&a| a ^ 1).collect()
}

impl PatternSums for DyckPatterns {
    fn x(&self) -> f64 {
        self.x
    }

    fn max_len(&self) -> usize {
        self.max_len
    }

    fn occurrences(&self, w: &[Symbol]) -> f64 {
        let m = w.len();
        if m == 0 || m > self.max_len {
            return 0.0;
        }
        // reduce w: relative heights, unmatched closers, internal consistency
        let mut stack: Vec<Symbol> = Vec::new();
        let mut unmatched = 0usize;
        let mut rel = Vec::with_capacity(m);
        let mut h = 0i64;
        for &a in w {
            if is_open(a) {
                stack.push(a);
                h += 1;
            } else {
                match stack.pop() {
                    Some(o) if o == a ^ 1 => {}
                    Some(_) => return self.letter_term(w),
                    None => unmatched += 1,
                }
                h -= 1;
            }
            rel.push(h);
        }
        let interior_min = rel[..m - 1].iter().copied().min().unwrap_or(i64::MAX);
        let end = rel[m - 1];
        let budget = self.max_len - m;
        let mut total = 0.0;
        for t in 0..=budget {
            let heights = if t == 0 { 0..=0 } else { 1..=t };
            for start in heights {
                let f = self.fwd[t][start];
                if f == 0.0 {
                    continue;
                }
                let s = start as i64;
                if s.saturating_add(interior_min) < 1 {
                    continue;
                }
                let fin = s + end;
                if fin < 0 {
                    continue;
                }
                // fin == 0 closes the generator: only the empty completion is allowed
                total += f * self.bwd_cum[budget - t][fin as usize];
            }
        }
        total * self.x.powi(m as i32) * 0.5f64.powi(unmatched as i32) + self.letter_term(w)
    }

    fn starting_with(&self, s: &[Symbol]) -> f64 {
        let letters = if s.is_empty() {
            self.letters.len() as f64 * self.x * (self.max_len >= 1) as u8 as f64
        } else {
            self.letter_term(s)
        };
        self.canonical_prefix(s) + letters
    }

    fn ending_with(&self, s: &[Symbol]) -> f64 {
        let letters = if s.is_empty() {
            self.letters.len() as f64 * self.x * (self.max_len >= 1) as u8 as f64
        } else {
            self.letter_term(s)
        };
        self.canonical_prefix(&mirror(s)) + letters
    }
}
