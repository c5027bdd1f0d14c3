//! Alphabets, finite words and factorization of words into generator blocks.
//!
//! Symbols are opaque tokens (any nonempty string) stored as indices into an
//! [`Alphabet`]. A [`Word`] is a plain index sequence; rendering and parsing
//! always go through the alphabet it was built against.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Symbol = u8;

/// Ordered set of distinct symbol tokens (1 to 255 of them).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() || tokens.len() > 255 {
            return Err(Error::InvalidAlphabet(format!(
                "size {} outside 1..=255",
                tokens.len()
            )));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::InvalidAlphabet("empty token".into()));
            }
            if index.insert(t.clone(), i as Symbol).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate token {t:?}")));
            }
        }
        Ok(Self { tokens, index })
    }

    /// One token per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    /// Tokens `"0"`, `"1"`, ..., `"{n-1}"`.
    pub fn digits(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.tokens[s as usize]
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.index.get(token).copied()
    }

    /// True when every token is a single character, so words render without separators.
    pub fn is_single_char(&self) -> bool {
        self.tokens.iter().all(|t| t.chars().count() == 1)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        0..self.tokens.len() as Symbol
    }

    /// Parses a word. Single-character alphabets read one token per character;
    /// otherwise tokens are comma-separated.
    pub fn parse(&self, text: &str) -> Result<Word> {
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let lookup = |tok: &str| {
            self.symbol(tok).ok_or_else(|| Error::UnknownSymbol {
                symbol: tok.to_string(),
                word: text.to_string(),
            })
        };
        let symbols = if self.is_single_char() {
            let mut buf = [0u8; 4];
            text.chars()
                .map(|c| lookup(c.encode_utf8(&mut buf)))
                .collect::<Result<Vec<_>>>()?
        } else {
            text.split(',').map(|t| lookup(t.trim())).collect::<Result<Vec<_>>>()?
        };
        Ok(Word(symbols))
    }

    pub fn render(&self, w: &[Symbol]) -> String {
        let sep = if self.is_single_char() { "" } else { "," };
        w.iter()
            .map(|&s| self.token(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// All words of length `n` in lexicographic (alphabet) order.
    pub fn words_of_length(&self, n: usize) -> impl Iterator<Item = Word> + '_ {
        let k = self.len();
        let total = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        (0..total).map(move |mut idx| {
            let mut v = vec![0; n];
            for slot in v.iter_mut().rev() {
                *slot = (idx % k as u128) as Symbol;
                idx /= k as u128;
            }
            Word(v)
        })
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.tokens
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.tokens).finish()
    }
}

/// A finite word over some alphabet, stored as symbol indices.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    pub fn concat(&self, other: &[Symbol]) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Length-then-lexicographic comparison used for all generator enumerations.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// True when the word is not a proper power of a shorter word.
    pub fn is_primitive(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        (1..n)
            .filter(|d| n.is_multiple_of(*d))
            .all(|d| (d..n).any(|i| self.0[i] != self.0[i - d]))
    }

    /// True when `other` is a cyclic rotation of `self`.
    pub fn is_conjugate(&self, other: &Word) -> bool {
        self.len() == other.len()
            && (0..self.len().max(1)).any(|r| {
                self.0[r..]
                    .iter()
                    .chain(&self.0[..r])
                    .eq(other.0.iter())
            })
    }
}

impl std::ops::Deref for Word {
    type Target = [Symbol];
    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

/// Anything that can answer "is this block a generator".
pub trait Membership {
    fn is_generator(&self, block: &[Symbol]) -> bool;
}

impl<F: Fn(&[Symbol]) -> bool> Membership for F {
    fn is_generator(&self, block: &[Symbol]) -> bool {
        self(block)
    }
}

/// Start indices of every (possibly overlapping) occurrence of `u` in `w`.
pub fn occurrences(w: &[Symbol], u: &[Symbol]) -> Result<Vec<usize>> {
    if u.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if u.len() > w.len() {
        return Ok(Vec::new());
    }
    Ok((0..=w.len() - u.len())
        .filter(|&i| &w[i..i + u.len()] == u)
        .collect())
}

/// One complete parse of a word into generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    /// Block boundaries, starting at 0 and ending at the word length.
    pub cut_points: Vec<usize>,
    pub blocks: Vec<Word>,
}

/// Result of [`factorize`]: exact parse count plus a capped listing.
#[derive(Clone, Debug)]
pub struct Factorizations {
    pub count: BigUint,
    pub parses: Vec<Factorization>,
    pub truncated: bool,
}

/// All parses of `w` into generators of length at most `max_gen_len`.
///
/// Counts are computed by a suffix DP and never truncated; at most `limit`
/// parses are listed, in lexicographic order of their cut-point sequences.
pub fn factorize<M: Membership + ?Sized>(
    w: &[Symbol],
    code: &M,
    max_gen_len: usize,
    limit: usize,
) -> Factorizations {
    let n = w.len();
    // next[i] = block ends j reachable from i with w[i..j] a generator, ascending.
    let next: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (i + 1..=n.min(i + max_gen_len))
                .filter(|&j| code.is_generator(&w[i..j]))
                .collect()
        })
        .collect();
    let mut count = vec![BigUint::zero(); n + 1];
    count[n] = BigUint::one();
    for i in (0..n).rev() {
        let mut c = BigUint::zero();
        for &j in &next[i] {
            c += &count[j];
        }
        count[i] = c;
    }

    let mut parses = Vec::new();
    let mut truncated = false;
    if !count[0].is_zero() {
        let mut stack = vec![0usize];
        list_parses(w, &next, &count, &mut stack, limit, &mut parses, &mut truncated);
    }
    Factorizations {
        count: count[0].clone(),
        parses,
        truncated,
    }
}

fn list_parses(
    w: &[Symbol],
    next: &[Vec<usize>],
    count: &[BigUint],
    cuts: &mut Vec<usize>,
    limit: usize,
    out: &mut Vec<Factorization>,
    truncated: &mut bool,
) {
    let at = *cuts.last().expect("nonempty cut list");
    if at == w.len() {
        if out.len() >= limit {
            *truncated = true;
            return;
        }
        let blocks = cuts.windows(2).map(|c| Word::from(&w[c[0]..c[1]])).collect();
        out.push(Factorization {
            cut_points: cuts.clone(),
            blocks,
        });
        return;
    }
    for &j in &next[at] {
        if count[j].is_zero() {
            continue;
        }
        if *truncated {
            return;
        }
        cuts.push(j);
        list_parses(w, next, count, cuts, limit, out, truncated);
        cuts.pop();
    }
}
