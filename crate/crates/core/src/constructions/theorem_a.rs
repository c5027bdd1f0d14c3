//! Coded shifts with prescribed limit set `Z` and sequential entropy below `ε`.
//!
//! With `w_1, w_2, ...` the language of `Z` in shortlex order and `p` periodic,
//! `s_1 = ã v(ã, w_1) w_1 v(w_1, p) p^{m_1}`,
//! `s_n = s_{n-1} v(p, w_n) w_n v(w_n, p) p^{m_n}` and `g_n = s_n ṽ(p, w_{n+1})`,
//! where `ṽ` cuts a bridge after its first `k`. Every `g_n` starts with `ã` and
//! ends with `k`, so `a = k ã` marks exactly the block boundaries.

use serde::Serialize;
use serde_json::{json, Value};

use super::sft::SftSpec;
use crate::error::{Error, Result};
use crate::genset::{GeneratorFamily, TailBound};
use crate::words::{Alphabet, Symbol, Word};

/// One bridge `v(u, w)` as used in the recursion.
#[derive(Clone, Debug, Serialize)]
pub struct Bridge {
    pub from: String,
    pub to: String,
    pub word: String,
}

#[derive(Clone, Debug)]
pub struct TheoremABuild {
    pub sft: SftSpec,
    pub epsilon: f64,
    pub m: Vec<usize>,
    /// `w_1..w_{N+1}`.
    pub w: Vec<Word>,
    pub s: Vec<Word>,
    pub generators: Vec<Word>,
    pub bridges: Vec<Bridge>,
    /// `sum_{i <= N} e^{-ε |g_i|}`.
    pub partial_sum: f64,
    /// `sum_{i > N} e^{-i}`, bounding the unbuilt generators since `|g_i| > i / ε`.
    pub tail_bound: f64,
}

impl TheoremABuild {
    pub fn certificate(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }

    /// `h_seq < ε` is certified when the sum stays below 1.
    pub fn certified(&self) -> bool {
        self.certificate() < 1.0
    }

    pub fn to_json(&self) -> Value {
        let a = self.sft.alphabet();
        let render = |ws: &[Word]| ws.iter().map(|w| a.render(w)).collect::<Vec<_>>();
        json!({
            "sft": self.sft.document(),
            "a": a.render(self.sft.a()),
            "k": a.token(self.sft.k()),
            "epsilon": self.epsilon,
            "m": self.m,
            "w": render(&self.w),
            "s": render(&self.s),
            "generators": render(&self.generators),
            "lengths": self.generators.iter().map(Word::len).collect::<Vec<_>>(),
            "bridges": self.bridges,
            "certificate": {
                "partial_sum": self.partial_sum,
                "tail_bound": self.tail_bound,
                "total": self.certificate(),
                "certified": self.certified(),
            },
        })
    }

    /// Positions of `a` inside `g_i g_j`; the construction puts exactly one at `|g_i| - 1`.
    pub fn boundary_occurrences(&self, i: usize, j: usize) -> Vec<usize> {
        let w = self.generators[i].concat(&self.generators[j]);
        let a = self.sft.a();
        w.windows(a.len())
            .enumerate()
            .filter(|(_, x)| *x == a.as_slice())
            .map(|(p, _)| p)
            .collect()
    }

    pub fn family(&self) -> TheoremAFamily {
        TheoremAFamily {
            alphabet: self.sft.alphabet().clone(),
            generators: self.generators.clone(),
            params: json!({
                "sft": self.sft.document(),
                "epsilon": self.epsilon,
                "n": self.generators.len(),
            }),
        }
    }
}

/// Smallest `m` with `m ε > x`.
fn exceeding(x: f64, epsilon: f64) -> usize {
    let mut m = (x / epsilon).floor().max(0.0) as usize + 1;
    while (m as f64) * epsilon <= x {
        m += 1;
    }
    m
}

pub fn build_theorem_a(z: &SftSpec, epsilon: f64, n: usize) -> Result<TheoremABuild> {
    let top = (z.alphabet().len() as f64).ln();
    if !(epsilon > 0.0 && epsilon < top) {
        return Err(Error::Construction(format!("epsilon: must lie in (0, log {})", z.alphabet().len())));
    }
    if n == 0 {
        return Err(Error::Construction("n: at least one generator".into()));
    }
    let a = z.alphabet();
    let p = z.periodic();
    let a_tilde = z.a_tilde().to_vec();
    // k may be absent from Z only when a = k; then bridges are plain and the k is appended
    let k_in_z = !a_tilde.is_empty();
    let w: Vec<Word> = z.language().take(n + 1).collect();
    if w.len() < n + 1 {
        return Err(Error::Construction("sft: language is finite".into()));
    }
    // right-hand context long enough to fix the follower state inside p^∞
    let p_block = p.repeat((z.memory() + p.len()).div_ceil(p.len()) + 1);
    let mut bridges = Vec::new();
    // bridges out of p are cut at their first k, which must not start a second copy of a
    let pick = |left: &[Symbol], right: &[Symbol], marked: bool| -> Result<Word> {
        if marked && k_in_z {
            z.marked_bridge(left, right)
        } else {
            z.bridge(left, right, k_in_z)
        }
    };
    let mut bridge = |left: &[Symbol], right: &[Symbol], from: &str, to: &Word, marked: bool| -> Result<Word> {
        let v = pick(left, right, marked)?;
        bridges.push(Bridge {
            from: from.to_string(),
            to: a.render(to),
            word: a.render(&v),
        });
        Ok(v)
    };
    let cut = |v: &Word| -> Word {
        if !k_in_z {
            return Word(vec![z.k()]);
        }
        let at = v.iter().position(|&s| s == z.k()).expect("bridge contains k");
        Word(v[..=at].to_vec())
    };

    let mut m = Vec::with_capacity(n);
    let mut s: Vec<Word> = Vec::with_capacity(n);
    let mut generators: Vec<Word> = Vec::with_capacity(n);
    let mut text: Vec<Symbol> = Vec::new();
    for i in 1..=n {
        let wi = &w[i - 1];
        let mi = if i == 1 {
            exceeding(1.0, epsilon)
        } else {
            exceeding(i as f64, epsilon).max(generators[i - 2].len() + 1)
        };
        if i == 1 {
            if k_in_z {
                text.extend_from_slice(&a_tilde);
                let v = bridge(&text, wi, &a.render(&a_tilde), wi, false)?;
                text.extend_from_slice(&v);
            }
        } else {
            let v = bridge(&text, wi, &a.render(p), wi, true)?;
            text.extend_from_slice(&v);
        }
        text.extend_from_slice(wi);
        let v = bridge(&text, &p_block, &a.render(wi), p, false)?;
        text.extend_from_slice(&v);
        for _ in 0..mi {
            text.extend_from_slice(p);
        }
        m.push(mi);
        s.push(Word(text.clone()));
        let next = &w[i];
        let v_next = pick(&text, next, true)?;
        generators.push(Word(text.clone()).concat(&cut(&v_next)));
    }

    let partial_sum: f64 = generators.iter().map(|g| (-epsilon * g.len() as f64).exp()).sum();
    let e = std::f64::consts::E;
    let tail_bound = (-(n as f64)).exp() / (e - 1.0);
    Ok(TheoremABuild {
        sft: z.clone(),
        epsilon,
        m,
        w,
        s,
        generators,
        bridges,
        partial_sum,
        tail_bound,
    })
}

/// The generators `g_1..g_N` of a build as a finite code.
#[derive(Debug)]
pub struct TheoremAFamily {
    alphabet: Alphabet,
    generators: Vec<Word>,
    params: Value,
}

impl GeneratorFamily for TheoremAFamily {
    fn name(&self) -> &str {
        "theorem_a"
    }

    fn params(&self) -> Value {
        self.params.clone()
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        None
    }

    fn max_len(&self) -> Option<usize> {
        self.generators.iter().map(Word::len).max()
    }

    fn certificate(&self) -> Option<&str> {
        Some("the forbidden word a = k ã occurs in a concatenation exactly at block boundaries")
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        Ok(self.generators.iter().filter(|g| g.len() == n).cloned().collect())
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        self.generators.iter().any(|g| g.as_slice() == w)
    }
}
