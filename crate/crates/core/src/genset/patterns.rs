use std::sync::Arc;

use super::CodeAutomaton;
use crate::words::{Symbol, Word};

/// Sums over generators `g` with `|g| <= max_len`, each weighted by `x^|g|`.
pub trait PatternSums: Send + Sync {
    fn x(&self) -> f64;

    fn max_len(&self) -> usize;

    /// `sum_g x^|g| * #{positions where w occurs inside g}`.
    fn occurrences(&self, w: &[Symbol]) -> f64;

    /// `sum_g x^|g|` over generators having `s` as a proper or full prefix.
    fn starting_with(&self, s: &[Symbol]) -> f64;

    /// `sum_g x^|g|` over generators having `s` as a proper or full suffix.
    fn ending_with(&self, s: &[Symbol]) -> f64;
}

/// Pattern sums by direct scanning of an explicit generator list.
pub struct ListPatterns {
    words: Vec<Word>,
    x: f64,
    max_len: usize,
}

impl ListPatterns {
    pub fn new(words: Vec<Word>, x: f64, max_len: usize) -> Self {
        let words = words.into_iter().filter(|w| w.len() <= max_len).collect();
        Self { words, x, max_len }
    }

    fn weight(&self, g: &Word) -> f64 {
        self.x.powi(g.len() as i32)
    }
}

impl PatternSums for ListPatterns {
    fn x(&self) -> f64 {
        self.x
    }

    fn max_len(&self) -> usize {
        self.max_len
    }

    fn occurrences(&self, w: &[Symbol]) -> f64 {
        if w.is_empty() {
            return 0.0;
        }
        self.words
            .iter()
            .filter(|g| g.len() >= w.len())
            .map(|g| g.windows(w.len()).filter(|u| *u == w).count() as f64 * self.weight(g))
            .sum()
    }

    fn starting_with(&self, s: &[Symbol]) -> f64 {
        self.words.iter().filter(|g| g.starts_with(s)).map(|g| self.weight(g)).sum()
    }

    fn ending_with(&self, s: &[Symbol]) -> f64 {
        self.words.iter().filter(|g| g.ends_with(s)).map(|g| self.weight(g)).sum()
    }
}

/// Pattern sums read off forward and backward path tables of a code automaton.
pub struct AutomatonPatterns {
    aut: Arc<CodeAutomaton>,
    x: f64,
    max_len: usize,
    fwd_cum: Vec<Vec<f64>>,
    fwd: Vec<Vec<f64>>,
    bwd_cum: Vec<Vec<f64>>,
}

fn cumulative(table: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    table
        .into_iter()
        .map(|row| {
            let mut acc = 0.0;
            row.into_iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect()
        })
        .collect()
}

impl AutomatonPatterns {
    pub fn new(aut: Arc<CodeAutomaton>, x: f64, max_len: usize) -> Self {
        let max_len = max_len.min(aut.max_len());
        let fwd = aut.forward(x);
        let fwd_cum = cumulative(fwd.clone());
        let bwd_cum = cumulative(aut.backward(x));
        Self {
            aut,
            x,
            max_len,
            fwd_cum,
            fwd,
            bwd_cum,
        }
    }

    /// Sparse path multiplicities after reading `w` from the single state `q`.
    fn step_from(&self, q: usize, w: &[Symbol]) -> Vec<(usize, f64)> {
        let mut cur = vec![(q, 1.0)];
        for &a in w {
            let mut next: Vec<(usize, f64)> = Vec::new();
            for &(p, m) in &cur {
                for &(b, t) in self.aut.edges(p) {
                    if b == a {
                        match next.iter_mut().find(|(s, _)| *s == t) {
                            Some(e) => e.1 += m,
                            None => next.push((t, m)),
                        }
                    }
                }
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    /// Path multiplicities after reading `w` from each state in `from`.
    fn step(&self, from: &[f64], w: &[Symbol]) -> Vec<f64> {
        let n = self.aut.num_states();
        let mut cur = from.to_vec();
        for &a in w {
            let mut next = vec![0.0; n];
            for (q, &m) in cur.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                for &(b, t) in self.aut.edges(q) {
                    if b == a {
                        next[t] += m;
                    }
                }
            }
            cur = next;
        }
        cur
    }
}

impl PatternSums for AutomatonPatterns {
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
        let n = self.aut.num_states();
        let xm = self.x.powi(m as i32);
        let budget = self.max_len - m;
        let mut total = 0.0;
        for q in 0..n {
            if self.fwd_cum[q][budget] == 0.0 {
                continue;
            }
            for (q2, mult) in self.step_from(q, w) {
                let conv: f64 = (0..=budget)
                    .map(|t| self.fwd[q][t] * self.bwd_cum[q2][budget - t])
                    .sum();
                total += mult * xm * conv;
            }
        }
        total
    }

    fn starting_with(&self, s: &[Symbol]) -> f64 {
        let m = s.len();
        if m > self.max_len {
            return 0.0;
        }
        let mut start = vec![0.0; self.aut.num_states()];
        start[self.aut.initial()] = 1.0;
        let reach = self.step(&start, s);
        let xm = self.x.powi(m as i32);
        reach
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(q, &v)| v * xm * self.bwd_cum[q][self.max_len - m])
            .sum()
    }

    fn ending_with(&self, s: &[Symbol]) -> f64 {
        let m = s.len();
        if m > self.max_len {
            return 0.0;
        }
        let n = self.aut.num_states();
        // back[q] = number of paths labeled s from q to acceptance
        let mut back: Vec<f64> = (0..n)
            .map(|q| if self.aut.is_accepting(q) { 1.0 } else { 0.0 })
            .collect();
        for &a in s.iter().rev() {
            back = (0..n)
                .map(|q| {
                    self.aut
                        .edges(q)
                        .iter()
                        .filter(|&&(b, _)| b == a)
                        .map(|&(_, t)| back[t])
                        .sum()
                })
                .collect();
        }
        let xm = self.x.powi(m as i32);
        back.iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(q, &v)| v * xm * self.fwd_cum[q][self.max_len - m])
            .sum()
    }
}
