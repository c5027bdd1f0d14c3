use std::sync::Mutex;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::words::{Symbol, Word};

/// Automaton recognizing a code: every generator labels exactly one path
/// from the initial state to an accepting state.
///
/// The initial state has no incoming edges. Path lengths beyond `max_len`
/// are ignored by every table built from the automaton.
#[derive(Debug)]
pub struct CodeAutomaton {
    max_len: usize,
    initial: usize,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Symbol, usize)>>,
    // sampling[r][q]: paths of length r from q to acceptance, normalized per r
    sampling: Mutex<Vec<Vec<f64>>>,
}

impl Clone for CodeAutomaton {
    fn clone(&self) -> Self {
        Self::new(
            self.initial,
            self.accepting.clone(),
            self.edges.clone(),
            self.max_len,
        )
    }
}

impl CodeAutomaton {
    pub fn new(
        initial: usize,
        accepting: Vec<bool>,
        mut edges: Vec<Vec<(Symbol, usize)>>,
        max_len: usize,
    ) -> Self {
        assert_eq!(accepting.len(), edges.len());
        for out in &mut edges {
            out.sort_unstable();
            out.dedup();
        }
        debug_assert!(edges.iter().flatten().all(|&(_, t)| t != initial));
        Self {
            max_len,
            initial,
            accepting,
            edges,
            sampling: Mutex::new(Vec::new()),
        }
    }

    /// Trie over an explicit list of distinct words.
    pub fn from_words(_alphabet_len: usize, words: &[Word], max_len: usize) -> Self {
        let mut edges: Vec<Vec<(Symbol, usize)>> = vec![Vec::new()];
        let mut accepting = vec![false];
        for w in words.iter().filter(|w| w.len() <= max_len) {
            let mut q = 0;
            for &a in w.iter() {
                q = match edges[q].iter().find(|&&(b, _)| b == a) {
                    Some(&(_, t)) => t,
                    None => {
                        let t = edges.len();
                        edges.push(Vec::new());
                        accepting.push(false);
                        edges[q].push((a, t));
                        t
                    }
                };
            }
            accepting[q] = true;
        }
        Self::new(0, accepting, edges, max_len)
    }

    /// Automaton for the union of two codes with disjoint languages.
    pub fn union(a: &CodeAutomaton, b: &CodeAutomaton) -> Self {
        let off_a = 1;
        let off_b = 1 + a.num_states();
        let mut edges = vec![Vec::new()];
        let mut accepting = vec![false];
        for (aut, off) in [(a, off_a), (b, off_b)] {
            for q in 0..aut.num_states() {
                edges.push(aut.edges[q].iter().map(|&(s, t)| (s, t + off)).collect());
                accepting.push(aut.accepting[q]);
            }
            let init = aut.edges[aut.initial].iter().map(|&(s, t)| (s, t + off));
            edges[0].extend(init.collect::<Vec<_>>());
        }
        Self::new(0, accepting, edges, a.max_len.max(b.max_len))
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn edges(&self, q: usize) -> &[(Symbol, usize)] {
        &self.edges[q]
    }

    /// Number of accepting paths labeled `w`; 1 exactly for generators.
    pub fn path_count(&self, w: &[Symbol]) -> u64 {
        let mut cur = vec![(self.initial, 1u64)];
        for &a in w {
            let mut next: Vec<(usize, u64)> = Vec::new();
            for &(q, m) in &cur {
                for &(b, t) in &self.edges[q] {
                    if b == a {
                        match next.iter_mut().find(|(s, _)| *s == t) {
                            Some(e) => e.1 += m,
                            None => next.push((t, m)),
                        }
                    }
                }
            }
            cur = next;
        }
        cur.iter().filter(|(q, _)| self.accepting[*q]).map(|&(_, m)| m).sum()
    }

    /// `table[q][t]` = (paths of length `t` from the initial state to `q`) times `x^t`.
    pub fn forward(&self, x: f64) -> Vec<Vec<f64>> {
        let n = self.num_states();
        let mut table = vec![vec![0.0; self.max_len + 1]; n];
        table[self.initial][0] = 1.0;
        for t in 0..self.max_len {
            for q in 0..n {
                let v = table[q][t];
                if v == 0.0 {
                    continue;
                }
                for &(_, r) in &self.edges[q] {
                    table[r][t + 1] += v * x;
                }
            }
        }
        table
    }

    /// `table[q][r]` = (paths of length `r` from `q` to an accepting state) times `x^r`.
    pub fn backward(&self, x: f64) -> Vec<Vec<f64>> {
        let n = self.num_states();
        let mut table = vec![vec![0.0; self.max_len + 1]; n];
        for (row, &acc) in table.iter_mut().zip(&self.accepting) {
            if acc {
                row[0] = 1.0;
            }
        }
        for r in 1..=self.max_len {
            for q in 0..n {
                let s: f64 = self.edges[q].iter().map(|&(_, t)| table[t][r - 1]).sum();
                table[q][r] = s * x;
            }
        }
        table
    }

    fn ensure_sampling(&self, n: usize) -> std::sync::MutexGuard<'_, Vec<Vec<f64>>> {
        let mut tab = self.sampling.lock().unwrap_or_else(|e| e.into_inner());
        if tab.is_empty() {
            tab.push(self.accepting.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect());
        }
        while tab.len() <= n {
            let prev = tab.last().expect("nonempty");
            let mut row: Vec<f64> = (0..self.num_states())
                .map(|q| self.edges[q].iter().map(|&(_, t)| prev[t]).sum())
                .collect();
            let scale = row.iter().cloned().fold(0.0, f64::max);
            if scale > 0.0 {
                row.iter_mut().for_each(|v| *v /= scale);
            }
            tab.push(row);
        }
        tab
    }

    /// Uniformly random accepted word of length `n`.
    pub fn sample_uniform(&self, n: usize, rng: &mut dyn RngCore) -> Result<Word> {
        let tab = self.ensure_sampling(n);
        if tab[n][self.initial] == 0.0 {
            return Err(Error::Enumeration {
                n,
                reason: "no generator of this length".into(),
            });
        }
        let mut q = self.initial;
        let mut out = Vec::with_capacity(n);
        for r in (0..n).rev() {
            let weights: Vec<f64> = self.edges[q].iter().map(|&(_, t)| tab[r][t]).collect();
            let total: f64 = weights.iter().sum();
            let mut u = unit(rng) * total;
            let mut pick = weights.len() - 1;
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 {
                    pick = i;
                    if u < w {
                        break;
                    }
                    u -= w;
                }
            }
            let (a, t) = self.edges[q][pick];
            out.push(a);
            q = t;
        }
        debug_assert!(self.accepting[q]);
        Ok(Word(out))
    }
}

/// Uniform draw from `[0, 1)` with 53 random bits.
pub(crate) fn unit(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word(s.bytes().map(|b| b - b'0').collect())
    }

    #[test]
    fn trie_recognizes_exactly_the_words() {
        let words = vec![w("0"), w("01"), w("011")];
        let a = CodeAutomaton::from_words(2, &words, 8);
        assert_eq!(a.path_count(&[0]), 1);
        assert_eq!(a.path_count(&[0, 1, 1]), 1);
        assert_eq!(a.path_count(&[1]), 0);
        assert_eq!(a.path_count(&[0, 1, 1, 1]), 0);
    }

    #[test]
    fn forward_backward_count_generators() {
        let words = vec![w("0"), w("10"), w("11"), w("101")];
        let a = CodeAutomaton::from_words(2, &words, 3);
        let b = a.backward(1.0);
        assert_eq!(b[a.initial()], vec![0.0, 1.0, 2.0, 1.0]);
        let f = a.forward(0.5);
        let total: f64 = (0..a.num_states())
            .filter(|&q| a.is_accepting(q))
            .map(|q| f[q].iter().sum::<f64>())
            .sum();
        assert!((total - (0.5 + 2.0 * 0.25 + 0.125)).abs() < 1e-15);
    }

    #[test]
    fn union_is_disjoint_sum() {
        let a = CodeAutomaton::from_words(2, &[w("0")], 4);
        let b = CodeAutomaton::from_words(2, &[w("01"), w("11")], 4);
        let u = CodeAutomaton::union(&a, &b);
        for s in ["0", "01", "11"] {
            assert_eq!(u.path_count(&w(s)), 1, "{s}");
        }
        assert_eq!(u.path_count(&w("1")), 0);
    }

    #[test]
    fn uniform_sampling_hits_every_word() {
        let words: Vec<Word> = ["000", "011", "101", "110"].iter().map(|s| w(s)).collect();
        let a = CodeAutomaton::from_words(2, &words, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = std::collections::HashMap::new();
        for _ in 0..4000 {
            *hits.entry(a.sample_uniform(3, &mut rng).unwrap()).or_insert(0) += 1;
        }
        assert_eq!(hits.len(), 4);
        assert!(hits.values().all(|&c| (850..1150).contains(&c)), "{hits:?}");
        assert!(a.sample_uniform(2, &mut rng).is_err());
    }
}
