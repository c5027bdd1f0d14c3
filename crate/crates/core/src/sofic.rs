//! Factor languages of coded shifts with finitely many generators.
//!
//! For finite `G` every long window of a point of `X_G` crosses a block
//! boundary, so the limit set is empty and `L_n(X_G)` equals the set of
//! length-`n` factors of `G^*`. The flower automaton of `G`, with every state
//! initial and accepting, recognizes exactly those factors.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::genset::GeneratingSet;
use crate::words::{Alphabet, Symbol, Word};

/// Subset-construction budget.
pub const STATE_BUDGET: usize = 1_000_000;

/// Flower automaton: state 0 is the hub, each generator `g` adds `|g| - 1` interior states.
#[derive(Clone, Debug)]
pub struct FlowerNfa {
    alphabet: Alphabet,
    edges: Vec<Vec<(Symbol, usize)>>,
}

impl FlowerNfa {
    pub fn new(alphabet: Alphabet, generators: &[Word]) -> Self {
        let mut edges: Vec<Vec<(Symbol, usize)>> = vec![Vec::new()];
        for g in generators {
            let mut at = 0;
            for (i, &a) in g.iter().enumerate() {
                let to = if i + 1 == g.len() {
                    0
                } else {
                    edges.push(Vec::new());
                    edges.len() - 1
                };
                edges[at].push((a, to));
                at = to;
            }
        }
        Self { alphabet, edges }
    }

    pub fn states(&self) -> usize {
        self.edges.len()
    }

    pub fn transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Whether `w` labels some path (from any state).
    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut cur: BTreeSet<usize> = (0..self.states()).collect();
        for &a in w {
            cur = self.step(&cur, a);
            if cur.is_empty() {
                return false;
            }
        }
        true
    }

    fn step(&self, from: &BTreeSet<usize>, a: Symbol) -> BTreeSet<usize> {
        from.iter()
            .flat_map(|&s| self.edges[s].iter().filter(|e| e.0 == a).map(|e| e.1))
            .collect()
    }
}

/// Deterministic automaton for the factors of `G^*`; state 0 is the start
/// (all flower states) and the empty subset is dropped.
#[derive(Clone, Debug, Serialize)]
pub struct FactorAutomaton {
    #[serde(skip)]
    alphabet: Alphabet,
    /// `delta[s][a]`, `None` when the word leaves the language.
    delta: Vec<Vec<Option<usize>>>,
    pub nfa_states: usize,
    pub nfa_transitions: usize,
}

impl FactorAutomaton {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn transitions(&self) -> usize {
        self.delta.iter().map(|r| r.iter().flatten().count()).sum()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn is_deterministic(&self) -> bool {
        true
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut s = 0;
        for &a in w {
            match self.delta[s].get(a as usize).copied().flatten() {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// Transfer matrix `M[s][t]` = number of letters leading from `s` to `t`.
    pub fn transfer_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.states();
        let mut m = vec![vec![0u32; n]; n];
        for (s, row) in self.delta.iter().enumerate() {
            for t in row.iter().flatten() {
                m[s][*t] += 1;
            }
        }
        m
    }
}

/// Determinized factor automaton of a finite generating set.
pub fn factor_automaton(set: &GeneratingSet) -> Result<FactorAutomaton> {
    factor_automaton_with_budget(set, STATE_BUDGET)
}

pub fn factor_automaton_with_budget(set: &GeneratingSet, budget: usize) -> Result<FactorAutomaton> {
    let Some(max_len) = set.max_len() else {
        return Err(param("genset", "factor automata need a finite generating set"));
    };
    let nfa = FlowerNfa::new(set.alphabet().clone(), &set.enumerate(max_len)?);
    determinize(&nfa, budget)
}

pub fn determinize(nfa: &FlowerNfa, budget: usize) -> Result<FactorAutomaton> {
    let k = nfa.alphabet.len();
    let start: BTreeSet<usize> = (0..nfa.states()).collect();
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut transitions = 0;
    let mut next = 0;
    while next < subsets.len() {
        let mut row = vec![None; k];
        for (a, slot) in row.iter_mut().enumerate() {
            let to = nfa.step(&subsets[next], a as Symbol);
            if to.is_empty() {
                continue;
            }
            let id = match index.get(&to) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= budget {
                        return Err(Error::StateBudget {
                            budget,
                            explored: subsets.len(),
                            transitions,
                        });
                    }
                    subsets.push(to.clone());
                    index.insert(to, subsets.len() - 1);
                    subsets.len() - 1
                }
            };
            *slot = Some(id);
            transitions += 1;
        }
        delta.push(row);
        next += 1;
    }
    Ok(FactorAutomaton {
        alphabet: nfa.alphabet.clone(),
        delta,
        nfa_states: nfa.states(),
        nfa_transitions: nfa.transitions(),
    })
}

/// `|L_k|` for `k = 0..=n`, exactly.
pub fn language_counts(a: &FactorAutomaton, n: usize) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); a.states()];
    v[0] = BigUint::from(1u8);
    let mut out = vec![BigUint::from(1u8)];
    for _ in 0..n {
        let mut w = vec![BigUint::zero(); a.states()];
        for (s, row) in a.delta.iter().enumerate() {
            if v[s].is_zero() {
                continue;
            }
            for t in row.iter().flatten() {
                w[*t] += &v[s];
            }
        }
        v = w;
        out.push(v.iter().sum());
    }
    out
}

/// `|L_n|`: distinct length-`n` factors.
pub fn count_language(a: &FactorAutomaton, n: usize) -> BigUint {
    language_counts(a, n).pop().expect("nonempty")
}
