use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::{CodeAutomaton, GeneratingSet};
use crate::error::{Error, Result};
use crate::words::{factorize, Factorization, Symbol, Word};

/// Outcome of a unique-decipherability test on a finite code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UdVerdict {
    pub decipherable: bool,
    pub witness: Option<Word>,
}

/// A word together with two of its distinct factorizations.
#[derive(Clone, Debug, Serialize)]
pub struct AmbiguityWitness {
    pub word: Word,
    pub parses: Vec<Factorization>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniqueRepresentationReport {
    pub pass: bool,
    pub horizon: usize,
    pub certificate: Option<String>,
    pub sardinas_patterson: Option<UdVerdict>,
    /// `None` when the search was skipped on the strength of a certificate.
    pub search_witness: Option<Option<AmbiguityWitness>>,
}

/// Sardinas-Patterson test on the generators of length at most `max_gen_len`.
pub fn sardinas_patterson(g: &GeneratingSet, max_gen_len: usize) -> Result<UdVerdict> {
    let code = g.enumerate(max_gen_len)?;
    if code.is_empty() {
        return Err(Error::EmptyCode(max_gen_len));
    }
    let witness = sardinas_patterson_words(&code);
    Ok(UdVerdict {
        decipherable: witness.is_none(),
        witness,
    })
}

/// Dangling-suffix search on an explicit code; returns a word with two parses if one exists.
///
/// Each dangling suffix `d` carries block sequences `(x, y)` with
/// `concat(x) = concat(y) d`, and the two sequences start with distinct blocks.
pub fn sardinas_patterson_words(code: &[Word]) -> Option<Word> {
    let code: Vec<&Word> = {
        let mut c: Vec<&Word> = code.iter().collect();
        c.sort();
        c.dedup();
        c
    };
    let mut seen: HashSet<Vec<Symbol>> = HashSet::new();
    let mut queue: VecDeque<(Vec<Symbol>, Vec<&Word>, Vec<&Word>)> = VecDeque::new();
    for &u in &code {
        for &v in &code {
            if u != v && u.len() > v.len() && u.starts_with(v) {
                let d = u[v.len()..].to_vec();
                if seen.insert(d.clone()) {
                    queue.push_back((d, vec![u], vec![v]));
                }
            }
        }
    }
    while let Some((d, x, y)) = queue.pop_front() {
        for &c in &code {
            // y catches up with c; the lead may switch sides
            let (next, ahead, behind) = if c.len() >= d.len() && c.starts_with(&d) {
                let mut y2 = y.clone();
                y2.push(c);
                (c[d.len()..].to_vec(), y2, x.clone())
            } else if d.len() > c.len() && d.starts_with(c) {
                let mut y2 = y.clone();
                y2.push(c);
                (d[c.len()..].to_vec(), x.clone(), y2)
            } else {
                continue;
            };
            if next.is_empty() {
                let word: Vec<Symbol> = ahead.iter().flat_map(|w| w.iter().copied()).collect();
                return Some(Word(word));
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, ahead, behind));
            }
        }
    }
    None
}

/// Shortest word of length at most `horizon` with two factorizations over the code of `aut`.
///
/// Breadth-first search over pairs of states of the flower automaton, where
/// the initial state doubles as the hub re-entered after each accepted block.
pub fn ambiguity_search(aut: &CodeAutomaton, horizon: usize) -> Option<Word> {
    let hub = aut.initial();
    let options = |p: usize, a: Symbol| -> Vec<usize> {
        let mut out = Vec::new();
        for &(b, r) in aut.edges(p) {
            if b != a {
                continue;
            }
            if !aut.edges(r).is_empty() {
                out.push(r);
            }
            if aut.is_accepting(r) {
                out.push(hub);
            }
        }
        out
    };
    type State = (usize, usize, bool);
    let start: State = (hub, hub, false);
    let mut parent: HashMap<State, (State, Symbol)> = HashMap::new();
    let mut frontier = vec![start];
    let symbols: Vec<Symbol> = {
        let mut s: Vec<Symbol> = (0..aut.num_states())
            .flat_map(|q| aut.edges(q).iter().map(|e| e.0))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    for _ in 0..horizon {
        let mut next = Vec::new();
        for &(p, q, div) in &frontier {
            for &a in &symbols {
                let op = options(p, a);
                if op.is_empty() {
                    continue;
                }
                let oq = options(q, a);
                for &p2 in &op {
                    for &q2 in &oq {
                        let d2 = div || (p == q && p2 != q2);
                        let s2 = (p2, q2, d2);
                        if s2 == start || parent.contains_key(&s2) {
                            continue;
                        }
                        parent.insert(s2, ((p, q, div), a));
                        if s2 == (hub, hub, true) {
                            let mut word = Vec::new();
                            let mut cur = s2;
                            while cur != start {
                                let (prev, sym) = parent[&cur];
                                word.push(sym);
                                cur = prev;
                            }
                            word.reverse();
                            return Some(Word(word));
                        }
                        next.push(s2);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    None
}

/// Exhaustive oracle: shortest-then-lex word of length at most `max_len` with two parses.
pub fn brute_force_ambiguity(code: &[Word], alphabet_len: usize, max_len: usize) -> Option<Word> {
    let set: HashSet<&[Symbol]> = code.iter().map(|w| w.as_slice()).collect();
    let member = |b: &[Symbol]| set.contains(b);
    let longest = code.iter().map(Word::len).max().unwrap_or(0);
    for n in 1..=max_len {
        let total = (alphabet_len as u64).pow(n as u32);
        for k in 0..total {
            let mut rest = k;
            let mut w = vec![0 as Symbol; n];
            for s in w.iter_mut().rev() {
                *s = (rest % alphabet_len as u64) as Symbol;
                rest /= alphabet_len as u64;
            }
            if factorize(&w, &member, longest, 0).count >= 2u8.into() {
                return Some(Word(w));
            }
        }
    }
    None
}

/// Finite necessary check for unique representation, honoring family certificates.
pub fn unique_representation_check(
    g: &GeneratingSet,
    horizon: usize,
) -> Result<UniqueRepresentationReport> {
    let sp = match g.enumerate(horizon) {
        Ok(code) if !code.is_empty() && code.len() <= 1 << 14 => {
            let witness = sardinas_patterson_words(&code);
            Some(UdVerdict {
                decipherable: witness.is_none(),
                witness,
            })
        }
        _ => None,
    };
    let certificate = g.certificate().map(str::to_string);
    let search_witness = if certificate.is_some() {
        None
    } else {
        let aut = g.automaton(horizon)?;
        let found = ambiguity_search(&aut, horizon).map(|word| {
            let parses = factorize(&word, g, word.len(), 2).parses;
            AmbiguityWitness { word, parses }
        });
        Some(found)
    };
    let sp_ok = sp.as_ref().is_none_or(|v| v.decipherable);
    let search_ok = !matches!(search_witness, Some(Some(_)));
    Ok(UniqueRepresentationReport {
        pass: sp_ok && search_ok,
        horizon,
        certificate,
        sardinas_patterson: sp,
        search_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use proptest::prelude::*;

    fn set(words: &[&str]) -> GeneratingSet {
        GeneratingSet::from_strs(Alphabet::from_chars("01").unwrap(), words).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert!(sardinas_patterson(&set(&["01", "10"]), 8).unwrap().decipherable);
        let v = sardinas_patterson(&set(&["0", "00"]), 8).unwrap();
        assert!(!v.decipherable);
        assert_eq!(v.witness, Some(Word(vec![0, 0])));
        assert!(sardinas_patterson(&set(&["0110"]), 8).unwrap().decipherable);
    }

    #[test]
    fn brute_oracle_agrees_on_examples() {
        let code = |s: &[&str]| -> Vec<Word> {
            s.iter().map(|w| Word(w.bytes().map(|b| b - b'0').collect())).collect()
        };
        assert_eq!(brute_force_ambiguity(&code(&["01", "10"]), 2, 8), None);
        assert_eq!(brute_force_ambiguity(&code(&["0", "00"]), 2, 8), Some(Word(vec![0, 0])));
        // 010 = 0.10 = 01.0
        assert_eq!(
            brute_force_ambiguity(&code(&["0", "01", "10"]), 2, 8),
            Some(Word(vec![0, 1, 0]))
        );
    }

    #[test]
    fn report_for_ambiguous_code() {
        let r = unique_representation_check(&set(&["0", "00"]), 4).unwrap();
        assert!(!r.pass);
        let w = r.search_witness.unwrap().unwrap();
        assert_eq!(w.word, Word(vec![0, 0]));
        assert_eq!(w.parses.len(), 2);
        let letters = unique_representation_check(&set(&["0", "1"]), 6).unwrap();
        assert!(letters.pass);
    }

    fn arb_code() -> impl Strategy<Value = Vec<Word>> {
        prop::collection::vec(prop::collection::vec(0u8..2, 1..=4), 1..=5).prop_map(|ws| {
            let mut ws: Vec<Word> = ws.into_iter().map(Word).collect();
            ws.sort();
            ws.dedup();
            ws
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn sardinas_patterson_matches_brute_force(code in arb_code()) {
            let sp = sardinas_patterson_words(&code);
            let brute = brute_force_ambiguity(&code, 2, 12);
            prop_assert_eq!(sp.is_none(), brute.is_none());
            if let Some(w) = &sp {
                let set: HashSet<&[Symbol]> = code.iter().map(|w| w.as_slice()).collect();
                let member = |b: &[Symbol]| set.contains(b);
                prop_assert!(factorize(w, &member, 4, 0).count >= 2u8.into());
            }
        }

        #[test]
        fn product_search_finds_shortest(code in arb_code()) {
            let aut = CodeAutomaton::from_words(2, &code, 4);
            let found = ambiguity_search(&aut, 12);
            let brute = brute_force_ambiguity(&code, 2, 12);
            prop_assert_eq!(found.as_ref().map(Word::len), brute.as_ref().map(Word::len));
        }
    }
}
