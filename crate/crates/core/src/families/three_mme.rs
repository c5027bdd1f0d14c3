//! Generators `v w 4^k` with `v in {0,1}^k`, `w in {2,3}^k`.

use num_bigint::BigUint;
use rand::RngCore;

use crate::error::Result;
use crate::genset::{CodeAutomaton, GeneratorFamily, TailBound};
use crate::words::{Alphabet, Symbol, Word};

#[derive(Debug)]
pub struct ThreeMme {
    alphabet: Alphabet,
}

impl ThreeMme {
    pub fn new() -> Self {
        Self {
            alphabet: Alphabet::from_chars("01234").expect("valid alphabet"),
        }
    }

    /// `v w 4^k` where bit `j` of `v_bits`/`w_bits` (most significant first) picks the letter.
    pub fn block(k: usize, v_bits: u64, w_bits: u64) -> Word {
        let mut w = Vec::with_capacity(3 * k);
        for j in (0..k).rev() {
            w.push(((v_bits >> j) & 1) as Symbol);
        }
        for j in (0..k).rev() {
            w.push(2 + ((w_bits >> j) & 1) as Symbol);
        }
        w.resize(3 * k, 4);
        Word(w)
    }
}

impl Default for ThreeMme {
    fn default() -> Self {
        Self::new()
    }
}

impl GeneratorFamily for ThreeMme {
    fn name(&self) -> &str {
        "three_mme"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        Some(TailBound {
            c: 1.0,
            rho: 2f64.powf(2.0 / 3.0),
            n0: 1,
        })
    }

    fn certificate(&self) -> Option<&str> {
        Some("a block ends at each 4-to-{0,1} transition and the lengths of its three runs agree")
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        if !n.is_multiple_of(3) || n == 0 {
            return Ok(Vec::new());
        }
        let k = n / 3;
        let side = 1u64 << k;
        let mut out = Vec::with_capacity((side * side) as usize);
        for v in 0..side {
            for w in 0..side {
                out.push(Self::block(k, v, w));
            }
        }
        Ok(out)
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        if !n.is_multiple_of(3) || n == 0 {
            return Some(BigUint::from(0u8));
        }
        Some(BigUint::from(1u8) << (2 * (n / 3)))
    }

    fn ln_count(&self, n: usize) -> Option<f64> {
        if !n.is_multiple_of(3) || n == 0 {
            return Some(f64::NEG_INFINITY);
        }
        Some((2 * (n / 3)) as f64 * std::f64::consts::LN_2)
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let n = w.len();
        if !n.is_multiple_of(3) || n == 0 {
            return false;
        }
        let k = n / 3;
        w[..k].iter().all(|&a| a <= 1)
            && w[k..2 * k].iter().all(|&a| a == 2 || a == 3)
            && w[2 * k..].iter().all(|&a| a == 4)
    }

    fn generator_entropy(&self) -> Option<f64> {
        Some(2.0 / 3.0 * std::f64::consts::LN_2)
    }

    fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Option<Result<Word>> {
        if !n.is_multiple_of(3) || n == 0 {
            return None;
        }
        let k = n / 3;
        let mut w = Vec::with_capacity(n);
        w.extend((0..k).map(|_| (rng.next_u32() & 1) as Symbol));
        w.extend((0..k).map(|_| 2 + (rng.next_u32() & 1) as Symbol));
        w.resize(n, 4);
        Some(Ok(Word(w)))
    }

    fn automaton(&self, max_len: usize) -> Option<Result<CodeAutomaton>> {
        // states: binary(j) = read v of length j; mid(j, t) = read t letters of w;
        // four(j, m) = read m fours
        let kmax = max_len / 3;
        let mut edges: Vec<Vec<(Symbol, usize)>> = Vec::new();
        let mut accepting = Vec::new();
        let mut add = |acc: bool| {
            edges.push(Vec::new());
            accepting.push(acc);
            edges.len() - 1
        };
        let binary: Vec<usize> = (0..=kmax).map(|_| add(false)).collect();
        let mut mid = vec![Vec::new(); kmax + 1];
        let mut four = vec![Vec::new(); kmax + 1];
        for j in 1..=kmax {
            mid[j] = (0..=j).map(|_| add(false)).collect();
            four[j] = (0..=j).map(|m| add(m == j)).collect();
        }
        for j in 0..kmax {
            for a in 0..2 {
                edges[binary[j]].push((a, binary[j + 1]));
            }
        }
        for j in 1..=kmax {
            for a in 2..4 {
                edges[binary[j]].push((a, mid[j][1]));
                for t in 1..j {
                    edges[mid[j][t]].push((a, mid[j][t + 1]));
                }
            }
            edges[mid[j][j]].push((4, four[j][1]));
            for m in 1..j {
                edges[four[j][m]].push((4, four[j][m + 1]));
            }
        }
        Some(Ok(CodeAutomaton::new(binary[0], accepting, edges, max_len)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genset::GeneratingSet;
    use rand::SeedableRng;

    #[test]
    fn first_block() {
        let g = GeneratingSet::from_family(ThreeMme::new()).unwrap();
        let words: Vec<String> = g.generators(3).unwrap().iter().map(|w| g.alphabet().render(w)).collect();
        assert_eq!(words, ["024", "034", "124", "134"]);
        assert!(g.generators(4).unwrap().is_empty());
    }

    #[test]
    fn counts_are_powers_of_four() {
        let g = GeneratingSet::from_family(ThreeMme::new()).unwrap();
        for n in 1..=18 {
            let listed = g.generators(n).unwrap().len();
            let expect = if n % 3 == 0 { 1usize << (2 * (n / 3)) } else { 0 };
            assert_eq!(listed, expect);
            assert_eq!(g.count(n).unwrap(), BigUint::from(expect));
        }
    }

    #[test]
    fn automaton_matches_enumeration() {
        let fam = ThreeMme::new();
        let aut = fam.automaton(12).unwrap().unwrap();
        let back = aut.backward(1.0);
        for n in 1..=12 {
            let expect = fam.closed_count(n).unwrap();
            assert_eq!(BigUint::from(back[aut.initial()][n] as u64), expect, "n = {n}");
        }
        let g = GeneratingSet::from_family(ThreeMme::new()).unwrap();
        for w in g.enumerate(9).unwrap() {
            assert_eq!(aut.path_count(&w), 1);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = aut.sample_uniform(9, &mut rng).unwrap();
            assert!(g.contains(&w));
        }
    }
}
