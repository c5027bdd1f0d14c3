//! Stationary sampling from a G-Bernoulli measure.
//!
//! Coordinate 0 falls in a block `g` with probability `|g| p_g / c` and at a
//! uniform offset inside it; later blocks are i.i.d. with law `p`. The
//! generator law is truncated at a cap, never renormalized, and the truncated
//! mass must stay below [`SHORTFALL_THRESHOLD`].

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::genset::automaton::unit;
use crate::measures::GBernoulliMeasure;
use crate::words::{Symbol, Word};

pub const SHORTFALL_THRESHOLD: f64 = 1e-9;

/// Largest cap tried when choosing one automatically.
pub const MAX_CAP: usize = 1 << 14;

/// Largest `n * samples` accepted by [`empirical_entropy`].
pub const ENTROPY_BUDGET: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleWindow {
    pub word: Word,
    pub origin_block: Word,
    /// Position of coordinate 0 inside `origin_block`.
    pub offset: usize,
}

/// Block law as (length, cumulative mass) pairs, with one uniform draw per length,
/// or as an explicit list when the law has overrides.
#[derive(Debug)]
enum Blocks {
    ByLength { lengths: Vec<usize>, cum: Vec<f64> },
    Listed { words: Vec<Word>, cum: Vec<f64> },
}

#[derive(Debug)]
pub struct WindowSampler<'a> {
    mu: &'a GBernoulliMeasure,
    cap: usize,
    plain: Blocks,
    biased: Blocks,
    /// Untruncated mass lost to the cap, for `p` and for `|g| p / c`.
    pub shortfall: (f64, f64),
}

fn draw(cum: &[f64], rng: &mut dyn RngCore) -> usize {
    let total = *cum.last().expect("nonempty law");
    let u = unit(rng) * total;
    cum.partition_point(|&v| v <= u).min(cum.len() - 1)
}

impl<'a> WindowSampler<'a> {
    /// Sampler with generators capped at `cap`, or at the smallest power of two
    /// meeting the shortfall threshold when `cap` is `None`.
    pub fn new(mu: &'a GBernoulliMeasure, cap: Option<usize>) -> Result<Self> {
        let set = mu.set();
        let cap = match cap {
            Some(c) => c,
            None => {
                let mut c = set.max_len().unwrap_or(16).min(MAX_CAP);
                while set.max_len().is_none_or(|m| c < m)
                    && mu.length_biased_tail(c)? / mu.c().value >= SHORTFALL_THRESHOLD / 10.0
                    && c < MAX_CAP
                {
                    c *= 2;
                }
                c
            }
        };
        let c = mu.c().value;
        let (plain, biased, kept) = if mu.law().overrides().next().is_none() {
            let mut lengths = Vec::new();
            let (mut cp, mut cb) = (Vec::new(), Vec::new());
            let (mut sp, mut sb) = (0.0, 0.0);
            for n in 1..=cap {
                let ln_c = set.ln_count(n)?;
                if ln_c == f64::NEG_INFINITY {
                    continue;
                }
                let mass = (ln_c + mu.law().scale.ln() + n as f64 * mu.law().x.ln()).exp();
                if mass == 0.0 {
                    continue;
                }
                sp += mass;
                sb += n as f64 * mass / c;
                lengths.push(n);
                cp.push(sp);
                cb.push(sb);
            }
            (
                Blocks::ByLength {
                    lengths: lengths.clone(),
                    cum: cp,
                },
                Blocks::ByLength { lengths, cum: cb },
                (sp, sb),
            )
        } else {
            let words: Vec<Word> = set
                .enumerate(cap)?
                .into_iter()
                .filter(|g| mu.p(g) > 0.0)
                .collect();
            let (mut cp, mut cb) = (Vec::new(), Vec::new());
            let (mut sp, mut sb) = (0.0, 0.0);
            for g in &words {
                sp += mu.p(g);
                sb += g.len() as f64 * mu.p(g) / c;
                cp.push(sp);
                cb.push(sb);
            }
            (
                Blocks::Listed {
                    words: words.clone(),
                    cum: cp,
                },
                Blocks::Listed { words, cum: cb },
                (sp, sb),
            )
        };
        // shortfalls come from the certified tails; the kept sums only guard against rounding
        let tail_p = if set.max_len().is_some_and(|m| m <= cap) {
            0.0
        } else {
            mu.law().scale * set.series_tail(mu.law().x, cap, 0)?.unwrap_or(f64::INFINITY)
        };
        let tail_b = mu.length_biased_tail(cap)? / c;
        let shortfall = (tail_p.max(0.0), tail_b.max(0.0));
        debug_assert!(kept.0 <= 1.0 + 1e-9 && kept.1 <= 1.0 + 1e-9);
        let worst = shortfall.0.max(shortfall.1);
        if worst > SHORTFALL_THRESHOLD {
            return Err(Error::Shortfall {
                shortfall: worst,
                threshold: SHORTFALL_THRESHOLD,
            });
        }
        if matches!(&plain, Blocks::ByLength { lengths, .. } if lengths.is_empty())
            || matches!(&plain, Blocks::Listed { words, .. } if words.is_empty())
        {
            return Err(param("cap", "no generator of positive probability below the cap"));
        }
        Ok(Self {
            mu,
            cap,
            plain,
            biased,
            shortfall,
        })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn block(&self, law: &Blocks, rng: &mut dyn RngCore) -> Result<Word> {
        match law {
            Blocks::ByLength { lengths, cum } => {
                let n = lengths[draw(cum, rng)];
                self.mu.set().sample_generator(n, rng)
            }
            Blocks::Listed { words, cum } => Ok(words[draw(cum, rng)].clone()),
        }
    }

    /// Window `x[0..len)` of a `mu`-typical point.
    pub fn sample(&self, len: usize, rng: &mut dyn RngCore) -> Result<SampleWindow> {
        if len == 0 {
            return Err(param("len", "must be at least 1"));
        }
        let origin = self.block(&self.biased, rng)?;
        let offset = (unit(rng) * origin.len() as f64) as usize % origin.len();
        let mut word: Vec<Symbol> = origin[offset..].to_vec();
        while word.len() < len {
            word.extend_from_slice(&self.block(&self.plain, rng)?);
        }
        word.truncate(len);
        Ok(SampleWindow {
            word: Word(word),
            origin_block: origin,
            offset,
        })
    }
}

/// One window from the seed's own stream.
pub fn sample_window(mu: &GBernoulliMeasure, len: usize, seed: u64, cap: Option<usize>) -> Result<SampleWindow> {
    let sampler = WindowSampler::new(mu, cap)?;
    sampler.sample(len, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Counts of each length-`n` window over `samples` independent draws.
pub fn block_counts(
    mu: &GBernoulliMeasure,
    n: usize,
    samples: u64,
    seed: u64,
    cap: Option<usize>,
) -> Result<HashMap<Word, u64>> {
    let sampler = WindowSampler::new(mu, cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<Word, u64> = HashMap::new();
    for _ in 0..samples {
        *counts.entry(sampler.sample(n, &mut rng)?.word).or_default() += 1;
    }
    Ok(counts)
}

/// Plug-in estimate `-(1/n) sum f log f` over sampled `n`-blocks (biased low).
pub fn empirical_entropy(mu: &GBernoulliMeasure, n: usize, samples: u64, seed: u64) -> Result<f64> {
    if n == 0 || samples == 0 {
        return Err(param("n", "block length and sample count must be positive"));
    }
    if (n as u64).saturating_mul(samples) > ENTROPY_BUDGET {
        return Err(param("samples", format!("n * samples exceeds {ENTROPY_BUDGET}")));
    }
    let counts = block_counts(mu, n, samples, seed, None)?;
    let total = samples as f64;
    let h: f64 = counts
        .values()
        .map(|&k| {
            let f = k as f64 / total;
            -f * f.ln()
        })
        .sum();
    Ok(h / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::solve_entropy;
    use crate::families::preset;
    use crate::genset::GeneratingSet;
    use crate::words::Alphabet;

    fn mme(g: &GeneratingSet) -> GBernoulliMeasure {
        GBernoulliMeasure::mme(g, &solve_entropy(g, 1e-13).unwrap()).unwrap()
    }

    #[test]
    fn deterministic_in_seed() {
        let g = preset("dyck_g1", &serde_json::Value::Null).unwrap();
        let mu = mme(&g);
        let a = sample_window(&mu, 40, 7, None).unwrap();
        let b = sample_window(&mu, 40, 7, None).unwrap();
        assert_eq!(a, b);
        assert!(a.offset < a.origin_block.len());
        assert!(g.contains(&a.origin_block));
    }

    #[test]
    fn windows_are_concatenation_windows() {
        let g = GeneratingSet::from_strs(Alphabet::from_chars("01").unwrap(), &["0", "01"]).unwrap();
        let mu = mme(&g);
        let s = WindowSampler::new(&mu, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let w = s.sample(12, &mut rng).unwrap();
            assert!(!w.word.windows(2).any(|p| p == [1, 1]));
        }
    }

    #[test]
    fn full_shift_entropy() {
        let g = GeneratingSet::from_strs(Alphabet::from_chars("01").unwrap(), &["0", "1"]).unwrap();
        let h = empirical_entropy(&mme(&g), 8, 200_000, 3).unwrap();
        assert!((h - 2f64.ln()).abs() < 0.01, "{h}");
    }

    #[test]
    fn cap_too_small_is_reported() {
        let g = preset("three_mme", &serde_json::Value::Null).unwrap();
        let mu = mme(&g);
        assert!(matches!(WindowSampler::new(&mu, Some(6)), Err(Error::Shortfall { .. })));
        assert!(WindowSampler::new(&mu, None).unwrap().cap() >= 64);
    }
}
