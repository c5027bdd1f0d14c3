//! G-Bernoulli measures.
//!
//! A measure is held as its generator law `p` and normalizer
//! `c = sum |g| p_g`; the mass of `[[g_0 ... g_k]]` is `(1/c) p_{g_0} ... p_{g_k}`.
//! Ordinary cylinders `[w]` are sums over minimal covers of `w` by shifted
//! G-cylinders: the first block covers coordinate 0, the last covers `|w|-1`.
//! Unique representation makes these covers disjoint.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::entropy::{CharacteristicSolution, SolveStatus, Spectrum, WeightedPotential, MAX_DEPTH};
use crate::error::{param, Error, Result};
use crate::genset::{sardinas_patterson, unique_representation_check, GeneratingSet, PatternSums};
use crate::words::{Symbol, Word};

/// `sum p_g` must be within this of 1, beyond its certified tail.
pub const MASS_TOL: f64 = 1e-8;

/// Target for the certified tails of the normalizer and entropy series.
pub const SERIES_TARGET: f64 = 1e-13;

/// Horizon of the unique-representation check for uncertified infinite sets.
pub const REPRESENTATION_HORIZON: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSource {
    /// `p_g = lambda^{-|g|}`.
    Mme { lambda: f64 },
    /// `p_g = e^{Phi(g)} lambda^{-|g|}` with pressure `ln lambda`.
    Pressure { lambda: f64, pressure: f64 },
    Custom,
}

/// Probabilities `p_g = scale * x^|g|`, except on finitely many overridden generators.
#[derive(Clone, Debug)]
pub struct GeneratorLaw {
    pub scale: f64,
    pub x: f64,
    overrides: HashMap<Vec<Symbol>, f64>,
}

impl GeneratorLaw {
    pub fn geometric(scale: f64, x: f64) -> Self {
        Self {
            scale,
            x,
            overrides: HashMap::new(),
        }
    }

    /// A law supported on the listed generators only.
    pub fn finite(probs: impl IntoIterator<Item = (Word, f64)>) -> Self {
        Self {
            scale: 0.0,
            x: 0.0,
            overrides: probs.into_iter().map(|(w, p)| (w.0, p)).collect(),
        }
    }

    pub fn with_override(mut self, g: Word, p: f64) -> Self {
        self.overrides.insert(g.0, p);
        self
    }

    pub fn base(&self, len: usize) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.x.powi(len as i32)
        }
    }

    pub fn p(&self, g: &[Symbol]) -> f64 {
        self.overrides.get(g).copied().unwrap_or_else(|| self.base(g.len()))
    }

    /// `(g, p_g - base)` for every override.
    fn deltas(&self) -> impl Iterator<Item = (&[Symbol], f64)> + '_ {
        self.overrides.iter().map(|(g, &p)| (g.as_slice(), p - self.base(g.len())))
    }

    pub fn overrides(&self) -> impl Iterator<Item = (&[Symbol], f64)> + '_ {
        self.overrides.iter().map(|(g, &p)| (g.as_slice(), p))
    }
}

/// A series value with a certified bound on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub tail: f64,
}

#[derive(Debug)]
pub struct GBernoulliMeasure {
    set: GeneratingSet,
    law: GeneratorLaw,
    source: MeasureSource,
    mass: Certified,
    c: Certified,
    representation: OnceLock<std::result::Result<(), String>>,
}

/// Serializable description of a measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub source: MeasureSource,
    /// `sum p_g`.
    pub mass: Certified,
    /// `c = sum |g| p_g`.
    pub c: Certified,
    /// `mu(E) = 1/c`.
    pub mu_e: f64,
    pub scale: f64,
    pub x: f64,
    pub overrides: usize,
}

/// `mu([w])` restricted to the sequential part, with generators capped at `cutoff`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderEstimate {
    pub value: f64,
    /// Bound on the mass of covers using a generator longer than `cutoff`.
    pub tail_error: f64,
    pub covers_enumerated: usize,
    pub cutoff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntropy {
    /// `-sum p_g log p_g`: entropy of the induced measure on `E`.
    pub induced: Certified,
    /// `induced / c` by the Abramov identity.
    pub entropy: f64,
    pub mu_e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsEntry {
    pub word: String,
    pub value: f64,
    pub tail_error: f64,
    /// `mu([w]) e^{|w| h}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsReport {
    pub h: f64,
    pub cutoff: usize,
    pub entries: Vec<GibbsEntry>,
    pub inf_ratio: f64,
    pub sup_ratio: f64,
}

/// `sum_g |g|^power p_g` with a certified tail.
fn moment(set: &GeneratingSet, law: &GeneratorLaw, power: u32) -> Result<Option<Certified>> {
    let mut value: f64 = law
        .deltas()
        .map(|(g, d)| (g.len() as f64).powi(power as i32) * d)
        .sum();
    let mut tail = 0.0;
    if law.scale > 0.0 {
        let mut spec = Spectrum::new(set);
        let (depth, t) = spec.depth_for(law.x, power, SERIES_TARGET / law.scale, MAX_DEPTH)?;
        let Some(t) = t else {
            return Ok(None);
        };
        value += law.scale * spec.partial(law.x, depth, power)?;
        tail = law.scale * t;
    }
    Ok(Some(Certified { value, tail }))
}

fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

impl GBernoulliMeasure {
    /// Checks `sum p_g = 1` and finiteness of `c` before accepting the law.
    pub fn new(set: GeneratingSet, law: GeneratorLaw, source: MeasureSource) -> Result<Self> {
        if !(law.scale >= 0.0 && law.scale.is_finite()) || !(law.x >= 0.0 && law.x.is_finite()) {
            return Err(param("p", "base law must be finite and nonnegative"));
        }
        for (g, p) in law.overrides() {
            if !set.contains(g) {
                return Err(Error::UnknownGenerator(set.alphabet().render(g)));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(param("p", "probabilities must be nonnegative"));
            }
        }
        let mass = moment(&set, &law, 0)?
            .ok_or_else(|| param("p", "sum of p_g is not certified finite"))?;
        if (mass.value - 1.0).abs() > mass.tail + MASS_TOL {
            return Err(param("p", format!("sum of p_g is {} (tail {:e}), not 1", mass.value, mass.tail)));
        }
        let c = moment(&set, &law, 1)?.ok_or_else(|| {
            Error::Gurevich(format!("sum |g| p_g diverges for {}", set.name()))
        })?;
        Ok(Self {
            set,
            law,
            source,
            mass,
            c,
            representation: OnceLock::new(),
        })
    }

    /// The measure of maximal entropy, `p_g = lambda_*^{-|g|}`.
    pub fn mme(set: &GeneratingSet, sol: &CharacteristicSolution) -> Result<Self> {
        let lambda = solved_lambda(sol)?;
        Self::new(
            set.clone(),
            GeneratorLaw::geometric(1.0, 1.0 / lambda),
            MeasureSource::Mme { lambda },
        )
    }

    /// `p_g = e^{Phi(g)} lambda^{-|g|}` where `ln lambda` is the pressure of `Phi`.
    pub fn from_pressure(set: &GeneratingSet, phi: &WeightedPotential, sol: &CharacteristicSolution) -> Result<Self> {
        let lambda = solved_lambda(sol)?;
        let ll = lambda.ln();
        let mut law = if phi.offset == f64::NEG_INFINITY {
            GeneratorLaw::finite([])
        } else {
            GeneratorLaw::geometric(phi.offset.exp(), (phi.slope - ll).exp())
        };
        for (g, v) in &phi.overrides {
            law = law.with_override(g.clone(), (v - g.len() as f64 * ll).exp());
        }
        Self::new(
            set.clone(),
            law,
            MeasureSource::Pressure {
                lambda,
                pressure: ll,
            },
        )
    }

    /// Explicit probabilities on finitely many generators.
    pub fn custom(set: &GeneratingSet, probs: Vec<(Word, f64)>) -> Result<Self> {
        Self::new(set.clone(), GeneratorLaw::finite(probs), MeasureSource::Custom)
    }

    pub fn set(&self) -> &GeneratingSet {
        &self.set
    }

    pub fn law(&self) -> &GeneratorLaw {
        &self.law
    }

    pub fn source(&self) -> &MeasureSource {
        &self.source
    }

    pub fn c(&self) -> Certified {
        self.c
    }

    pub fn mass(&self) -> Certified {
        self.mass
    }

    /// `mu(E) = 1/c`.
    pub fn mu_e(&self) -> f64 {
        1.0 / self.c.value
    }

    pub fn p(&self, g: &[Symbol]) -> f64 {
        self.law.p(g)
    }

    pub fn summary(&self) -> MeasureSummary {
        MeasureSummary {
            source: self.source.clone(),
            mass: self.mass,
            c: self.c,
            mu_e: self.mu_e(),
            scale: self.law.scale,
            x: self.law.x,
            overrides: self.law.overrides.len(),
        }
    }

    /// `mu([[g_0 ... g_k]]) = (1/c) prod p_{g_i}`; `mu(E)` for the empty list.
    pub fn g_cylinder(&self, gs: &[Word]) -> Result<f64> {
        let mut v = self.mu_e();
        for g in gs {
            if !self.set.contains(g) {
                return Err(Error::UnknownGenerator(self.set.alphabet().render(g)));
            }
            v *= self.p(g);
        }
        Ok(v)
    }

    /// `sum_{|g| > cap} |g| p_g`, certified.
    pub fn length_biased_tail(&self, cap: usize) -> Result<f64> {
        let mut t: f64 = self
            .law
            .deltas()
            .filter(|(g, _)| g.len() > cap)
            .map(|(g, d)| g.len() as f64 * d.max(0.0))
            .sum();
        if self.law.scale > 0.0 {
            let s = self.set.series_tail(self.law.x, cap, 1)?.ok_or_else(|| {
                Error::Gurevich(format!("length-biased tail beyond {cap} is not certified"))
            })?;
            t += self.law.scale * s;
        }
        Ok(t)
    }

    fn ensure_representation(&self) -> Result<()> {
        let verdict = self.representation.get_or_init(|| {
            if self.set.certificate().is_some() {
                return Ok(());
            }
            let outcome = match self.set.max_len() {
                Some(m) => sardinas_patterson(&self.set, m).map(|v| v.decipherable),
                None => unique_representation_check(&self.set, REPRESENTATION_HORIZON).map(|r| r.pass),
            };
            match outcome {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("{} admits a word with two parses", self.set.name())),
                Err(e) => Err(e.to_string()),
            }
        });
        verdict.clone().map_err(Error::NotUniquelyRepresented)
    }

    /// Sequential-part mass of the cylinder `[w]` at coordinate 0.
    pub fn word_cylinder(&self, w: &[Symbol], cap: usize) -> Result<CylinderEstimate> {
        if w.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if cap == 0 {
            return Err(param("cap", "must be at least 1"));
        }
        self.ensure_representation()?;
        let m = w.len();
        let sums: Option<Box<dyn PatternSums>> = if self.law.scale > 0.0 {
            Some(self.set.pattern_sums(self.law.x, cap)?)
        } else {
            None
        };
        let scale = self.law.scale;
        let deltas: Vec<(&[Symbol], f64)> = self.law.deltas().filter(|(g, _)| g.len() <= cap).collect();
        let base_sum = |f: &dyn Fn(&dyn PatternSums) -> f64| sums.as_deref().map_or(0.0, |s| scale * f(s));

        let mut covers = 0usize;
        let occ_delta: f64 = deltas
            .iter()
            .map(|(g, d)| d * g.windows(m).filter(|u| *u == w).count() as f64)
            .sum();
        let occ = base_sum(&|s| s.occurrences(w)) + occ_delta;
        if occ != 0.0 {
            covers += 1;
        }
        // suf[i]: generators ending with w[..i]; pre[j]: generators starting with w[j..]
        let suf: Vec<f64> = (0..m)
            .map(|i| {
                if i == 0 {
                    return 0.0;
                }
                let s = &w[..i];
                base_sum(&|p| p.ending_with(s)) + deltas.iter().filter(|(g, _)| g.ends_with(s)).map(|(_, d)| d).sum::<f64>()
            })
            .collect();
        let pre: Vec<f64> = (0..m)
            .map(|j| {
                if j == 0 {
                    return 0.0;
                }
                let t = &w[j..];
                base_sum(&|p| p.starting_with(t)) + deltas.iter().filter(|(g, _)| g.starts_with(t)).map(|(_, d)| d).sum::<f64>()
            })
            .collect();
        let mut total = occ;
        for i in 1..m {
            if suf[i] == 0.0 {
                continue;
            }
            // parse[j]: weighted parses of w[i..j] into whole generators
            let mut parse = vec![0.0; m];
            parse[i] = 1.0;
            for j in i..m {
                if parse[j] != 0.0 && pre[j] != 0.0 {
                    total += suf[i] * parse[j] * pre[j];
                    covers += 1;
                }
                if parse[j] == 0.0 {
                    continue;
                }
                for k in j + 1..m {
                    let g = &w[j..k];
                    if k - j <= cap && self.set.contains(g) {
                        parse[k] += parse[j] * self.p(g);
                    }
                }
            }
        }
        let c = self.c.value;
        Ok(CylinderEstimate {
            value: total / c,
            tail_error: m as f64 * self.length_biased_tail(cap)? / c,
            covers_enumerated: covers,
            cutoff: cap,
        })
    }

    /// Entropy via the Abramov identity `h(mu) = mu(E) h(induced)`.
    pub fn measure_entropy(&self) -> Result<MeasureEntropy> {
        let mut value: f64 = self
            .law
            .overrides()
            .map(|(g, p)| -xlogx(p) + xlogx(self.law.base(g.len())))
            .sum();
        let mut tail = 0.0;
        if self.law.scale > 0.0 {
            // -p ln p = -p ln(scale) - |g| p ln(x) on the base law
            let base = GeneratorLaw::geometric(self.law.scale, self.law.x);
            let m0 = moment(&self.set, &base, 0)?.ok_or_else(|| param("p", "entropy series diverges"))?;
            let m1 = moment(&self.set, &base, 1)?.ok_or_else(|| param("p", "entropy series diverges"))?;
            let (a, b) = (-self.law.scale.ln(), -self.law.x.ln());
            value += a * m0.value + b * m1.value;
            tail += a.abs() * m0.tail + b.abs() * m1.tail;
        }
        Ok(MeasureEntropy {
            induced: Certified { value, tail },
            entropy: value / self.c.value,
            mu_e: self.mu_e(),
        })
    }

    /// Ratios `mu([w]) e^{|w| h}` for the constant potential `-h`.
    pub fn gibbs_scan(&self, words: &[Word], h: f64, cap: usize) -> Result<GibbsReport> {
        if words.is_empty() {
            return Err(param("words", "need at least one word"));
        }
        let mut entries = Vec::with_capacity(words.len());
        for w in words {
            let est = self.word_cylinder(w, cap)?;
            entries.push(GibbsEntry {
                word: self.set.alphabet().render(w),
                value: est.value,
                tail_error: est.tail_error,
                ratio: est.value * (w.len() as f64 * h).exp(),
            });
        }
        let inf_ratio = entries.iter().map(|e| e.ratio).fold(f64::INFINITY, f64::min);
        let sup_ratio = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
        Ok(GibbsReport {
            h,
            cutoff: cap,
            entries,
            inf_ratio,
            sup_ratio,
        })
    }
}

fn solved_lambda(sol: &CharacteristicSolution) -> Result<f64> {
    match sol.status {
        SolveStatus::Converged | SolveStatus::Degenerate => sol.lambda(),
        s => Err(Error::NoRoot(format!("characteristic equation status {s:?}"))),
    }
}

pub fn mme(set: &GeneratingSet, sol: &CharacteristicSolution) -> Result<GBernoulliMeasure> {
    GBernoulliMeasure::mme(set, sol)
}

pub fn g_cylinder(mu: &GBernoulliMeasure, gs: &[Word]) -> Result<f64> {
    mu.g_cylinder(gs)
}

pub fn word_cylinder(mu: &GBernoulliMeasure, w: &[Symbol], cap: usize) -> Result<CylinderEstimate> {
    mu.word_cylinder(w, cap)
}

pub fn measure_entropy(mu: &GBernoulliMeasure) -> Result<MeasureEntropy> {
    mu.measure_entropy()
}

pub fn gibbs_scan(mu: &GBernoulliMeasure, words: &[Word], h: f64, cap: usize) -> Result<GibbsReport> {
    mu.gibbs_scan(words, h, cap)
}
