//! Generators `g_i = 0^{n_i} 1^{n_i}` for a strictly increasing schedule `n_i`.

use num_bigint::BigUint;
use serde_json::Value;

use crate::error::{param, Result};
use crate::genset::{GeneratorFamily, TailBound};
use crate::words::{Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// `n_i = i^k` for `i >= 1`.
    Power(u32),
    /// A finite strictly increasing list.
    List(Vec<u64>),
}

impl Schedule {
    /// `n_i` for `i >= 1`; `None` past the end of a finite list.
    pub fn get(&self, i: usize) -> Option<u64> {
        match self {
            Schedule::Power(k) => (i as u64).checked_pow(*k),
            Schedule::List(v) => v.get(i.checked_sub(1)?).copied(),
        }
    }

    /// Index `i` with `n_i = m`.
    pub fn index_of(&self, m: u64) -> Option<usize> {
        match self {
            Schedule::Power(k) => {
                let guess = (m as f64).powf(1.0 / *k as f64).round() as u64;
                (guess.saturating_sub(1)..=guess + 1)
                    .find(|&i| i >= 1 && i.checked_pow(*k) == Some(m))
                    .map(|i| i as usize)
            }
            Schedule::List(v) => v.binary_search(&m).ok().map(|p| p + 1),
        }
    }
}

#[derive(Debug)]
pub struct NonGibbs {
    schedule: Schedule,
    alphabet: Alphabet,
}

impl NonGibbs {
    pub fn new(schedule: Schedule) -> Result<Self> {
        match &schedule {
            Schedule::Power(0) => return Err(param("exponent", "must be at least 1")),
            Schedule::List(v) => {
                if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(param("n", "must be strictly increasing positive integers"));
                }
            }
            Schedule::Power(_) => {}
        }
        Ok(Self {
            schedule,
            alphabet: Alphabet::from_chars("01")?,
        })
    }

    /// `{"n": [...]}` or `{"exponent": k}`; the default is `n_i = i^2`.
    pub fn from_params(params: &Value) -> Result<Self> {
        if let Some(list) = params.get("n") {
            let v = list
                .as_array()
                .ok_or_else(|| param("n", "expected a list"))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| param("n", "expected positive integers")))
                .collect::<Result<Vec<_>>>()?;
            return Self::new(Schedule::List(v));
        }
        let k = match params.get("exponent") {
            None => 2,
            Some(v) => v
                .as_u64()
                .and_then(|k| u32::try_from(k).ok())
                .ok_or_else(|| param("exponent", "expected a positive integer"))?,
        };
        Self::new(Schedule::Power(k))
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// `g_i`.
    pub fn generator(&self, i: usize) -> Option<Word> {
        let m = self.schedule.get(i)? as usize;
        let mut w = vec![0 as Symbol; m];
        w.resize(2 * m, 1);
        Some(Word(w))
    }
}

impl GeneratorFamily for NonGibbs {
    fn name(&self) -> &str {
        "nongibbs"
    }

    fn params(&self) -> Value {
        match &self.schedule {
            Schedule::Power(k) => serde_json::json!({ "exponent": k }),
            Schedule::List(v) => serde_json::json!({ "n": v }),
        }
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        match self.schedule {
            Schedule::Power(_) => Some(TailBound {
                c: 1.0,
                rho: 1.0,
                n0: 1,
            }),
            Schedule::List(_) => None,
        }
    }

    fn max_len(&self) -> Option<usize> {
        match &self.schedule {
            Schedule::Power(_) => None,
            Schedule::List(v) => v.last().map(|&m| 2 * m as usize),
        }
    }

    fn certificate(&self) -> Option<&str> {
        Some("each block 0^m 1^m is delimited by the 1-to-0 transitions")
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        if n % 2 == 1 {
            return Ok(Vec::new());
        }
        Ok(self
            .schedule
            .index_of(n as u64 / 2)
            .and_then(|i| self.generator(i))
            .into_iter()
            .collect())
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        let hit = n.is_multiple_of(2) && n > 0 && self.schedule.index_of(n as u64 / 2).is_some();
        Some(BigUint::from(u8::from(hit)))
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let m = w.len() / 2;
        w.len().is_multiple_of(2)
            && m > 0
            && w[..m].iter().all(|&a| a == 0)
            && w[m..].iter().all(|&a| a == 1)
            && self.schedule.index_of(m as u64).is_some()
    }

    fn generator_entropy(&self) -> Option<f64> {
        Some(0.0)
    }
}
