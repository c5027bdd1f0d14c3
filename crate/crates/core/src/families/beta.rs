//! Greedy beta expansion of 1 and the associated generating set.
//!
//! Arithmetic is exact: `beta = M/D` and the remainder after `n` digits is
//! `r_n = N_n / D^n` with integer `N_n`, so digits never suffer rounding.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{param, Result};
use crate::genset::{CodeAutomaton, GeneratorFamily, TailBound};
use crate::words::{Alphabet, Symbol, Word};

/// Exact rational `numer / denom` with `denom > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    pub numer: BigInt,
    pub denom: BigInt,
}

impl Rational {
    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(param("beta", "must be finite"));
        }
        let bits = x.to_bits();
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if exponent == 0 {
            (bits & ((1 << 52) - 1)) << 1
        } else {
            (bits & ((1 << 52) - 1)) | (1 << 52)
        };
        let e = exponent - 1075;
        let sign = if x < 0.0 { -1 } else { 1 };
        let m = BigInt::from(mantissa) * sign;
        let (numer, denom) = if e >= 0 {
            (m << e as usize, BigInt::one())
        } else {
            (m, BigInt::one() << (-e) as usize)
        };
        Ok(Self::new(numer, denom))
    }

    /// Parses `"p/q"`, an integer, or a decimal such as `"2.5"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || param("beta", format!("cannot parse {text:?}"));
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Self::new(p, q));
        }
        if let Some((int, frac)) = text.split_once('.') {
            let digits = format!("{int}{frac}");
            let p: BigInt = digits.parse().map_err(|_| bad())?;
            let q = num_traits::pow(BigInt::from(10), frac.len());
            return Ok(Self::new(p, q));
        }
        let p: BigInt = text.parse().map_err(|_| bad())?;
        Ok(Self::new(p, BigInt::one()))
    }

    pub fn new(numer: BigInt, denom: BigInt) -> Self {
        let (mut numer, mut denom) = (numer, denom);
        if denom.is_negative() {
            numer = -numer;
            denom = -denom;
        }
        let g = numer.gcd(&denom);
        if !g.is_zero() && !g.is_one() {
            numer /= &g;
            denom /= &g;
        }
        Self { numer, denom }
    }

    pub fn to_f64(&self) -> f64 {
        let (n, d) = (&self.numer, &self.denom);
        let shift = (n.bits().max(d.bits()) as i64 - 900).max(0) as usize;
        (n >> shift).to_f64().unwrap_or(f64::NAN) / (d >> shift).to_f64().unwrap_or(f64::NAN)
    }

    pub fn floor(&self) -> BigInt {
        self.numer.div_floor(&self.denom)
    }

    pub fn is_integer(&self) -> bool {
        self.denom.is_one()
    }
}

/// Digits `b_1..b_N` of the greedy expansion `1 = sum b_n beta^-n`.
#[derive(Clone, Debug, Serialize)]
pub struct BetaExpansion {
    pub beta: f64,
    pub digits: Vec<u32>,
    /// `r_n` for `n = 1..=N`, the remainder after `n` digits.
    pub remainders: Vec<f64>,
    /// The expansion terminated or became periodic within the computed depth.
    pub eventually_periodic: bool,
}

#[derive(Debug)]
struct DigitState {
    m: BigInt,
    d: BigInt,
    d_pow: BigInt,
    numer: BigInt,
    digits: Vec<u32>,
    remainders: Vec<f64>,
}

impl DigitState {
    fn extend_to(&mut self, n: usize) {
        while self.digits.len() < n {
            if self.numer.is_zero() {
                self.digits.push(0);
                self.remainders.push(0.0);
                continue;
            }
            // b = floor(beta * r) with r = numer / d_pow
            let next_pow = &self.d_pow * &self.d;
            let scaled = &self.m * &self.numer;
            let b = scaled.div_floor(&next_pow);
            self.numer = scaled - &b * &next_pow;
            self.d_pow = next_pow;
            self.digits.push(b.to_u32().expect("digit fits"));
            self.remainders.push(Rational::new(self.numer.clone(), self.d_pow.clone()).to_f64());
        }
    }
}

/// Remainders closer than this count as a recurrence.
pub const PERIODICITY_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct Beta {
    beta: Rational,
    beta_f: f64,
    alphabet: Alphabet,
    state: Mutex<DigitState>,
    eventually_periodic: bool,
    check_depth: usize,
}

impl Beta {
    /// Expansion of `beta`; periodicity is checked over the first `check_depth` digits.
    pub fn new(beta: Rational, check_depth: usize) -> Result<Self> {
        let one = BigInt::one();
        if beta.numer <= beta.denom {
            return Err(param("beta", "must exceed 1"));
        }
        if beta.is_integer() {
            return Err(param("beta", "must not be an integer"));
        }
        let top = beta.floor().to_usize().filter(|&t| t < 255).ok_or_else(|| param("beta", "too large"))?;
        let alphabet = Alphabet::digits(top + 1)?;
        let state = DigitState {
            m: beta.numer.clone(),
            d: beta.denom.clone(),
            d_pow: one.clone(),
            numer: one,
            digits: Vec::new(),
            remainders: Vec::new(),
        };
        let mut fam = Self {
            beta_f: beta.to_f64(),
            beta,
            alphabet,
            state: Mutex::new(state),
            eventually_periodic: false,
            check_depth,
        };
        fam.eventually_periodic = fam.detect_periodicity();
        Ok(fam)
    }

    pub fn from_f64(beta: f64, check_depth: usize) -> Result<Self> {
        Self::new(Rational::from_f64(beta)?, check_depth)
    }

    pub fn beta(&self) -> f64 {
        self.beta_f
    }

    pub fn eventually_periodic(&self) -> bool {
        self.eventually_periodic
    }

    // A non-integer rational never has a terminating or periodic expansion
    // (each remainder has denominator exactly D^n), so exact recurrence cannot
    // occur. A float input stands for a nearby real, and a near-zero or
    // near-repeating remainder is how a periodic expansion of that real shows up.
    fn detect_periodicity(&self) -> bool {
        let r = self.expansion(self.check_depth).remainders;
        for (n, &x) in r.iter().enumerate() {
            if x < PERIODICITY_TOL || r[..n].iter().any(|&y| (x - y).abs() < PERIODICITY_TOL) {
                return true;
            }
        }
        false
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, DigitState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// `b_1..b_n`.
    pub fn digits(&self, n: usize) -> Vec<u32> {
        let mut st = self.lock();
        st.extend_to(n);
        st.digits[..n].to_vec()
    }

    pub fn expansion(&self, depth: usize) -> BetaExpansion {
        let mut st = self.lock();
        st.extend_to(depth);
        BetaExpansion {
            beta: self.beta_f,
            digits: st.digits[..depth].to_vec(),
            remainders: st.remainders[..depth].to_vec(),
            eventually_periodic: self.eventually_periodic,
        }
    }
}

impl GeneratorFamily for Beta {
    fn name(&self) -> &str {
        "beta"
    }

    fn params(&self) -> serde_json::Value {
        serde_json::json!({
            "beta": format!("{}/{}", self.beta.numer, self.beta.denom),
            "depth": self.check_depth,
        })
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn tail(&self) -> Option<TailBound> {
        Some(TailBound {
            c: self.beta_f.ceil(),
            rho: 1.0,
            n0: 1,
        })
    }

    fn certificate(&self) -> Option<&str> {
        Some("beta generators g(j,i) are determined by their length and last digit")
    }

    fn generators(&self, n: usize) -> Result<Vec<Word>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let b = self.digits(n);
        let prefix: Vec<Symbol> = b[..n - 1].iter().map(|&x| x as Symbol).collect();
        Ok((0..b[n - 1])
            .map(|i| {
                let mut w = prefix.clone();
                w.push(i as Symbol);
                Word(w)
            })
            .collect())
    }

    fn closed_count(&self, n: usize) -> Option<BigUint> {
        if n == 0 {
            return Some(BigUint::zero());
        }
        Some(BigUint::from(self.digits(n)[n - 1]))
    }

    fn contains(&self, w: &[Symbol]) -> bool {
        let n = w.len();
        if n == 0 {
            return false;
        }
        let b = self.digits(n);
        w[..n - 1].iter().zip(&b).all(|(&s, &d)| s as u32 == d) && (w[n - 1] as u32) < b[n - 1]
    }

    fn generator_entropy(&self) -> Option<f64> {
        Some(0.0)
    }

    fn automaton(&self, max_len: usize) -> Option<Result<CodeAutomaton>> {
        // chain s_0 -> s_1 -> ... along the digits, with an accepting sink
        let b = self.digits(max_len);
        let sink = max_len + 1;
        let mut edges: Vec<Vec<(Symbol, usize)>> = vec![Vec::new(); max_len + 2];
        let mut accepting = vec![false; max_len + 2];
        accepting[sink] = true;
        for j in 0..max_len {
            for i in 0..b[j] {
                edges[j].push((i as Symbol, sink));
            }
            if j + 1 < max_len {
                edges[j].push((b[j] as Symbol, j + 1));
            }
        }
        Some(Ok(CodeAutomaton::new(0, accepting, edges, max_len)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_and_a_half() {
        let fam = Beta::from_f64(2.5, 64).unwrap();
        assert_eq!(fam.digits(4), [2, 1, 0, 1]);
        let e = fam.expansion(3);
        assert_eq!(e.remainders[0], 0.5);
        assert_eq!(e.remainders[1], 0.25);
        let a = fam.alphabet().clone();
        let r = |n| -> Vec<String> { fam.generators(n).unwrap().iter().map(|w| a.render(w)).collect() };
        assert_eq!(r(1), ["0", "1"]);
        assert_eq!(r(2), ["20"]);
        assert!(r(3).is_empty());
        assert_eq!(r(4), ["2100"]);
    }

    #[test]
    fn rejects_integers_and_small() {
        assert!(Beta::from_f64(2.0, 8).is_err());
        assert!(Beta::from_f64(0.5, 8).is_err());
        assert!(Beta::new(Rational::parse("7/7").unwrap(), 8).is_err());
    }

    #[test]
    fn flags_near_periodic_expansions() {
        assert!(!Beta::from_f64(2.5, 64).unwrap().eventually_periodic());
        assert!(!Beta::from_f64(std::f64::consts::E, 64).unwrap().eventually_periodic());
        // golden ratio: 1 = 1/phi + 1/phi^2, so the remainder after two digits vanishes
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(Beta::from_f64(phi, 64).unwrap().eventually_periodic());
        // beta^2 = 2 beta + 1 gives 1 = 2/beta + 1/beta^2
        assert!(Beta::from_f64(1.0 + 2f64.sqrt(), 64).unwrap().eventually_periodic());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(Rational::parse("2.5").unwrap(), Rational::parse("5/2").unwrap());
        assert_eq!(Rational::from_f64(2.5).unwrap(), Rational::parse("5/2").unwrap());
        assert_eq!(Rational::parse("7/3").unwrap().floor(), BigInt::from(2));
        assert!(Rational::parse("1/0").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn digit_and_remainder_identities(beta in 1.01f64..3.99) {
            prop_assume!(beta.fract() != 0.0);
            let fam = Beta::from_f64(beta, 32).unwrap();
            let e = fam.expansion(40);
            let top = beta.floor() as u32;
            let mut partial = 0.0;
            let mut prev = 0.0;
            for (n, &b) in e.digits.iter().enumerate() {
                prop_assert!(b <= top);
                partial += b as f64 * beta.powi(-(n as i32 + 1));
                prop_assert!(partial >= prev);
                prev = partial;
                prop_assert!((0.0..1.0).contains(&e.remainders[n]));
                // r_n = beta^n (1 - sum_{k<=n} b_k beta^-k)
                let predicted = beta.powi(n as i32 + 1) * (1.0 - partial);
                prop_assert!((predicted - e.remainders[n]).abs() <= 1e-9 * beta.powi(n as i32 + 1));
            }
            let n = e.digits.len() as i32;
            prop_assert!(partial <= 1.0 + 1e-15);
            prop_assert!(partial >= 1.0 - beta.powi(-n) * beta / (beta - 1.0) - 4.0 * f64::EPSILON);
        }
    }
}
