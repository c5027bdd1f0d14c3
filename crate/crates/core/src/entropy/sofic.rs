use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::SolveStatus;
use crate::error::{param, Result};
use crate::genset::GeneratingSet;

/// Entropy of the coded shift generated by the first `m` generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoficApprox {
    pub m: u128,
    pub status: SolveStatus,
    pub lambda: Option<f64>,
    /// Longest generator length in the prefix.
    pub longest: usize,
}

/// Solves `sum_{i <= m} lambda^{-|g_i|} = 1` from the length spectrum alone.
///
/// The first `m` generators in shortlex order are all generators up to some
/// length plus the first few of the next length, so counts determine the sum.
pub fn sofic_lambda(g: &GeneratingSet, m: u128, tol: f64) -> Result<SoficApprox> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(param("tol", "must lie in (0, 1)"));
    }
    if m == 0 {
        return Ok(SoficApprox {
            m,
            status: SolveStatus::NoRoot,
            lambda: None,
            longest: 0,
        });
    }
    // (length, count taken at that length)
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut taken = BigUint::from(0u8);
    let want = BigUint::from(m);
    let mut n = 0;
    while taken < want {
        n += 1;
        if g.max_len().is_some_and(|top| n > top) {
            return Err(param("m", format!("set has only {taken} generators")));
        }
        let c = g.count(n)?;
        let room = &want - &taken;
        let use_here = if c < room { c } else { room };
        if use_here > BigUint::from(0u8) {
            terms.push((n, use_here.to_f64().unwrap_or(f64::INFINITY)));
            taken += use_here;
        }
    }
    let f = |lambda: f64| -> f64 {
        let ll = lambda.ln();
        terms.iter().map(|&(k, c)| c * (-(k as f64) * ll).exp()).sum()
    };
    if m == 1 {
        return Ok(SoficApprox {
            m,
            status: SolveStatus::Degenerate,
            lambda: Some(1.0),
            longest: n,
        });
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while f(hi) >= 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= tol * lo {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SoficApprox {
        m,
        status: SolveStatus::Converged,
        lambda: Some(0.5 * (lo + hi)),
        longest: n,
    })
}

/// `lambda_1, ..., lambda_{m_max}`.
pub fn sofic_approx_entropies(g: &GeneratingSet, m_max: usize, tol: f64) -> Result<Vec<SoficApprox>> {
    (1..=m_max as u128).map(|m| sofic_lambda(g, m, tol)).collect()
}

/// `lambda_m` at each `m` equal to the number of generators of length at most `L`, for `L = 1..=max_len`.
pub fn sofic_chain_by_length(g: &GeneratingSet, max_len: usize, tol: f64) -> Result<Vec<SoficApprox>> {
    let mut out = Vec::new();
    let mut total = BigUint::from(0u8);
    for n in 1..=max_len {
        total += g.count(n)?;
        if total == BigUint::from(0u8) {
            continue;
        }
        let m = total
            .to_u128()
            .ok_or_else(|| param("max_len", "generator count exceeds 128 bits"))?;
        let mut approx = sofic_lambda(g, m, tol)?;
        approx.longest = n.max(approx.longest);
        out.push(approx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn prefixes_of_explicit_code() {
        let a = Alphabet::from_chars("01").unwrap();
        let g = GeneratingSet::from_strs(a, &["0", "01", "10", "110"]).unwrap();
        let chain = sofic_approx_entropies(&g, 4, 1e-14).unwrap();
        assert_eq!(chain[0].lambda, Some(1.0));
        // {0, 01}: golden ratio
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((chain[1].lambda.unwrap() - phi).abs() < 1e-12);
        // {0, 01, 10}: 1/l + 2/l^2 = 1 -> l = 2
        assert!((chain[2].lambda.unwrap() - 2.0).abs() < 1e-12);
        for w in chain.windows(2) {
            assert!(w[0].lambda <= w[1].lambda);
        }
        assert!(sofic_lambda(&g, 5, 1e-12).is_err());
    }

    #[test]
    fn single_generator_is_degenerate() {
        let a = Alphabet::from_chars("01").unwrap();
        let g = GeneratingSet::from_strs(a, &["01"]).unwrap();
        let s = sofic_lambda(&g, 1, 1e-12).unwrap();
        assert_eq!(s.lambda, Some(1.0));
    }
}
