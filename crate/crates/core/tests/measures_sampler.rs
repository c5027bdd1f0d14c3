use std::collections::HashMap;

use cst_core::families::preset;
use cst_core::sampler::{block_counts, empirical_entropy, sample_window};
use cst_core::{solve_entropy, GBernoulliMeasure, GeneratingSet, SolveStatus, WindowSampler, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn mme(name: &str, params: Value) -> GBernoulliMeasure {
    let g = preset(name, &params).unwrap();
    let sol = solve_entropy(&g, 1e-13).unwrap();
    GBernoulliMeasure::mme(&g, &sol).unwrap()
}

fn dyck_g1() -> GBernoulliMeasure {
    mme("dyck_g1", Value::Null)
}

fn word(g: &GeneratingSet, s: &str) -> Word {
    g.alphabet().parse(s).unwrap()
}

#[test]
fn mme_entropy_equals_topological_entropy() {
    for (name, p) in [
        ("sgap", json!({"S": [0, 1]})),
        ("sgap", json!({"S": [2, 5, 7]})),
        ("multigap", json!({"gaps": [[1, 2], [0, 3]], "r": 1})),
        ("beta", json!({"beta": 2.5})),
        ("dyck_g1", Value::Null),
        ("dyck_g2", Value::Null),
        ("nongibbs", json!({})),
        ("three_mme", Value::Null),
    ] {
        let g = preset(name, &p).unwrap();
        let sol = solve_entropy(&g, 1e-13).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged, "{name}");
        let mu = GBernoulliMeasure::mme(&g, &sol).unwrap();
        let h = mu.measure_entropy().unwrap();
        assert!((h.entropy - sol.h().unwrap()).abs() < 1e-9, "{name} {p}: {} vs {}", h.entropy, sol.h().unwrap());
    }
}

#[test]
fn partition_identity_on_three_mme() {
    let mu = mme("three_mme", Value::Null);
    let g = mu.set();
    let cap = 24;
    let total: f64 = g
        .enumerate(cap)
        .unwrap()
        .iter()
        .map(|w| w.len() as f64 * mu.g_cylinder(std::slice::from_ref(w)).unwrap())
        .sum();
    let tail = mu.length_biased_tail(cap).unwrap() / mu.c().value;
    assert!(total <= 1.0 + 1e-12 && total + tail >= 1.0 - 1e-12, "{total} + {tail}");
}

#[test]
fn product_law_for_g_cylinders() {
    let mu = dyck_g1();
    let g = mu.set();
    let a = [word(g, "("), word(g, "()")];
    let b = [word(g, "[]"), word(g, "(())"), word(g, "[")];
    let c = mu.c().value;
    let joined: Vec<Word> = a.iter().chain(&b).cloned().collect();
    let lhs = mu.g_cylinder(&joined).unwrap() * c;
    let rhs = mu.g_cylinder(&a).unwrap() * c * mu.g_cylinder(&b).unwrap() * c;
    assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs().max(1e-300) * 10.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kolmogorov_consistency(w in prop::collection::vec(0u8..4, 0..=5)) {
        let mu = dyck_g1();
        let cap = 200;
        let parent = if w.is_empty() {
            None
        } else {
            Some(mu.word_cylinder(&w, cap).unwrap())
        };
        let mut sum = 0.0;
        let mut tails = parent.as_ref().map_or(0.0, |p| p.tail_error);
        for s in 0..4u8 {
            let mut child = w.clone();
            child.push(s);
            let e = mu.word_cylinder(&child, cap).unwrap();
            sum += e.value;
            tails += e.tail_error;
        }
        let expected = parent.map_or(1.0, |p| p.value);
        prop_assert!((sum - expected).abs() <= tails + 1e-12, "{w:?}: {sum} vs {expected}");
    }

    #[test]
    fn tails_shrink_with_the_cap(w in prop::collection::vec(0u8..4, 1..=4), cap in 8usize..64) {
        let mu = dyck_g1();
        let a = mu.word_cylinder(&w, cap).unwrap();
        let b = mu.word_cylinder(&w, 2 * cap).unwrap();
        prop_assert!(b.tail_error <= a.tail_error);
        prop_assert!((a.value - b.value).abs() <= a.tail_error + 1e-12);
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>(), len in 1usize..40) {
        let mu = dyck_g1();
        prop_assert_eq!(sample_window(&mu, len, seed, None).unwrap(), sample_window(&mu, len, seed, None).unwrap());
    }
}

/// Two-sample chi-square of equal-size count tables, as a z-score.
fn chi_square_z(a: &HashMap<Word, u64>, b: &HashMap<Word, u64>) -> f64 {
    let keys: std::collections::BTreeSet<&Word> = a.keys().chain(b.keys()).collect();
    let mut stat = 0.0;
    for k in &keys {
        let x = *a.get(k).unwrap_or(&0) as f64;
        let y = *b.get(k).unwrap_or(&0) as f64;
        if x + y > 0.0 {
            stat += (x - y).powi(2) / (x + y);
        }
    }
    let df = (keys.len() - 1) as f64;
    (stat - df) / (2.0 * df).sqrt()
}

#[test]
fn windows_are_shift_stationary() {
    let mu = dyck_g1();
    let sampler = WindowSampler::new(&mu, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (len, m, draws) = (8, 2, 200_000);
    let mut at: Vec<HashMap<Word, u64>> = vec![HashMap::new(); len - m + 1];
    for _ in 0..draws {
        let w = sampler.sample(len, &mut rng).unwrap().word;
        for (k, table) in at.iter_mut().enumerate() {
            *table.entry(Word(w[k..k + m].to_vec())).or_default() += 1;
        }
    }
    for k in 1..at.len() {
        let z = chi_square_z(&at[0], &at[k]);
        assert!(z < 4.0, "offset {k}: z = {z}");
    }
}

#[test]
fn block_frequencies_match_cylinders() {
    let mu = mme("three_mme", Value::Null);
    let samples = 200_000;
    let counts = block_counts(&mu, 2, samples, 5, None).unwrap();
    for (w, &n) in &counts {
        let p = mu.word_cylinder(w, 60).unwrap();
        let sigma = (p.value * (1.0 - p.value) / samples as f64).sqrt();
        let f = n as f64 / samples as f64;
        assert!((f - p.value).abs() <= 4.0 * sigma + p.tail_error, "{w:?}: {f} vs {}", p.value);
    }
}

#[test]
fn plug_in_entropy_is_biased_low_but_close() {
    let mu = mme("three_mme", Value::Null);
    let h = 2f64.ln();
    // block entropy H_n / n decreases to h; the plug-in estimate undershoots H_n / n
    let est = empirical_entropy(&mu, 6, 400_000, 3).unwrap();
    let exact_block: f64 = {
        let mut s = 0.0;
        for w in mu.set().alphabet().words_of_length(6) {
            let p = mu.word_cylinder(&w, 60).unwrap().value;
            if p > 0.0 {
                s -= p * p.ln();
            }
        }
        s / 6.0
    };
    assert!(exact_block >= h - 1e-9);
    assert!(est <= exact_block + 1e-3, "{est} vs H_6/6 = {exact_block}");
    assert!(est >= h - 0.1, "{est}");
}
