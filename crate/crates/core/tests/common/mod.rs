#![allow(dead_code)]

use std::collections::HashSet;

use markov_monoid::{Alphabet, ProbabilisticAutomaton, StochasticMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// A row with entries in {0, 1/4, 1/2, 3/4, 1}: four quarters dropped into random columns.
pub fn quarter_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut row = vec![0.0; n];
    for _ in 0..4 {
        row[rng.gen_range(0..n)] += 0.25;
    }
    row
}

/// Random row with random support and random positive weights.
pub fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut support: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if support.is_empty() {
        support.push(rng.gen_range(0..n));
    }
    let mut row = vec![0.0; n];
    for &j in &support {
        row[j] = rng.gen_range(0.05..1.0);
    }
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x /= s);
    row
}

pub fn random_stochastic<R: Rng>(rng: &mut R, n: usize) -> StochasticMatrix {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_row(rng, n)).collect();
    StochasticMatrix::from_rows(&rows, "random").unwrap()
}

/// Random automaton over `letters` with quarter-valued transitions, a random
/// initial state and a random non-trivial final set.
pub fn random_quarter_automaton<R: Rng>(
    rng: &mut R,
    n: usize,
    letters: &[&str],
) -> ProbabilisticAutomaton {
    let mats = letters
        .iter()
        .map(|a| {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| quarter_row(rng, n)).collect();
            StochasticMatrix::from_rows(&rows, a).unwrap()
        })
        .collect();
    let mut initial = vec![0.0; n];
    initial[rng.gen_range(0..n)] = 1.0;
    let mut finals: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    if n > 1 && finals.iter().all(|f| *f) {
        finals[rng.gen_range(0..n)] = false;
    }
    ProbabilisticAutomaton::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        Alphabet::new(letters.iter().copied()).unwrap(),
        mats,
        initial,
        finals,
    )
    .unwrap()
}

/// Random automaton with arbitrary positive weights.
pub fn random_automaton<R: Rng>(rng: &mut R, n: usize, letters: &[&str]) -> ProbabilisticAutomaton {
    let mats = letters.iter().map(|_| random_stochastic(rng, n)).collect();
    let mut initial = vec![0.0; n];
    initial[rng.gen_range(0..n)] = 1.0;
    let finals: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    ProbabilisticAutomaton::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        Alphabet::new(letters.iter().copied()).unwrap(),
        mats,
        initial,
        finals,
    )
    .unwrap()
}

/// `q0 --a--> acc` with probability `x`, `rej` otherwise; so `Pr(a) = x`.
pub fn bernoulli(x: f64) -> ProbabilisticAutomaton {
    let rows = vec![
        vec![0.0, x, 1.0 - x],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    ProbabilisticAutomaton::new(
        strings(&["q0", "acc", "rej"]),
        Alphabet::new(["a"]).unwrap(),
        vec![StochasticMatrix::from_rows(&rows, "a").unwrap()],
        vec![1.0, 0.0, 0.0],
        vec![false, true, false],
    )
    .unwrap()
}

/// Random automaton whose initial state has no incoming transitions.
pub fn random_reducible<R: Rng>(rng: &mut R, n: usize, letters: &[&str]) -> ProbabilisticAutomaton {
    let mats = letters
        .iter()
        .map(|a| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let mut r = vec![0.0];
                    r.extend(random_row(rng, n - 1));
                    r
                })
                .collect();
            StochasticMatrix::from_rows(&rows, a).unwrap()
        })
        .collect();
    let mut initial = vec![0.0; n];
    initial[0] = 1.0;
    let finals: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    ProbabilisticAutomaton::new(
        (0..n).map(|i| format!("s{i}")).collect(),
        Alphabet::new(letters.iter().copied()).unwrap(),
        mats,
        initial,
        finals,
    )
    .unwrap()
}

pub type Bits = Vec<Vec<bool>>;

/// Boolean matrix of `φ(w)` computed with floats, then thresholded at 0.
pub fn float_support(a: &ProbabilisticAutomaton, w: &[String]) -> Bits {
    let m = a.word_matrix(w).unwrap();
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j) > 0.0).collect())
        .collect()
}

/// All words of length exactly `len`.
pub fn words_of_length(letters: &[String], len: usize) -> Vec<Vec<String>> {
    let mut words = vec![vec![]];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    words
}

/// Transition monoid by enumerating every word by length until a whole length
/// contributes nothing new (then no longer word can either).
pub fn brute_force_transition_monoid(a: &ProbabilisticAutomaton) -> HashSet<Bits> {
    let letters = a.alphabet().tokens().to_vec();
    let mut seen = HashSet::new();
    for len in 1.. {
        let mut grew = false;
        for w in words_of_length(&letters, len) {
            grew |= seen.insert(float_support(a, &w));
        }
        if !grew {
            break;
        }
        assert!(len < 20, "word enumeration did not stabilize");
    }
    seen
}

fn bits_product(m: &Bits, n: &Bits) -> Bits {
    let d = m.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).any(|k| m[i][k] && n[k][j])).collect())
        .collect()
}

fn bits_stabilize(m: &Bits) -> Option<Bits> {
    if bits_product(m, m) != *m {
        return None;
    }
    let d = m.len();
    let recurrent: Vec<bool> = (0..d)
        .map(|t| (0..d).all(|s| !m[t][s] || m[s][t]))
        .collect();
    Some(
        (0..d)
            .map(|s| (0..d).map(|t| m[s][t] && recurrent[t]).collect())
            .collect(),
    )
}

/// Markov Monoid by naive whole-set iteration on `Vec<Vec<bool>>` matrices.
pub fn brute_force_markov_monoid(a: &ProbabilisticAutomaton) -> HashSet<Bits> {
    let mut set: HashSet<Bits> = a
        .alphabet()
        .tokens()
        .iter()
        .map(|l| float_support(a, std::slice::from_ref(l)))
        .collect();
    loop {
        let current: Vec<Bits> = set.iter().cloned().collect();
        let mut next = set.clone();
        for x in &current {
            for y in &current {
                next.insert(bits_product(x, y));
            }
            if let Some(s) = bits_stabilize(x) {
                next.insert(s);
            }
        }
        if next.len() == set.len() {
            return set;
        }
        set = next;
    }
}

pub fn to_bits(m: &markov_monoid::BooleanMatrix) -> Bits {
    m.to_rows()
}

pub fn shuffled<R: Rng>(rng: &mut R, items: &[String]) -> Vec<String> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
