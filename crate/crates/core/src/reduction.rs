//! The reduction from emptiness (is there a word accepted with probability
//! above ½?) to acceptance of super-polynomial words, and the two-sided
//! counterexample automaton it generalizes.
//!
//! From `A` with unique initial state `q0`, the automaton `B` has states
//! `Q × {L, R} ⊎ {p0, ⊥, qF}` and alphabet `A ⊎ {check, end}`. Reading `check`
//! from `p0` flips a fair coin between the two copies of `A`; `end` sends the
//! left copy back to `(q0, L)` from final states and the right copy back to
//! `(q0, R)` from non-final states, everything else falls back to `p0`. A
//! second `check` from `(q0, L)` accepts and from `(q0, R)` rejects.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::automaton::{Alphabet, AutomatonFile, ProbabilisticAutomaton};
use crate::error::{Error, Result};
use crate::matrix::StochasticMatrix;
use crate::numerics::convergence::{ConvergenceReport, Quantity, Sample};
use crate::numerics::factorial::{f_p, f_sp};
use crate::numerics::schedule::WordSchedule;

pub const CHECK: &str = "check";
pub const END: &str = "end";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    L,
    R,
}

/// Role of a state of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateTag {
    P0,
    Bot,
    QF,
    /// Copy of the given state of `A`.
    Copy(usize, Side),
}

impl fmt::Display for StateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateTag::P0 => f.write_str("p0"),
            StateTag::Bot => f.write_str("bot"),
            StateTag::QF => f.write_str("qF"),
            StateTag::Copy(q, Side::L) => write!(f, "({q},L)"),
            StateTag::Copy(q, Side::R) => write!(f, "({q},R)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub automaton: ProbabilisticAutomaton,
    /// `state_map[i]` tags the `i`-th state of `automaton`.
    pub state_map: Vec<StateTag>,
}

impl ReductionOutput {
    pub fn index_of(&self, tag: StateTag) -> usize {
        self.state_map
            .iter()
            .position(|t| *t == tag)
            .expect("every tag of the construction is present")
    }

    /// Automaton file with the `state_map` sidecar. Copy tags name the state of `A`.
    pub fn to_file(&self, source: &ProbabilisticAutomaton) -> AutomatonFile {
        let mut file = AutomatonFile::from_automaton(&self.automaton);
        let map = self
            .automaton
            .states()
            .iter()
            .zip(&self.state_map)
            .map(|(name, tag)| {
                let label = match tag {
                    StateTag::Copy(q, side) => {
                        format!(
                            "({},{})",
                            source.states()[*q],
                            if *side == Side::L { "L" } else { "R" }
                        )
                    }
                    other => other.to_string(),
                };
                (name.clone(), label)
            })
            .collect::<BTreeMap<_, _>>();
        file.state_map = Some(map);
        file
    }
}

/// Builds `B` from `A`. `A` needs a unit initial vector on a state without
/// incoming transitions, and must not use the letters `check` or `end`.
pub fn build_reduction(a: &ProbabilisticAutomaton) -> Result<ReductionOutput> {
    let q0 = a.initial_state().ok_or_else(|| {
        Error::Precondition("the automaton must have a unique initial state".into())
    })?;
    for (letter, m) in a.transitions() {
        if let Some(s) = (0..a.num_states()).find(|&s| m.get(s, q0) > 0.0) {
            return Err(Error::Precondition(format!(
                "initial state `{}` has an incoming `{letter}` transition from `{}`",
                a.states()[q0],
                a.states()[s]
            )));
        }
    }
    for reserved in [CHECK, END] {
        if a.alphabet().contains(reserved) {
            return Err(Error::Precondition(format!(
                "letter `{reserved}` is reserved by the construction"
            )));
        }
    }

    let n = a.num_states();
    let mut state_map = vec![StateTag::P0];
    state_map.extend((0..n).map(|q| StateTag::Copy(q, Side::L)));
    state_map.extend((0..n).map(|q| StateTag::Copy(q, Side::R)));
    state_map.push(StateTag::Bot);
    state_map.push(StateTag::QF);
    let size = state_map.len();
    let p0 = 0;
    let copy = |q: usize, side: Side| match side {
        Side::L => 1 + q,
        Side::R => 1 + n + q,
    };
    let bot = 1 + 2 * n;
    let qf = 2 + 2 * n;

    let names: Vec<String> = state_map
        .iter()
        .map(|t| match t {
            StateTag::Copy(q, Side::L) => format!("{}_L", a.states()[*q]),
            StateTag::Copy(q, Side::R) => format!("{}_R", a.states()[*q]),
            other => other.to_string(),
        })
        .collect();

    let empty = || vec![vec![0.0; size]; size];
    let absorb_specials = |rows: &mut Vec<Vec<f64>>| {
        rows[bot][bot] = 1.0;
        rows[qf][qf] = 1.0;
    };

    let mut tokens: Vec<String> = a.alphabet().tokens().to_vec();
    let mut matrices = Vec::new();
    for (letter, m) in a.transitions() {
        let mut rows = empty();
        rows[p0][p0] = 1.0;
        for side in [Side::L, Side::R] {
            for q in 0..n {
                for t in 0..n {
                    rows[copy(q, side)][copy(t, side)] = m.get(q, t);
                }
            }
        }
        absorb_specials(&mut rows);
        matrices.push(StochasticMatrix::from_rows(&rows, letter)?);
    }

    let mut check = empty();
    check[p0][copy(q0, Side::L)] = 0.5;
    check[p0][copy(q0, Side::R)] = 0.5;
    for q in 0..n {
        // `check` only ever meets a copy at q0 in the intended words; elsewhere it rejects
        let (l, r) = if q == q0 { (qf, bot) } else { (bot, bot) };
        check[copy(q, Side::L)][l] = 1.0;
        check[copy(q, Side::R)][r] = 1.0;
    }
    absorb_specials(&mut check);

    let mut end = empty();
    end[p0][p0] = 1.0;
    for q in 0..n {
        let accepting = a.final_states()[q];
        end[copy(q, Side::L)][if accepting { copy(q0, Side::L) } else { p0 }] = 1.0;
        end[copy(q, Side::R)][if accepting { p0 } else { copy(q0, Side::R) }] = 1.0;
    }
    absorb_specials(&mut end);

    tokens.push(CHECK.into());
    matrices.push(StochasticMatrix::from_rows(&check, CHECK)?);
    tokens.push(END.into());
    matrices.push(StochasticMatrix::from_rows(&end, END)?);

    let mut initial = vec![0.0; size];
    initial[p0] = 1.0;
    let mut finals = vec![false; size];
    finals[qf] = true;
    let automaton =
        ProbabilisticAutomaton::new(names, Alphabet::new(tokens)?, matrices, initial, finals)?;
    Ok(ReductionOutput {
        automaton,
        state_map,
    })
}

/// Closed form of `Σ_{i=1}^{N-1} (1 − (p + q))^(i−1) · p`: the probability of
/// winning one of the first `N − 1` rounds when each round is won with
/// probability `p`, lost with probability `q` and otherwise repeated.
pub fn round_formula(p: f64, q: f64, rounds: &BigUint) -> Result<f64> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::Domain(format!(
            "win probability must lie in (0, 1/2], got {p}"
        )));
    }
    if !(0.0..=0.5).contains(&q) {
        return Err(Error::Domain(format!(
            "loss probability must lie in [0, 1/2], got {q}"
        )));
    }
    if rounds.bits() == 0 {
        return Err(Error::Domain("at least one round is needed".into()));
    }
    let exponent = (rounds - BigUint::one()).to_f64().unwrap_or(f64::INFINITY);
    let stay = 1.0 - (p + q);
    Ok(1.0 / (1.0 + q / p) * (1.0 - stay.powf(exponent)))
}

/// `(check · (w · end)^k)^N`.
pub fn round_schedule(w: &[String], k: &BigUint, rounds: &BigUint) -> Result<WordSchedule> {
    let mut body = w.to_vec();
    body.push(END.into());
    let round = WordSchedule::concat(
        WordSchedule::literal([CHECK]),
        WordSchedule::power(WordSchedule::Literal(body), k.clone())?,
    );
    WordSchedule::power(round, rounds.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionSample {
    pub n: u64,
    pub k: BigUint,
    pub rounds: BigUint,
    /// Length of `(check · (w · end)^k)^N`.
    pub length: BigUint,
    /// Evaluated on `B` by matrix powering.
    pub matrix_probability: f64,
    /// `round_formula(½x^k, ½(1−x)^k, N)`.
    pub formula_probability: f64,
}

impl ReductionSample {
    pub fn discrepancy(&self) -> f64 {
        (self.matrix_probability - self.formula_probability).abs()
    }
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    /// `Pr_A(w)`.
    pub x: f64,
    pub samples: Vec<ReductionSample>,
    /// Convergence view of the matrix-evaluated probabilities.
    pub convergence: ConvergenceReport,
}

impl ReductionReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.samples
            .iter()
            .map(ReductionSample::discrepancy)
            .fold(0.0, f64::max)
    }
}

/// For `n = 1..=n_max` sets `k = f_P(n·(|w|+1))` and
/// `N = f_SP(n·(1 + k·(|w|+1)))` and evaluates `Pr_B((check · (w · end)^k)^N)`
/// both on `B` and through [`round_formula`].
pub fn verify_reduction(
    a: &ProbabilisticAutomaton,
    w: &[String],
    n_max: u64,
) -> Result<ReductionReport> {
    let b = build_reduction(a)?;
    // rounding can push a sum of products slightly past 1
    let x = a.acceptance_probability(w)?.clamp(0.0, 1.0);
    let block = BigUint::from(w.len() + 1);
    let mut samples = Vec::new();
    for n in 1..=n_max {
        let k = f_p(&(&block * n));
        let rounds = f_sp(&((&k * &block + 1u32) * n));
        let schedule = round_schedule(w, &k, &rounds)?;
        let matrix_probability = b.automaton.accepted_power_probability(&schedule)?;
        let k_f = k.to_f64().unwrap_or(f64::INFINITY);
        let p = 0.5 * x.powf(k_f);
        let q = 0.5 * (1.0 - x).powf(k_f);
        let formula_probability = if p > 0.0 {
            round_formula(p, q, &rounds)?
        } else {
            0.0
        };
        samples.push(ReductionSample {
            n,
            length: schedule.len(),
            k,
            rounds,
            matrix_probability,
            formula_probability,
        });
    }
    let convergence = ConvergenceReport::from_samples(
        Quantity::Probability,
        samples
            .iter()
            .map(|s| Sample {
                n: s.n,
                length: s.length.clone(),
                value: s.matrix_probability,
            })
            .collect(),
    );
    Ok(ReductionReport {
        x,
        samples,
        convergence,
    })
}

/// Five-state automaton with value 1 on which the Markov Monoid algorithm
/// answers NO. States `p0, L, R, acc, rej`; `b` from `p0` goes to `L` or `R`
/// with probability ½ each; `a` keeps `L` with probability `x` and `R` with
/// probability `1 − x`, otherwise returning to `p0`; `b` from `L` accepts and
/// from `R` rejects. For `x > ½` the words `(b a^n)^(2^n)` are accepted with
/// probability tending to 1, the words `(b a^n)^n` are not.
pub fn counterexample_automaton(x: f64) -> Result<ProbabilisticAutomaton> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x must lie in (0, 1), got {x}")));
    }
    let (p0, l, r, acc, rej) = (0, 1, 2, 3, 4);
    let mut a = vec![vec![0.0; 5]; 5];
    a[p0][p0] = 1.0;
    a[l][l] = x;
    a[l][p0] = 1.0 - x;
    a[r][r] = 1.0 - x;
    a[r][p0] = x;
    a[acc][acc] = 1.0;
    a[rej][rej] = 1.0;
    let mut b = vec![vec![0.0; 5]; 5];
    b[p0][l] = 0.5;
    b[p0][r] = 0.5;
    b[l][acc] = 1.0;
    b[r][rej] = 1.0;
    b[acc][acc] = 1.0;
    b[rej][rej] = 1.0;
    ProbabilisticAutomaton::new(
        ["p0", "L", "R", "acc", "rej"].map(String::from).to_vec(),
        Alphabet::new(["a", "b"])?,
        vec![
            StochasticMatrix::from_rows(&a, "a")?,
            StochasticMatrix::from_rows(&b, "b")?,
        ],
        vec![1.0, 0.0, 0.0, 0.0, 0.0],
        vec![false, false, false, true, false],
    )
}
