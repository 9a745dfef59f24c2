//! Probabilistic automata, their acceptance probabilities and the JSON file format.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BooleanMatrix, StochasticMatrix, ROW_SUM_TOLERANCE};
use crate::numerics::schedule::WordSchedule;

/// Ordered set of letter tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

fn valid_token(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut alphabet = Alphabet::default();
        for t in tokens {
            let t = t.into();
            if !valid_token(&t) {
                return Err(Error::Format(format!(
                    "letter `{t}` must be a non-empty run of letters, digits or `_`"
                )));
            }
            if alphabet.index.contains_key(&t) {
                return Err(Error::Format(format!("duplicate letter `{t}`")));
            }
            alphabet.index.insert(t.clone(), alphabet.tokens.len());
            alphabet.tokens.push(t);
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Longest token that is a prefix of `text`.
    pub(crate) fn longest_prefix<'a>(&'a self, text: &str) -> Option<&'a str> {
        self.tokens
            .iter()
            .filter(|t| text.starts_with(t.as_str()))
            .max_by_key(|t| t.len())
            .map(String::as_str)
    }

    /// Splits `text` into letters. Whitespace separates tokens; adjacent tokens are
    /// split greedily by longest match, so `"ba"` reads as `b a` over `{a, b}`.
    pub fn parse_word(&self, text: &str) -> Result<Vec<String>> {
        let mut word = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            let rest = &text[pos..];
            let c = rest.chars().next().unwrap();
            if c.is_whitespace() {
                pos += c.len_utf8();
                continue;
            }
            match self.longest_prefix(rest) {
                Some(tok) => {
                    word.push(tok.to_string());
                    pos += tok.len();
                }
                None => {
                    let end = rest
                        .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                        .unwrap_or(rest.len())
                        .max(c.len_utf8());
                    return Err(Error::UnknownLetter(rest[..end].to_string()));
                }
            }
        }
        Ok(word)
    }
}

/// A probabilistic automaton `(Q, φ, I, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticAutomaton {
    states: Vec<String>,
    alphabet: Alphabet,
    transitions: Vec<StochasticMatrix>,
    initial: Vec<f64>,
    final_states: Vec<bool>,
}

impl ProbabilisticAutomaton {
    /// `transitions[i]` is the matrix of the `i`-th letter of `alphabet`.
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        transitions: Vec<StochasticMatrix>,
        initial: Vec<f64>,
        final_states: Vec<bool>,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::Format(
                "an automaton needs at least one state".into(),
            ));
        }
        let mut seen = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if let Some(j) = seen.insert(s.as_str(), i) {
                return Err(Error::Format(format!(
                    "state `{s}` appears twice (positions {j} and {i})"
                )));
            }
        }
        if transitions.len() != alphabet.len() {
            return Err(Error::Format(format!(
                "{} letters but {} transition matrices",
                alphabet.len(),
                transitions.len()
            )));
        }
        for (letter, m) in alphabet.tokens().iter().zip(&transitions) {
            if m.dim() != n {
                return Err(Error::Format(format!(
                    "transition `{letter}` has dimension {} but there are {n} states",
                    m.dim()
                )));
            }
        }
        if initial.len() != n || final_states.len() != n {
            return Err(Error::Format(format!(
                "initial/final vectors must have length {n}"
            )));
        }
        if let Some(i) = initial
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::Format(format!(
                "initial entry {i} = {} is not a probability",
                initial[i]
            )));
        }
        let sum: f64 = initial.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::Format(format!(
                "initial vector sums to {sum}, expected 1"
            )));
        }
        Ok(ProbabilisticAutomaton {
            states,
            alphabet,
            transitions,
            initial,
            final_states,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn final_states(&self) -> &[bool] {
        &self.final_states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// The unique initial state, if `I` is a unit vector.
    pub fn initial_state(&self) -> Option<usize> {
        let support: Vec<usize> = (0..self.num_states())
            .filter(|&i| self.initial[i] > 0.0)
            .collect();
        match support.as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }

    pub fn transition(&self, letter: &str) -> Result<&StochasticMatrix> {
        self.alphabet
            .index_of(letter)
            .map(|i| &self.transitions[i])
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&str, &StochasticMatrix)> {
        self.alphabet
            .tokens()
            .iter()
            .map(String::as_str)
            .zip(&self.transitions)
    }

    /// `⟦φ(a)⟧` for every letter, keyed by token.
    pub fn boolean_generators(&self) -> BTreeMap<String, BooleanMatrix> {
        self.transitions()
            .map(|(a, m)| (a.to_string(), m.support(0.0)))
            .collect()
    }

    /// True when every transition probability is 0, 1/2 or 1.
    pub fn is_strict(&self) -> bool {
        self.transitions.iter().all(StochasticMatrix::is_strict)
    }

    /// `φ(w)`, with `φ(ε)` the identity.
    pub fn word_matrix<S: AsRef<str>>(&self, word: &[S]) -> Result<StochasticMatrix> {
        let mut acc = StochasticMatrix::identity(self.num_states());
        for a in word {
            acc = acc.mul_unchecked(self.transition(a.as_ref())?);
        }
        Ok(acc)
    }

    /// `I · M · F`.
    pub fn accept_through(&self, m: &StochasticMatrix) -> f64 {
        let n = self.num_states();
        let mut total = 0.0;
        for s in 0..n {
            if self.initial[s] == 0.0 {
                continue;
            }
            let row: f64 = (0..n)
                .filter(|&t| self.final_states[t])
                .map(|t| m.get(s, t))
                .sum();
            total += self.initial[s] * row;
        }
        total
    }

    /// `I · φ(w) · F`.
    pub fn acceptance_probability<S: AsRef<str>>(&self, word: &[S]) -> Result<f64> {
        let n = self.num_states();
        let mut dist = self.initial.clone();
        for a in word {
            let m = self.transition(a.as_ref())?;
            let mut next = vec![0.0; n];
            for (s, &p) in dist.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (t, slot) in next.iter_mut().enumerate() {
                    *slot += p * m.get(s, t);
                }
            }
            dist = next;
        }
        Ok(dist
            .iter()
            .zip(&self.final_states)
            .filter(|(_, f)| **f)
            .map(|(p, _)| p)
            .sum())
    }

    /// `φ` of the word denoted by `schedule`, computed without expanding it.
    pub fn schedule_matrix(&self, schedule: &WordSchedule) -> Result<StochasticMatrix> {
        match schedule {
            WordSchedule::Literal(word) => self.word_matrix(word),
            WordSchedule::Concat(l, r) => Ok(self
                .schedule_matrix(l)?
                .mul_unchecked(&self.schedule_matrix(r)?)),
            WordSchedule::Power(child, e) => Ok(self.schedule_matrix(child)?.pow(e)),
        }
    }

    /// Acceptance probability of the word denoted by `schedule`.
    pub fn accepted_power_probability(&self, schedule: &WordSchedule) -> Result<f64> {
        Ok(self.accept_through(&self.schedule_matrix(schedule)?))
    }

    /// Copy of this automaton with a fresh initial state that has no incoming transitions.
    /// Every word keeps its acceptance probability. Requires a unit initial vector.
    pub fn with_isolated_initial(&self) -> Result<Self> {
        let q0 = self
            .initial_state()
            .ok_or_else(|| Error::Precondition("initial vector must be a unit vector".into()))?;
        let n = self.num_states();
        let mut name = format!("{}_init", self.states[q0]);
        while self.states.contains(&name) {
            name.push('_');
        }
        let mut states = self.states.clone();
        states.push(name);
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .map(|(a, m)| {
                let mut rows: Vec<Vec<f64>> = m
                    .to_rows()
                    .into_iter()
                    .map(|mut r| {
                        r.push(0.0);
                        r
                    })
                    .collect();
                let mut fresh = m.as_matrix().row(q0).to_vec();
                fresh.push(0.0);
                rows.push(fresh);
                StochasticMatrix::from_rows(&rows, &self.alphabet.tokens()[a])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut initial = vec![0.0; n + 1];
        initial[n] = 1.0;
        let mut final_states = self.final_states.clone();
        final_states.push(self.final_states[q0]);
        ProbabilisticAutomaton::new(
            states,
            self.alphabet.clone(),
            transitions,
            initial,
            final_states,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        AutomatonFile::from_json(text)?.to_automaton()
    }

    pub fn to_json(&self) -> String {
        AutomatonFile::from_automaton(self).to_json()
    }
}

/// On-disk representation of an automaton.
///
/// ```json
/// { "states": ["p", "q"], "alphabet": ["a"], "initial": [1, 0], "final": [false, true],
///   "transitions": { "a": [[0.5, 0.5], [0, 1]] } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: Vec<f64>,
    #[serde(rename = "final")]
    pub final_states: Vec<bool>,
    pub transitions: BTreeMap<String, Vec<Vec<f64>>>,
    /// Set when every transition probability lies in {0, 1/2, 1}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    /// Provenance tag per state name, written by the reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_map: Option<BTreeMap<String, String>>,
}

impl AutomatonFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("automaton file serializes")
    }

    pub fn from_automaton(a: &ProbabilisticAutomaton) -> Self {
        AutomatonFile {
            states: a.states.clone(),
            alphabet: a.alphabet.tokens().to_vec(),
            initial: a.initial.clone(),
            final_states: a.final_states.clone(),
            transitions: a
                .transitions()
                .map(|(l, m)| (l.to_string(), m.to_rows()))
                .collect(),
            strict: Some(a.is_strict()),
            state_map: None,
        }
    }

    pub fn to_automaton(&self) -> Result<ProbabilisticAutomaton> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        if let Some(extra) = self.transitions.keys().find(|k| !alphabet.contains(k)) {
            return Err(Error::Format(format!(
                "transitions given for `{extra}`, which is not in the alphabet"
            )));
        }
        let n = self.states.len();
        let mut matrices = Vec::with_capacity(alphabet.len());
        for letter in alphabet.tokens() {
            let rows = self
                .transitions
                .get(letter)
                .ok_or_else(|| Error::Format(format!("no transitions for letter `{letter}`")))?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Format(format!(
                    "transition `{letter}` must be a {n}x{n} array"
                )));
            }
            matrices.push(StochasticMatrix::from_rows(
                rows,
                &format!("transition `{letter}`"),
            )?);
        }
        let a = ProbabilisticAutomaton::new(
            self.states.clone(),
            alphabet,
            matrices,
            self.initial.clone(),
            self.final_states.clone(),
        )?;
        if self.strict == Some(true) && !a.is_strict() {
            return Err(Error::Format(
                "declared strict but has probabilities outside {0, 1/2, 1}".into(),
            ));
        }
        if let Some(map) = &self.state_map {
            if let Some(unknown) = map.keys().find(|k| a.state_index(k).is_none()) {
                return Err(Error::Format(format!(
                    "state_map names unknown state `{unknown}`"
                )));
            }
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn single_state(accepting: bool) -> ProbabilisticAutomaton {
        let alphabet = Alphabet::new(["a", "b"]).unwrap();
        let m = StochasticMatrix::identity(1);
        ProbabilisticAutomaton::new(
            vec!["q".into()],
            alphabet,
            vec![m.clone(), m],
            vec![1.0],
            vec![accepting],
        )
        .unwrap()
    }

    const TWO_STATE: &str = r#"{
        "states": ["p", "q"],
        "alphabet": ["a"],
        "initial": [1, 0],
        "final": [false, true],
        "transitions": { "a": [[0.5, 0.5], [0, 1]] }
    }"#;

    #[test]
    fn single_state_accepts_everything() {
        let a = single_state(true);
        for w in [vec![], vec!["a"], vec!["a", "b", "b"]] {
            assert_eq!(a.acceptance_probability(&w).unwrap(), 1.0);
        }
        assert_eq!(
            single_state(false).acceptance_probability(&["a"]).unwrap(),
            0.0
        );
    }

    #[test]
    fn empty_word_is_initial_dot_final() {
        let a = ProbabilisticAutomaton::from_json(TWO_STATE).unwrap();
        assert_eq!(a.acceptance_probability::<&str>(&[]).unwrap(), 0.0);
        assert_eq!(a.acceptance_probability(&["a", "a"]).unwrap(), 0.75);
    }

    #[test]
    fn unknown_letter() {
        let a = single_state(true);
        assert!(matches!(
            a.acceptance_probability(&["c"]),
            Err(Error::UnknownLetter(l)) if l == "c"
        ));
    }

    #[test]
    fn schedule_matches_flat_word() {
        let a = ProbabilisticAutomaton::from_json(TWO_STATE).unwrap();
        let lit = WordSchedule::literal(["a", "a", "a"]);
        let pow = WordSchedule::power(WordSchedule::literal(["a"]), BigUint::from(3u32)).unwrap();
        let flat = a.acceptance_probability(&["a", "a", "a"]).unwrap();
        assert_eq!(a.accepted_power_probability(&lit).unwrap(), flat);
        assert!((a.accepted_power_probability(&pow).unwrap() - flat).abs() < 1e-15);
    }

    #[test]
    fn parse_words() {
        let al = Alphabet::new(["a", "b", "check", "end"]).unwrap();
        assert_eq!(al.parse_word("ba").unwrap(), vec!["b", "a"]);
        assert_eq!(
            al.parse_word("check a end").unwrap(),
            vec!["check", "a", "end"]
        );
        assert!(matches!(al.parse_word("a x"), Err(Error::UnknownLetter(t)) if t == "x"));
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let a = ProbabilisticAutomaton::from_json(TWO_STATE).unwrap();
        let text = a.to_json();
        assert!(text.contains("\"strict\": true"));
        assert_eq!(ProbabilisticAutomaton::from_json(&text).unwrap(), a);
    }

    #[test]
    fn row_diagnostic_names_the_row() {
        let bad = TWO_STATE.replace("[0, 1]]", "[0.2, 0.7]]");
        let err = ProbabilisticAutomaton::from_json(&bad).unwrap_err();
        assert!(matches!(err, Error::RowSum { row: 1, .. }), "{err}");
        assert!(err.to_string().contains("row 1"));
        assert!(err.to_string().contains("transition `a`"));
    }

    #[test]
    fn structural_errors() {
        let missing = TWO_STATE.replace("\"a\": [[0.5, 0.5], [0, 1]]", "");
        assert!(ProbabilisticAutomaton::from_json(&missing).is_err());
        let bad_init = TWO_STATE.replace("[1, 0]", "[0.5, 0]");
        assert!(ProbabilisticAutomaton::from_json(&bad_init).is_err());
        let lying = TWO_STATE
            .replace("\"final\"", "\"strict\": true, \"final\"")
            .replace("[[0.5, 0.5]", "[[0.25, 0.75]");
        assert!(ProbabilisticAutomaton::from_json(&lying).is_err());
        let extra = TWO_STATE.replace("\"initial\"", "\"bogus\": 1, \"initial\"");
        assert!(ProbabilisticAutomaton::from_json(&extra).is_err());
    }

    #[test]
    fn isolated_initial_preserves_probabilities() {
        let text = r#"{
            "states": ["p", "q"], "alphabet": ["a", "b"], "initial": [1, 0],
            "final": [false, true],
            "transitions": { "a": [[0.5, 0.5], [0.25, 0.75]], "b": [[0, 1], [1, 0]] }
        }"#;
        let a = ProbabilisticAutomaton::from_json(text).unwrap();
        let b = a.with_isolated_initial().unwrap();
        assert_eq!(b.num_states(), 3);
        let q0 = b.initial_state().unwrap();
        for (_, m) in b.transitions() {
            assert!((0..3).all(|s| m.get(s, q0) == 0.0));
        }
        for w in [vec![], vec!["a"], vec!["b", "a"], vec!["a", "b", "a", "a"]] {
            let (x, y) = (
                a.acceptance_probability(&w).unwrap(),
                b.acceptance_probability(&w).unwrap(),
            );
            assert!((x - y).abs() < 1e-15);
        }
    }
}
