//! The Markov Monoid algorithm.
//!
//! The Markov Monoid of an automaton is the least set of boolean matrices that
//! contains the projections `⟦φ(a)⟧` of the letters and is closed under boolean
//! product and under stabilization of idempotents. The algorithm answers YES
//! when the monoid contains a value-1 witness. Every element carries an
//! ω-expression recording how saturation first produced it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::automaton::ProbabilisticAutomaton;
use crate::error::{Error, Result};
use crate::matrix::{BooleanMatrix, StochasticMatrix};
use crate::omega::OmegaExpression;

/// `⟦M⟧(s,t) = 1` iff `M(s,t) > 0`.
pub fn boolean_projection(m: &StochasticMatrix) -> BooleanMatrix {
    m.support(0.0)
}

pub fn boolean_product(m: &BooleanMatrix, n: &BooleanMatrix) -> Result<BooleanMatrix> {
    m.product(n)
}

pub fn is_idempotent(m: &BooleanMatrix) -> bool {
    m.is_idempotent()
}

/// States `t` such that every state `t` reaches in one `m`-step reaches `t` back.
pub fn recurrent_states(m: &BooleanMatrix) -> Vec<bool> {
    let n = m.dim();
    (0..n)
        .map(|t| m.row_support(t).all(|s| m.get(s, t)))
        .collect()
}

/// `M♯(s,t) = 1` iff `M(s,t) = 1` and `t` is `M`-recurrent. Only defined on idempotents.
pub fn stabilization(m: &BooleanMatrix) -> Result<BooleanMatrix> {
    if !m.is_idempotent() {
        return Err(Error::Precondition(format!(
            "stabilization of non-idempotent matrix {m}"
        )));
    }
    let recurrent = recurrent_states(m);
    Ok(BooleanMatrix::from_fn(m.dim(), |s, t| {
        m.get(s, t) && recurrent[t]
    }))
}

/// Closure of the letter projections under boolean product (words of length >= 1).
pub fn transition_monoid(a: &ProbabilisticAutomaton) -> HashSet<BooleanMatrix> {
    let generators: Vec<BooleanMatrix> = a.boolean_generators().into_values().collect();
    let mut seen: HashSet<BooleanMatrix> = generators.iter().cloned().collect();
    let mut frontier: Vec<BooleanMatrix> = seen.iter().cloned().collect();
    while let Some(m) = frontier.pop() {
        for g in &generators {
            let next = m.mul_unchecked(g);
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen
}

/// How saturation first produced an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Letter,
    Product,
    Stabilization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonoidElement {
    pub matrix: BooleanMatrix,
    pub witness: OmegaExpression,
    pub origin: Origin,
}

impl MonoidElement {
    /// One line of the dump format: row-major bitstring, a space, the witness.
    pub fn dump_line(&self) -> String {
        format!("{} {}", self.matrix.to_bitstring(), self.witness)
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump_line())
    }
}

#[derive(Debug, Clone)]
pub struct MarkovMonoid {
    generators: BTreeMap<String, BooleanMatrix>,
    elements: Vec<MonoidElement>,
    index: HashMap<BooleanMatrix, usize>,
}

impl MarkovMonoid {
    /// Saturates with the letters in alphabet order.
    pub fn compute(a: &ProbabilisticAutomaton) -> Self {
        let order: Vec<String> = a.alphabet().tokens().to_vec();
        Self::compute_with_order(a, &order)
    }

    /// Saturates with the generators taken in `order` (a permutation of the alphabet).
    /// The resulting set of matrices does not depend on the order; witnesses may.
    pub fn compute_with_order(a: &ProbabilisticAutomaton, order: &[String]) -> Self {
        let generators = a.boolean_generators();
        let mut monoid = MarkovMonoid {
            generators,
            elements: Vec::new(),
            index: HashMap::new(),
        };
        for letter in order {
            let m = monoid.generators[letter].clone();
            monoid.insert(m, OmegaExpression::letter(letter.clone()), Origin::Letter);
        }
        monoid.saturate();
        monoid
    }

    fn insert(&mut self, matrix: BooleanMatrix, witness: OmegaExpression, origin: Origin) -> bool {
        if self.index.contains_key(&matrix) {
            return false;
        }
        self.index.insert(matrix.clone(), self.elements.len());
        self.elements.push(MonoidElement {
            matrix,
            witness,
            origin,
        });
        true
    }

    /// Worklist fixpoint: each round first adds the products of every pair that
    /// involves an element from the previous round, then the stabilizations of
    /// the idempotents among the previous round's elements.
    fn saturate(&mut self) {
        let mut done = 0;
        while done < self.elements.len() {
            let len = self.elements.len();
            for i in 0..len {
                for j in 0..len {
                    if i < done && j < done {
                        continue;
                    }
                    let (l, r) = (&self.elements[i], &self.elements[j]);
                    let m = l.matrix.mul_unchecked(&r.matrix);
                    if !self.index.contains_key(&m) {
                        let w = OmegaExpression::product(l.witness.clone(), r.witness.clone());
                        self.insert(m, w, Origin::Product);
                    }
                }
            }
            for i in done..len {
                let e = &self.elements[i];
                if e.matrix.is_idempotent() {
                    let s = stabilization(&e.matrix).expect("idempotent");
                    if !self.index.contains_key(&s) {
                        let w = OmegaExpression::omega(e.witness.clone());
                        self.insert(s, w, Origin::Stabilization);
                    }
                }
            }
            done = len;
        }
    }

    pub fn elements(&self) -> &[MonoidElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generators(&self) -> &BTreeMap<String, BooleanMatrix> {
        &self.generators
    }

    pub fn contains(&self, m: &BooleanMatrix) -> bool {
        self.index.contains_key(m)
    }

    pub fn get(&self, m: &BooleanMatrix) -> Option<&MonoidElement> {
        self.index.get(m).map(|&i| &self.elements[i])
    }

    pub fn matrices(&self) -> HashSet<BooleanMatrix> {
        self.index.keys().cloned().collect()
    }

    pub fn count_by_origin(&self, origin: Origin) -> usize {
        self.elements.iter().filter(|e| e.origin == origin).count()
    }

    /// First element, in saturation order, that is a value-1 witness for `a`.
    pub fn find_value1_witness(&self, a: &ProbabilisticAutomaton) -> Option<&MonoidElement> {
        self.elements
            .iter()
            .find(|e| is_value1_witness(&e.matrix, a))
    }

    /// The dump format, one element per line.
    pub fn dump(&self) -> String {
        self.elements.iter().map(|e| e.dump_line() + "\n").collect()
    }
}

/// Shorthand for [`MarkovMonoid::compute`].
pub fn markov_monoid(a: &ProbabilisticAutomaton) -> MarkovMonoid {
    MarkovMonoid::compute(a)
}

/// Shorthand for [`MarkovMonoid::find_value1_witness`].
pub fn find_value1_witness<'m>(
    monoid: &'m MarkovMonoid,
    a: &ProbabilisticAutomaton,
) -> Option<&'m MonoidElement> {
    monoid.find_value1_witness(a)
}

/// For all `s` with `I(s) > 0` and all `t`, `M(s,t) = 1` implies `t ∈ F`.
pub fn is_value1_witness(m: &BooleanMatrix, a: &ProbabilisticAutomaton) -> bool {
    let finals = a.final_states();
    a.initial()
        .iter()
        .enumerate()
        .filter(|(_, p)| **p > 0.0)
        .all(|(s, _)| m.row_support(s).all(|t| finals[t]))
}
