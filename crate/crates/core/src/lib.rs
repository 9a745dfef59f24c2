//! Analysis of probabilistic automata around the value-1 problem.
//!
//! * [`monoid`] runs the Markov Monoid algorithm: saturate the letter
//!   projections under boolean product and stabilization, then look for a
//!   value-1 witness.
//! * [`omega`] parses and interprets the ω-expressions that name monoid elements.
//! * [`numerics`] turns ω-expressions into concrete, exponentially long words
//!   (polynomial and super-polynomial realizations) and evaluates them without
//!   expanding them.
//! * [`reduction`] builds the automaton used to reduce emptiness to acceptance
//!   of super-polynomial words, and the classic automaton with value 1 on which
//!   the Markov Monoid algorithm answers NO.
//!
//! ```
//! use markov_monoid::{reduction::counterexample_automaton, monoid::markov_monoid};
//!
//! let a = counterexample_automaton(0.9).unwrap();
//! let mm = markov_monoid(&a);
//! assert!(mm.find_value1_witness(&a).is_none());
//! ```

pub mod automaton;
pub mod error;
pub mod matrix;
pub mod monoid;
pub mod numerics;
pub mod omega;
pub mod reduction;

pub use automaton::{Alphabet, AutomatonFile, ProbabilisticAutomaton};
pub use error::{Error, Result};
pub use matrix::{matrix_norm, BooleanMatrix, SquareMatrix, StochasticMatrix};
pub use monoid::{MarkovMonoid, MonoidElement};
pub use numerics::{ConvergenceReport, Mode, WordSchedule};
pub use omega::OmegaExpression;
