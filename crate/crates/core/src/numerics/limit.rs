//! Limits of factorial powers and the numeric interpretation of ω-expressions.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::automaton::ProbabilisticAutomaton;
use crate::error::{Error, Result};
use crate::matrix::{BooleanMatrix, StochasticMatrix};
use crate::monoid::stabilization;
use crate::omega::{idempotent_exponent, OmegaExpression};

/// Entries above this are treated as positive when booleanizing numeric limits.
pub const PROJECTION_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Stop once successive factorial powers are this close in norm.
    pub tol: f64,
    /// Largest `k` such that `M^(k!)` is tried.
    pub k_max: u32,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            tol: 1e-10,
            k_max: 60,
        }
    }
}

/// `M^∞`, approximated by `M^(k!)` for the first `k` where `M^(k!)` and
/// `M^((k-1)!)` differ by less than `opts.tol`.
pub fn limit_matrix(m: &StochasticMatrix, opts: LimitOptions) -> Result<StochasticMatrix> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let mut current = m.clone();
    let mut last_distance = f64::INFINITY;
    for k in 2..=opts.k_max.max(2) {
        let next = current.pow(&BigUint::from(k));
        last_distance = next.distance(&current)?;
        if last_distance < opts.tol {
            return Ok(next);
        }
        current = next;
    }
    Err(Error::NonConvergence {
        k_max: opts.k_max,
        last_distance,
    })
}

/// Booleanization of a numeric limit.
pub fn numeric_projection(m: &StochasticMatrix) -> BooleanMatrix {
    m.support(PROJECTION_EPSILON)
}

/// The matrix a probabilistic automaton assigns to the polynomial prostochastic
/// word of `e`: letters map to `φ(a)`, products multiply, and `F^ω` takes the
/// limit of the factorial powers of `F`'s matrix. Idempotence at ω-nodes is
/// checked on the boolean interpretation, never on floats.
pub fn numeric_interpretation(
    e: &OmegaExpression,
    a: &ProbabilisticAutomaton,
    opts: LimitOptions,
) -> Result<StochasticMatrix> {
    let generators = a.boolean_generators();
    interpret(e, a, &generators, opts).map(|(_, m)| m)
}

fn interpret(
    e: &OmegaExpression,
    a: &ProbabilisticAutomaton,
    generators: &BTreeMap<String, BooleanMatrix>,
    opts: LimitOptions,
) -> Result<(BooleanMatrix, StochasticMatrix)> {
    match e {
        OmegaExpression::Letter(l) => {
            let m = a.transition(l)?.clone();
            Ok((generators[l].clone(), m))
        }
        OmegaExpression::Product(l, r) => {
            let (bl, nl) = interpret(l, a, generators, opts)?;
            let (br, nr) = interpret(r, a, generators, opts)?;
            Ok((bl.product(&br)?, nl.product(&nr)?))
        }
        OmegaExpression::Omega(c) => {
            let (b, n) = interpret(c, a, generators, opts)?;
            if !b.is_idempotent() {
                return Err(Error::NotIdempotent {
                    expression: c.clone(),
                    repair_exponent: idempotent_exponent(&b),
                });
            }
            Ok((stabilization(&b)?, limit_matrix(&n, opts)?))
        }
    }
}
