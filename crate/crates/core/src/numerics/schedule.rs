//! Word schedules: huge finite words kept in factored form.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::factorial::{f_p, f_sp};
use crate::omega::OmegaExpression;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordSchedule {
    Literal(Vec<String>),
    Concat(Box<WordSchedule>, Box<WordSchedule>),
    /// `child^exponent`, exponent at least 1.
    Power(Box<WordSchedule>, BigUint),
}

impl WordSchedule {
    pub fn literal<I, S>(word: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        WordSchedule::Literal(word.into_iter().map(Into::into).collect())
    }

    pub fn concat(left: WordSchedule, right: WordSchedule) -> Self {
        WordSchedule::Concat(Box::new(left), Box::new(right))
    }

    pub fn power(child: WordSchedule, exponent: BigUint) -> Result<Self> {
        if exponent.is_zero() {
            return Err(Error::Domain(
                "schedule exponents must be at least 1".into(),
            ));
        }
        Ok(WordSchedule::Power(Box::new(child), exponent))
    }

    /// Length of the denoted word.
    pub fn len(&self) -> BigUint {
        match self {
            WordSchedule::Literal(w) => BigUint::from(w.len()),
            WordSchedule::Concat(l, r) => l.len() + r.len(),
            WordSchedule::Power(c, e) => c.len() * e,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_zero()
    }

    /// The denoted word, or `None` when it is longer than `max_len`.
    pub fn expand(&self, max_len: usize) -> Option<Vec<String>> {
        if self.len().to_usize().is_none_or(|l| l > max_len) {
            return None;
        }
        let mut out = Vec::new();
        self.expand_into(&mut out);
        Some(out)
    }

    fn expand_into(&self, out: &mut Vec<String>) {
        match self {
            WordSchedule::Literal(w) => out.extend(w.iter().cloned()),
            WordSchedule::Concat(l, r) => {
                l.expand_into(out);
                r.expand_into(out);
            }
            WordSchedule::Power(c, e) => {
                let times = e.to_usize().expect("checked by expand");
                for _ in 0..times {
                    c.expand_into(out);
                }
            }
        }
    }
}

/// `s · t`.
pub fn concat_schedules(s: WordSchedule, t: WordSchedule) -> WordSchedule {
    WordSchedule::concat(s, t)
}

/// The `n`-th word of the polynomial realization of `e`: letters stay letters,
/// products concatenate, and `F^ω` becomes `u^(f_P(n·|u|))` with `u` the
/// realization of `F`.
pub fn realize_polynomial(e: &OmegaExpression, n: u64) -> WordSchedule {
    assert!(n >= 1, "realizations are indexed from n = 1");
    match e {
        OmegaExpression::Letter(a) => WordSchedule::literal([a.clone()]),
        OmegaExpression::Product(l, r) => {
            WordSchedule::concat(realize_polynomial(l, n), realize_polynomial(r, n))
        }
        OmegaExpression::Omega(c) => {
            let inner = realize_polynomial(c, n);
            let exponent = f_p(&(inner.len() * n));
            WordSchedule::Power(Box::new(inner), exponent)
        }
    }
}

/// The `n`-th word of the super-polynomial realization: `u^(f_SP(n·|u|))` with
/// `u = realize_polynomial(e, n)`.
pub fn realize_superpolynomial(e: &OmegaExpression, n: u64) -> WordSchedule {
    let inner = realize_polynomial(e, n);
    let exponent = f_sp(&(inner.len() * n));
    WordSchedule::Power(Box::new(inner), exponent)
}

impl fmt::Display for WordSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordSchedule::Literal(w) if w.is_empty() => f.write_str("ε"),
            WordSchedule::Literal(w) => f.write_str(&w.join(" ")),
            WordSchedule::Concat(l, r) => write!(f, "{l} {r}"),
            WordSchedule::Power(c, e) => match &**c {
                WordSchedule::Literal(w) if w.len() == 1 => write!(f, "{c}^{e}"),
                _ => write!(f, "({c})^{e}"),
            },
        }
    }
}
