//! ω-expressions `E ::= a | E·E | E^ω`, their concrete syntax and boolean interpretation.
//!
//! Concrete syntax: letters are alphabet tokens, juxtaposition or `.` is a
//! left-associative product, postfix `^w` (or `^ω`) is ω-iteration and
//! parentheses group. A postfix `^k` with a positive integer `k` is shorthand
//! for the `k`-fold product.

use std::collections::BTreeMap;
use std::fmt;

use crate::automaton::Alphabet;
use crate::error::{Error, Result};
use crate::matrix::BooleanMatrix;
use crate::monoid::stabilization;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OmegaExpression {
    Letter(String),
    Product(Box<OmegaExpression>, Box<OmegaExpression>),
    Omega(Box<OmegaExpression>),
}

impl OmegaExpression {
    pub fn letter(token: impl Into<String>) -> Self {
        OmegaExpression::Letter(token.into())
    }

    pub fn product(left: OmegaExpression, right: OmegaExpression) -> Self {
        OmegaExpression::Product(Box::new(left), Box::new(right))
    }

    pub fn omega(child: OmegaExpression) -> Self {
        OmegaExpression::Omega(Box::new(child))
    }

    /// `self · self · ... · self` (`count` copies, left-associated).
    pub fn repeat(&self, count: usize) -> Self {
        assert!(count >= 1);
        let mut acc = self.clone();
        for _ in 1..count {
            acc = OmegaExpression::product(acc, self.clone());
        }
        acc
    }

    /// Nesting depth of operators; a letter has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            OmegaExpression::Letter(_) => 0,
            OmegaExpression::Product(l, r) => 1 + l.depth().max(r.depth()),
            OmegaExpression::Omega(c) => 1 + c.depth(),
        }
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        parse_expression(text, alphabet)
    }

    /// `⟦E⟧`: letters map to generators, products to boolean products, and `E^ω`
    /// to the stabilization of `⟦E⟧`, which must be idempotent.
    pub fn boolean_interpretation(
        &self,
        generators: &BTreeMap<String, BooleanMatrix>,
    ) -> Result<BooleanMatrix> {
        match self {
            OmegaExpression::Letter(a) => generators
                .get(a)
                .cloned()
                .ok_or_else(|| Error::UnknownLetter(a.clone())),
            OmegaExpression::Product(l, r) => l
                .boolean_interpretation(generators)?
                .product(&r.boolean_interpretation(generators)?),
            OmegaExpression::Omega(child) => {
                let m = child.boolean_interpretation(generators)?;
                if !m.is_idempotent() {
                    return Err(Error::NotIdempotent {
                        expression: child.clone(),
                        repair_exponent: idempotent_exponent(&m),
                    });
                }
                stabilization(&m)
            }
        }
    }

    /// Smallest `e >= 1` with `⟦E⟧^e` idempotent.
    pub fn idempotent_closure_exponent(
        &self,
        generators: &BTreeMap<String, BooleanMatrix>,
    ) -> Result<usize> {
        Ok(idempotent_exponent(
            &self.boolean_interpretation(generators)?,
        ))
    }

    /// All expressions over `letters` with depth at most `max_depth`, by increasing depth.
    pub fn enumerate(letters: &[String], max_depth: usize) -> Vec<OmegaExpression> {
        let mut all: Vec<OmegaExpression> = letters
            .iter()
            .map(|a| OmegaExpression::letter(a.clone()))
            .collect();
        // all[newest..] holds exactly the expressions of the current maximal depth
        let mut newest = 0;
        for _ in 0..max_depth {
            let len = all.len();
            let mut next = Vec::new();
            for (i, l) in all.iter().enumerate() {
                for (j, r) in all.iter().enumerate() {
                    if i >= newest || j >= newest {
                        next.push(OmegaExpression::product(l.clone(), r.clone()));
                    }
                }
            }
            next.extend(all[newest..].iter().cloned().map(OmegaExpression::omega));
            newest = len;
            all.extend(next);
        }
        all
    }
}

/// Smallest `e >= 1` such that `m^e` is idempotent. Exists because boolean
/// matrices of a fixed dimension form a finite semigroup.
pub fn idempotent_exponent(m: &BooleanMatrix) -> usize {
    let mut power = m.clone();
    let mut e = 1;
    while !power.is_idempotent() {
        power = power.mul_unchecked(m);
        e += 1;
    }
    e
}

/// Parses `text` against `alphabet`; see the module docs for the syntax.
pub fn parse_expression(text: &str, alphabet: &Alphabet) -> Result<OmegaExpression> {
    let mut parser = Parser {
        text,
        pos: 0,
        alphabet,
    };
    let e = parser.expression()?;
    parser.skip_ws();
    if parser.pos < text.len() {
        return Err(parser.error("unexpected input"));
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn starts_term(&mut self) -> bool {
        self.skip_ws();
        match self.peek() {
            Some('(') => true,
            Some(c) => c.is_alphanumeric() || c == '_',
            None => false,
        }
    }

    fn expression(&mut self) -> Result<OmegaExpression> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('.') {
                self.pos += 1;
                let rhs = self.term()?;
                acc = OmegaExpression::product(acc, rhs);
            } else if self.starts_term() {
                let rhs = self.term()?;
                acc = OmegaExpression::product(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OmegaExpression> {
        let mut e = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('^') {
                return Ok(e);
            }
            self.pos += 1;
            self.skip_ws();
            match self.peek() {
                Some('w') | Some('ω') => {
                    self.pos += self.peek().unwrap().len_utf8();
                    e = OmegaExpression::omega(e);
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    let digits: String = self
                        .rest()
                        .chars()
                        .take_while(char::is_ascii_digit)
                        .collect();
                    self.pos += digits.len();
                    let count: usize = digits.parse().map_err(|_| Error::Syntax {
                        position: start,
                        message: "exponent too large".into(),
                    })?;
                    if count == 0 {
                        return Err(Error::Syntax {
                            position: start,
                            message: "exponent must be positive".into(),
                        });
                    }
                    e = e.repeat(count);
                }
                _ => return Err(self.error("expected `w` or a positive integer after `^`")),
            }
        }
    }

    fn atom(&mut self) -> Result<OmegaExpression> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expression()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_alphanumeric() || c == '_' => {
                match self.alphabet.longest_prefix(self.rest()) {
                    Some(tok) => {
                        self.pos += tok.len();
                        Ok(OmegaExpression::letter(tok))
                    }
                    None => {
                        let word: String = self
                            .rest()
                            .chars()
                            .take_while(|c| c.is_alphanumeric() || *c == '_')
                            .collect();
                        Err(Error::UnknownLetter(word))
                    }
                }
            }
            Some(_) => Err(self.error("expected a letter or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl fmt::Display for OmegaExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaExpression::Letter(a) => f.write_str(a),
            OmegaExpression::Product(l, r) => {
                write!(f, "{l} ")?;
                if matches!(**r, OmegaExpression::Product(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            OmegaExpression::Omega(c) => {
                if matches!(**c, OmegaExpression::Product(..)) {
                    write!(f, "({c})^w")
                } else {
                    write!(f, "{c}^w")
                }
            }
        }
    }
}
