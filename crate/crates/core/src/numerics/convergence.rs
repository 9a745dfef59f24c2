//! Sampling realizations of ω-expressions and measuring how fast they converge.

use std::fmt::{self, Write as _};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::automaton::ProbabilisticAutomaton;
use crate::error::{Error, Result};
use crate::numerics::limit::{numeric_interpretation, LimitOptions};
use crate::numerics::schedule::{realize_polynomial, realize_superpolynomial, WordSchedule};
use crate::omega::OmegaExpression;

/// Errors at or below this are indistinguishable from rounding.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Polynomial,
    Superpolynomial,
}

impl Mode {
    pub fn realize(self, e: &OmegaExpression, n: u64) -> WordSchedule {
        match self {
            Mode::Polynomial => realize_polynomial(e, n),
            Mode::Superpolynomial => realize_superpolynomial(e, n),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" | "p" | "poly" => Ok(Mode::Polynomial),
            "superpolynomial" | "sp" | "super" => Ok(Mode::Superpolynomial),
            other => Err(Error::Domain(format!(
                "unknown mode `{other}` (expected polynomial or superpolynomial)"
            ))),
        }
    }
}

/// What the sampled values measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Acceptance probability of `u_n`.
    Probability,
    /// Norm distance from `φ(u_n)` to the limit matrix.
    Distance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub n: u64,
    /// `|u_n|`.
    pub length: BigUint,
    pub value: f64,
}

/// Fit of `log err ≈ α + degree·log|u| − |u|·log(base)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFit {
    Exponential { degree: f64, base: f64 },
    NoExponentialFit,
}

impl RateFit {
    pub fn decay_base(&self) -> Option<f64> {
        match self {
            RateFit::Exponential { base, .. } => Some(*base),
            RateFit::NoExponentialFit => None,
        }
    }
}

impl fmt::Display for RateFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFit::Exponential { degree, base } => write!(
                f,
                "error ~ |u|^{} * {}^(-|u|)",
                format_sig(*degree),
                format_sig(*base)
            ),
            RateFit::NoExponentialFit => f.write_str("no exponential fit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub quantity: Quantity,
    /// Ordered by strictly increasing `n`.
    pub samples: Vec<Sample>,
    pub extrapolated_limit: f64,
    pub rate_fit: RateFit,
}

#[derive(Serialize)]
struct Row<'a> {
    n: u64,
    length: String,
    quantity: Quantity,
    value: f64,
    error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    extrapolated_limit: Option<&'a f64>,
}

impl ConvergenceReport {
    /// Builds a report from samples, extrapolating and fitting the rate.
    pub fn from_samples(quantity: Quantity, samples: Vec<Sample>) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[0].n < w[1].n));
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let extrapolated_limit = match quantity {
            Quantity::Probability => extrapolate(&values).clamp(0.0, 1.0),
            Quantity::Distance => 0.0,
        };
        let points: Vec<(f64, f64)> = samples
            .iter()
            .map(|s| {
                (
                    s.length.to_f64().unwrap_or(f64::INFINITY),
                    (s.value - extrapolated_limit).abs(),
                )
            })
            .collect();
        ConvergenceReport {
            quantity,
            rate_fit: fit_rate(&points),
            samples,
            extrapolated_limit,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn last(&self) -> Option<f64> {
        self.samples.last().map(|s| s.value)
    }

    /// Plain-text table: `n`, `|u_n|`, value, error to the extrapolated limit.
    pub fn render_table(&self) -> String {
        let value_header = match self.quantity {
            Quantity::Probability => "probability",
            Quantity::Distance => "distance",
        };
        let rows: Vec<[String; 4]> = self
            .samples
            .iter()
            .map(|s| {
                [
                    s.n.to_string(),
                    s.length.to_string(),
                    format_sig(s.value),
                    format_sig((s.value - self.extrapolated_limit).abs()),
                ]
            })
            .collect();
        let headers = ["n", "|u_n|", value_header, "error"];
        let widths: Vec<usize> = (0..4)
            .map(|c| {
                rows.iter()
                    .map(|r| r[c].len())
                    .chain([headers[c].len()])
                    .max()
                    .unwrap()
            })
            .collect();
        let mut out = String::new();
        let line = |cells: [&str; 4], out: &mut String| {
            let _ = writeln!(
                out,
                "{:>w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
                cells[0],
                cells[1],
                cells[2],
                cells[3],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3]
            );
        };
        line(headers, &mut out);
        for r in &rows {
            line([&r[0], &r[1], &r[2], &r[3]], &mut out);
        }
        let _ = writeln!(
            out,
            "extrapolated limit: {}",
            format_sig(self.extrapolated_limit)
        );
        let _ = writeln!(out, "rate fit: {}", self.rate_fit);
        out
    }

    /// One JSON object per sample.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.samples.iter().enumerate() {
            let row = Row {
                n: s.n,
                length: s.length.to_string(),
                quantity: self.quantity,
                value: s.value,
                error: (s.value - self.extrapolated_limit).abs(),
                extrapolated_limit: (i + 1 == self.samples.len())
                    .then_some(&self.extrapolated_limit),
            };
            out.push_str(&serde_json::to_string(&row).expect("row serializes"));
            out.push('\n');
        }
        out
    }
}

/// Samples `Pr_A(u_n)` for `n = 1..=n_max`, where `u_n` realizes `e` in `mode`.
pub fn estimate_limit(
    a: &ProbabilisticAutomaton,
    e: &OmegaExpression,
    mode: Mode,
    n_max: u64,
) -> Result<ConvergenceReport> {
    if n_max < 3 {
        return Err(Error::Domain(format!(
            "n_max must be at least 3, got {n_max}"
        )));
    }
    e.boolean_interpretation(&a.boolean_generators())?;
    let samples = (1..=n_max)
        .map(|n| {
            let u = mode.realize(e, n);
            Ok(Sample {
                n,
                length: u.len(),
                value: a.accepted_power_probability(&u)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_samples(
        Quantity::Probability,
        samples,
    ))
}

/// Samples `‖φ(u_n) − φ̂(E)‖` over the polynomial realization of `e`, the
/// quantity bounded by the fast-sequence envelope.
pub fn fast_sequence_report(
    a: &ProbabilisticAutomaton,
    e: &OmegaExpression,
    n_max: u64,
    opts: LimitOptions,
) -> Result<ConvergenceReport> {
    let limit = numeric_interpretation(e, a, opts)?;
    let samples = (1..=n_max)
        .map(|n| {
            let u = realize_polynomial(e, n);
            Ok(Sample {
                n,
                length: u.len(),
                value: a.schedule_matrix(&u)?.distance(&limit)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_samples(Quantity::Distance, samples))
}

/// Last value, corrected by a geometric tail when the final three values move
/// monotonically with shrinking steps.
pub fn extrapolate(values: &[f64]) -> f64 {
    match values {
        [] => f64::NAN,
        [.., a, b, c] => {
            let (d1, d2) = (b - a, c - b);
            if d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum() && d2.abs() < d1.abs() {
                let r = d2 / d1;
                c + d2 * r / (1.0 - r)
            } else {
                *c
            }
        }
        [.., last] => *last,
    }
}

/// Least-squares fit of `log err` against `|u|` over the points above the noise
/// floor, one point per distinct length. Uses the full model with a polynomial
/// factor when at least four points are available and it yields a decay; falls
/// back to a pure exponential otherwise.
pub fn fit_rate(points: &[(f64, f64)]) -> RateFit {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(len, err)| len.is_finite() && *len > 0.0 && err.is_finite() && *err > NOISE_FLOOR)
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() >= 4 {
        if let Some(c) = least_squares(&pts, true) {
            let (degree, beta) = (c[1], c[2]);
            if beta > 0.0 {
                return RateFit::Exponential {
                    degree,
                    base: beta.exp(),
                };
            }
        }
    }
    if pts.len() >= 2 {
        if let Some(c) = least_squares(&pts, false) {
            let beta = c[1];
            if beta > 0.0 {
                return RateFit::Exponential {
                    degree: 0.0,
                    base: beta.exp(),
                };
            }
        }
    }
    RateFit::NoExponentialFit
}

fn least_squares(pts: &[(f64, f64)], with_degree: bool) -> Option<Vec<f64>> {
    let cols = if with_degree { 3 } else { 2 };
    let design = DMatrix::from_fn(pts.len(), cols, |i, j| {
        let len = pts[i].0;
        match (j, with_degree) {
            (0, _) => 1.0,
            (1, true) => len.ln(),
            _ => -len,
        }
    });
    let rhs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1.ln()));
    let svd = design.svd(true, true);
    let solution = svd.solve(&rhs, 1e-12).ok()?;
    let out: Vec<f64> = solution.iter().copied().collect();
    out.iter().all(|x| x.is_finite()).then_some(out)
}

/// Formats with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..12).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation() {
        assert_eq!(extrapolate(&[0.5]), 0.5);
        // 1 - 2^-n: steps halve, the tail sums exactly to the limit
        let v: Vec<f64> = (1..=5).map(|n| 1.0 - 0.5f64.powi(n)).collect();
        assert!((extrapolate(&v) - 1.0).abs() < 1e-12);
        assert_eq!(extrapolate(&[0.1, 0.5, 0.2]), 0.2);
    }

    #[test]
    fn pure_exponential_is_recovered() {
        let pts: Vec<(f64, f64)> = (1..=8).map(|l| (l as f64, 3.0 * 2f64.powi(-l))).collect();
        match fit_rate(&pts) {
            RateFit::Exponential { degree, base } => {
                assert!(degree.abs() < 1e-6, "{degree}");
                assert!((base - 2.0).abs() < 1e-6, "{base}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polynomial_times_exponential() {
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|l| {
                let l = l as f64;
                (l, l * l * 1.5f64.powf(-l))
            })
            .collect();
        match fit_rate(&pts) {
            RateFit::Exponential { degree, base } => {
                assert!((degree - 2.0).abs() < 1e-6);
                assert!((base - 1.5).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn noise_and_growth_give_no_fit() {
        assert_eq!(
            fit_rate(&[(1.0, 1e-15), (2.0, 1e-16)]),
            RateFit::NoExponentialFit
        );
        assert_eq!(
            fit_rate(&[(1.0, 0.1), (2.0, 0.2)]),
            RateFit::NoExponentialFit
        );
        assert_eq!(fit_rate(&[(1.0, 0.1)]), RateFit::NoExponentialFit);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.5), "0.500000000000");
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.25e-9), "1.25000000000e-9");
        assert_eq!(format_sig(123.0), "123.000000000");
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("polynomial".parse::<Mode>().unwrap(), Mode::Polynomial);
        assert_eq!(
            "superpolynomial".parse::<Mode>().unwrap(),
            Mode::Superpolynomial
        );
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn report_rendering() {
        let samples = (1..=3u64)
            .map(|n| Sample {
                n,
                length: BigUint::from(n),
                value: 1.0 - 0.5f64.powi(n as i32),
            })
            .collect();
        let r = ConvergenceReport::from_samples(Quantity::Probability, samples);
        let table = r.render_table();
        assert!(table.lines().next().unwrap().contains("probability"));
        assert_eq!(table.lines().count(), 6);
        let json = r.to_json_lines();
        assert_eq!(json.lines().count(), 3);
        let last: serde_json::Value = serde_json::from_str(json.lines().last().unwrap()).unwrap();
        assert_eq!(last["length"], "3");
        assert!(last["extrapolated_limit"].is_number());
    }
}
