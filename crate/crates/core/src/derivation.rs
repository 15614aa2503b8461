//! The exact pipeline from the perimeter series to the approximation error.
//!
//! Series in the perimeter variable use `x = λ²`, so only integer powers
//! appear and reversion never needs a square-root branch.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cfrac::{cfrac_expand, CFraction, CfracError};
use crate::rational::Rational;
use crate::series::{PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("{what} needs order at least {min}, got {got}")]
    OrderTooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Cfrac(#[from] CfracError),
}

fn require(what: &'static str, min: usize, got: usize) -> Result<(), DerivationError> {
    if got < min {
        return Err(DerivationError::OrderTooSmall { what, min, got });
    }
    Ok(())
}

/// `binom(1/2, n)` via `binom(1/2, n) = binom(1/2, n-1) (3 - 2n) / (2n)`.
fn binom_half(n: usize) -> Rational {
    (1..=n as i64)
        .map(|k| Rational::ratio(3 - 2 * k, 2 * k))
        .product()
}

/// `L / (π (a + b))` as a series in `x = λ²`: `sum_n binom(1/2, n)^2 x^n`.
pub fn ivory_series(order: usize) -> PowerSeries {
    PowerSeries::new((0..=order).map(|n| binom_half(n).pow(2)).collect())
}

/// `h = L / (π (a + b)) - 1` as a series in `x = λ²`.
pub fn h_series(order: usize) -> Result<PowerSeries, DerivationError> {
    require("h series", 1, order)?;
    Ok(&ivory_series(order) - &PowerSeries::one(order))
}

/// `λ²` as a series in `h`: the compositional inverse of [`h_series`].
pub fn true_inverse_series(order: usize) -> Result<PowerSeries, DerivationError> {
    require("inverse series", 1, order)?;
    Ok(h_series(order)?.revert()?)
}

/// `sqrt(1 - 3h)` as a series.
pub fn sqrt_one_minus_3h(order: usize) -> Result<PowerSeries, SeriesError> {
    PowerSeries::from_polynomial(&[Rational::one(), Rational::integer(-3)], order).sqrt()
}

/// Expansion of `4h - 3h^2 / (2 + sqrt(1 - 3h))`.
pub fn ramanujan_series(order: usize) -> Result<PowerSeries, DerivationError> {
    require("closed-form expansion", 2, order)?;
    let den = &PowerSeries::constant(Rational::integer(2), order) + &sqrt_one_minus_3h(order)?;
    let quotient = PowerSeries::monomial(Rational::integer(3), 2, order).div(&den)?;
    Ok(&PowerSeries::monomial(Rational::integer(4), 1, order) - &quotient)
}

/// True minus approximate `λ²`, as a series in `h`.
pub fn difference_series(order: usize) -> Result<PowerSeries, DerivationError> {
    require("difference series", 6, order)?;
    Ok(&true_inverse_series(order)? - &ramanujan_series(order)?)
}

/// Every series of the derivation at one working order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationReport {
    pub working_order: usize,
    pub ivory: PowerSeries,
    pub h_series: PowerSeries,
    pub true_series: PowerSeries,
    pub approx_series: PowerSeries,
    pub difference: PowerSeries,
    pub cfrac_true: CFraction,
}

impl DerivationReport {
    /// Builds the report with the deepest C-fraction the order supports.
    pub fn build(order: usize) -> Result<Self, DerivationError> {
        Self::build_with_depth(order, order.saturating_sub(2))
    }

    pub fn build_with_depth(order: usize, cfrac_depth: usize) -> Result<Self, DerivationError> {
        require("full report", 8, order)?;
        let ivory = ivory_series(order);
        let h = h_series(order)?;
        let true_series = h.revert()?;
        let approx_series = ramanujan_series(order)?;
        let difference = &true_series - &approx_series;
        let cfrac_true = cfrac_expand(&true_series, cfrac_depth.min(order - 2))?;
        Ok(DerivationReport {
            working_order: order,
            ivory,
            h_series: h,
            true_series,
            approx_series,
            difference,
            cfrac_true,
        })
    }

    /// `(name, series)` in document order.
    pub fn series(&self) -> [(&'static str, &PowerSeries); 5] {
        [
            ("ivory", &self.ivory),
            ("h_series", &self.h_series),
            ("true_series", &self.true_series),
            ("approx_series", &self.approx_series),
            ("difference", &self.difference),
        ]
    }

    /// `key: p/q, p/q, ...` lines, one per series, then the C-fraction.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "working_order: {}", self.working_order).unwrap();
        for (name, s) in self.series() {
            writeln!(out, "{name}: {}", join(s.coeffs())).unwrap();
        }
        writeln!(out, "cfrac_leading: {}", self.cfrac_true.leading()).unwrap();
        writeln!(out, "cfrac_head: {}", self.cfrac_true.head()).unwrap();
        writeln!(
            out,
            "cfrac_true: {}",
            join(self.cfrac_true.partial_coeffs())
        )
        .unwrap();
        out
    }
}

fn join(values: &[Rational]) -> String {
    values
        .iter()
        .map(Rational::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// `power<TAB>coefficient` table with a header row.
pub fn series_tsv(s: &PowerSeries) -> String {
    let mut out = String::from("power\tcoefficient\n");
    for (k, c) in s.coeffs().iter().enumerate() {
        writeln!(out, "{k}\t{c}").unwrap();
    }
    out
}

/// Shorthand for [`DerivationReport::build`].
pub fn full_report(order: usize) -> Result<DerivationReport, DerivationError> {
    DerivationReport::build(order)
}
