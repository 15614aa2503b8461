//! C-fractions of the shape
//!
//! ```text
//! L h - H h^2 / (1 - a1 h / (1 - a2 h / (1 - a3 h / ...)))
//! ```
//!
//! with every partial numerator subtracted and every partial denominator 1.
//! A fraction whose numerators are constant from some index on has a tail
//! `B = 1 - c h / B`, which is solved in closed form by
//! `B = (1 + sqrt(1 - 4 c h)) / 2`, the branch with `B(0) = 1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;
use crate::series::{PowerSeries, SeriesError};
use crate::DEFAULT_WORKING_ORDER;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfracError {
    #[error("series is not admissible for C-fraction expansion: {0}")]
    NotAdmissible(&'static str),
    #[error("series of order {available} is too short for depth {depth} (needs order {needed})")]
    InsufficientOrder {
        depth: usize,
        needed: usize,
        available: usize,
    },
    #[error("partial numerator a{index} vanishes while the remainder does not; no C-fraction of this shape exists")]
    ZeroPartialNumerator { index: usize },
    #[error("a depth-{depth} fraction certifies coefficients only through order {certified}, {requested} requested")]
    InsufficientDepth {
        depth: usize,
        certified: usize,
        requested: usize,
    },
    #[error("freeze index {index} outside 1..={depth}")]
    IndexOutOfRange { index: usize, depth: usize },
    #[error("fraction does not have the collapsible shape: {0}")]
    NotInRamanujanShape(&'static str),
    #[error("closed form disagrees with the fraction at order {order}")]
    CollapseMismatch { order: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `leading * h - head * h^2 / (1 - a1 h / (1 - a2 h / ...))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFraction {
    leading: Rational,
    head: Rational,
    partial_coeffs: Vec<Rational>,
    /// 1-based index `k` such that `a_j = a_k` for every `j >= k`.
    periodic_from: Option<usize>,
    /// The expansion ended early: the remainder vanished, so the stored
    /// coefficients describe the source exactly.
    terminated: bool,
}

impl CFraction {
    pub fn new(leading: Rational, head: Rational, partial_coeffs: Vec<Rational>) -> Self {
        CFraction {
            leading,
            head,
            partial_coeffs,
            periodic_from: None,
            terminated: false,
        }
    }

    pub fn leading(&self) -> &Rational {
        &self.leading
    }

    pub fn head(&self) -> &Rational {
        &self.head
    }

    pub fn partial_coeffs(&self) -> &[Rational] {
        &self.partial_coeffs
    }

    pub fn depth(&self) -> usize {
        self.partial_coeffs.len()
    }

    pub fn periodic_from(&self) -> Option<usize> {
        self.periodic_from
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// The repeating tail value of a periodic fraction.
    pub fn period_value(&self) -> Option<&Rational> {
        self.periodic_from.map(|k| &self.partial_coeffs[k - 1])
    }

    /// `a_index` (1-based). Periodic fractions answer for every index;
    /// terminated fractions answer zero past their depth.
    pub fn coeff(&self, index: usize) -> Option<Rational> {
        assert!(index >= 1, "partial numerators are numbered from 1");
        if let Some(c) = self.partial_coeffs.get(index - 1) {
            return Some(c.clone());
        }
        if let Some(v) = self.period_value() {
            return Some(v.clone());
        }
        self.terminated.then(Rational::zero)
    }

    /// Highest order through which [`cfrac_to_series`] is certified, or `None`
    /// when the fraction is exact at every order.
    pub fn certified_order(&self) -> Option<usize> {
        if self.periodic_from.is_some() || self.terminated {
            None
        } else {
            Some(self.depth() + 2)
        }
    }

    /// Multi-line `key: value` form with coefficients as `p/q` strings.
    pub fn to_text(&self) -> String {
        let list: Vec<String> = self
            .partial_coeffs
            .iter()
            .map(Rational::to_string)
            .collect();
        format!(
            "leading: {}\nhead: {}\npartial: {}\nperiodic_from: {}\nterminated: {}\n",
            self.leading,
            self.head,
            list.join(", "),
            self.periodic_from
                .map_or("none".to_string(), |k| k.to_string()),
            self.terminated,
        )
    }
}

impl fmt::Display for CFraction {
    /// `4h - h^2/(1 - (1/2)h/(1 - (3/4)h/(1 - ...)))`, with `...` marking a
    /// periodic tail or a cut-off expansion.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tail = if self.terminated {
            "1".to_string()
        } else {
            "1 - ...".to_string()
        };
        for a in self.partial_coeffs.iter().rev() {
            tail = format!("1 - {}/({tail})", scaled(a, "h"));
        }
        write!(
            f,
            "{} - {}/({})",
            scaled(&self.leading, "h"),
            scaled(&self.head, "h^2"),
            tail
        )
    }
}

/// Expands a series `c1 h + c2 h^2 + ...` into `depth` partial numerators.
///
/// With `D1 = head h^2 / (c1 h - s)` and `head = -c2` (so `D1(0) = 1`), each
/// step reads `a_k` off the linear coefficient of `1 - D_k` and continues with
/// `D_{k+1} = a_k h / (1 - D_k)`. Every step costs one order, so the series
/// must be known through `h^{depth + 2}`.
pub fn cfrac_expand(s: &PowerSeries, depth: usize) -> Result<CFraction, CfracError> {
    let needed = depth + 2;
    if s.order() < needed {
        return Err(CfracError::InsufficientOrder {
            depth,
            needed,
            available: s.order(),
        });
    }
    if !s.constant_term().is_zero() {
        return Err(CfracError::NotAdmissible("nonzero constant term"));
    }
    let c1 = s.coeffs()[1].clone();
    let c2 = s.coeffs()[2].clone();
    if c1.is_zero() {
        return Err(CfracError::NotAdmissible("zero linear term"));
    }
    if c2.is_zero() {
        return Err(CfracError::NotAdmissible("zero quadratic term"));
    }
    let n = s.order();
    let head = -&c2;

    let remainder = &PowerSeries::monomial(c1.clone(), 1, n) - s;
    let mut d = PowerSeries::monomial(head.clone(), 2, n).div(&remainder)?;
    let mut partial = Vec::with_capacity(depth);
    let mut terminated = false;
    for k in 1..=depth {
        let e = &PowerSeries::one(d.order()) - &d;
        if e.is_zero() {
            terminated = true;
            break;
        }
        let a = e.coeffs()[1].clone();
        if a.is_zero() {
            return Err(CfracError::ZeroPartialNumerator { index: k });
        }
        if k < depth {
            d = PowerSeries::monomial(a.clone(), 1, e.order()).div(&e)?;
        }
        partial.push(a);
    }
    Ok(CFraction {
        leading: c1,
        head,
        partial_coeffs: partial,
        periodic_from: None,
        terminated,
    })
}

/// Power series of the fraction through `h^order`, evaluated bottom-up with
/// exact series division.
pub fn cfrac_to_series(cf: &CFraction, order: usize) -> Result<PowerSeries, CfracError> {
    if let Some(certified) = cf.certified_order() {
        if order > certified {
            return Err(CfracError::InsufficientDepth {
                depth: cf.depth(),
                certified,
                requested: order,
            });
        }
    }
    // Only a_1 .. a_{order-2} can influence coefficients through h^order.
    let used = order.saturating_sub(2);
    let coeffs: Vec<Rational> = (1..=used).map_while(|k| cf.coeff(k)).collect();
    let mut d = PowerSeries::one(order);
    for a in coeffs.iter().rev() {
        let step = PowerSeries::monomial(a.clone(), 1, order).div(&d)?;
        d = &PowerSeries::one(order) - &step;
    }
    let quotient = PowerSeries::monomial(cf.head.clone(), 2, order).div(&d)?;
    Ok(&PowerSeries::monomial(cf.leading.clone(), 1, order) - &quotient)
}

/// Replaces `a_from_index, a_{from_index+1}, ...` by `value`, making the
/// fraction periodic from `from_index`.
pub fn freeze_tail(
    cf: &CFraction,
    from_index: usize,
    value: Rational,
) -> Result<CFraction, CfracError> {
    if from_index == 0 || from_index > cf.depth() {
        return Err(CfracError::IndexOutOfRange {
            index: from_index,
            depth: cf.depth(),
        });
    }
    let mut partial = cf.partial_coeffs.clone();
    for a in &mut partial[from_index - 1..] {
        *a = value.clone();
    }
    Ok(CFraction {
        leading: cf.leading.clone(),
        head: cf.head.clone(),
        partial_coeffs: partial,
        periodic_from: Some(from_index),
        terminated: false,
    })
}

/// The solved periodic tail `B = 1 - c h / B` on the branch through `B(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailClosedForm {
    pub numerator_coeff: Rational,
    pub branch_value_at_zero: Rational,
}

impl TailClosedForm {
    /// `(1 + sqrt(1 - 4 c h)) / 2` as a power series.
    pub fn series(&self, order: usize) -> Result<PowerSeries, SeriesError> {
        let slope = -(&self.numerator_coeff * &Rational::integer(4));
        let radicand = PowerSeries::from_polynomial(&[Rational::one(), slope], order);
        let root = radicand.sqrt()?;
        Ok((&PowerSeries::one(order) + &root).scale(&Rational::ratio(1, 2)))
    }

    /// `B^2 - B + c h`, which vanishes identically on the solution.
    pub fn residual(&self, order: usize) -> Result<PowerSeries, SeriesError> {
        let b = self.series(order)?;
        let ch = PowerSeries::monomial(self.numerator_coeff.clone(), 1, order);
        Ok(&(&(&b * &b) - &b) + &ch)
    }

    pub fn eval_f64(&self, h: f64) -> f64 {
        (1.0 + (1.0 - 4.0 * self.numerator_coeff.to_f64() * h).sqrt()) / 2.0
    }
}

impl fmt::Display for TailClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numerator_coeff.is_zero() {
            return f.write_str("1");
        }
        let m = &self.numerator_coeff * &Rational::integer(4);
        write!(f, "(1 + sqrt({}))/2", one_minus(&m))
    }
}

/// Solves `B^2 - B + c h = 0`, keeping the root with `B(0) = 1`.
pub fn solve_periodic_tail(c: Rational) -> TailClosedForm {
    TailClosedForm {
        numerator_coeff: c,
        branch_value_at_zero: Rational::one(),
    }
}

/// `linear h - quotient h^2 / (denom_const + denom_sqrt sqrt(1 - radicand_slope h))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormExpr {
    pub linear: Rational,
    pub quotient: Rational,
    pub denom_const: Rational,
    pub denom_sqrt: Rational,
    pub radicand_slope: Rational,
}

impl ClosedFormExpr {
    pub fn series(&self, order: usize) -> Result<PowerSeries, SeriesError> {
        let radicand =
            PowerSeries::from_polynomial(&[Rational::one(), -&self.radicand_slope], order);
        let den = &PowerSeries::constant(self.denom_const.clone(), order)
            + &radicand.sqrt()?.scale(&self.denom_sqrt);
        let q = PowerSeries::monomial(self.quotient.clone(), 2, order).div(&den)?;
        Ok(&PowerSeries::monomial(self.linear.clone(), 1, order) - &q)
    }

    pub fn eval_f64(&self, h: f64) -> f64 {
        let root = (1.0 - self.radicand_slope.to_f64() * h).sqrt();
        self.linear.to_f64() * h
            - self.quotient.to_f64() * h * h
                / (self.denom_const.to_f64() + self.denom_sqrt.to_f64() * root)
    }
}

impl fmt::Display for ClosedFormExpr {
    /// Canonical form, e.g. `4h - 3h^2/(2 + sqrt(1 - 3h))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = format!("sqrt({})", one_minus(&self.radicand_slope));
        let den_sqrt = scaled(&self.denom_sqrt.abs(), &root);
        let sign = if self.denom_sqrt.is_negative() {
            '-'
        } else {
            '+'
        };
        let den = if self.denom_const.is_zero() {
            if self.denom_sqrt.is_negative() {
                format!("-{den_sqrt}")
            } else {
                den_sqrt
            }
        } else {
            format!("{} {sign} {den_sqrt}", self.denom_const)
        };
        let quotient_sign = if self.quotient.is_negative() {
            '+'
        } else {
            '-'
        };
        write!(
            f,
            "{} {quotient_sign} {}/({den})",
            scaled(&self.linear, "h"),
            scaled(&self.quotient.abs(), "h^2"),
        )
    }
}

/// `c` juxtaposed with `term`, dropping a unit coefficient and bracketing fractions.
fn scaled(c: &Rational, term: &str) -> String {
    if c.is_one() {
        term.to_string()
    } else if *c == -1 {
        format!("-{term}")
    } else if c.is_integer() {
        format!("{c}{term}")
    } else {
        format!("({c}){term}")
    }
}

/// `1 - m h`, written with the sign folded in.
fn one_minus(m: &Rational) -> String {
    if m.is_negative() {
        format!("1 + {}", scaled(&m.abs(), "h"))
    } else {
        format!("1 - {}", scaled(m, "h"))
    }
}

/// Collapses a fraction that is periodic from `a_2` (or `a_1`) into a closed form.
///
/// Substituting `B = (1 + r)/2`, `r = sqrt(1 - 4 c h)`, into
/// `L h - H h^2 / (1 - a1 h / B)` gives `L h - H h^2 (1 + r)/(1 + r - 2 a1 h)`,
/// and using `r^2 = 1 - 4 c h` this equals `L h - H K h^2 / (K - 1 + r)` with
/// `K = 2 c / a1`. The result is checked against the fraction's own series
/// through the default working order.
pub fn collapse_to_closed_form(cf: &CFraction) -> Result<ClosedFormExpr, CfracError> {
    let from = cf.periodic_from.ok_or(CfracError::NotInRamanujanShape(
        "fraction has no periodic tail",
    ))?;
    if from > 2 {
        return Err(CfracError::NotInRamanujanShape(
            "periodic tail starts after a2",
        ));
    }
    let c = cf.period_value().expect("periodic fraction").clone();
    if c.is_zero() {
        return Err(CfracError::NotInRamanujanShape("periodic tail is zero"));
    }
    let a1 = cf.coeff(1).expect("periodic fraction has a1");
    if a1.is_zero() {
        return Err(CfracError::NotInRamanujanShape("a1 is zero"));
    }
    let k = &(&c * &Rational::integer(2)) / &a1;
    let expr = ClosedFormExpr {
        linear: cf.leading.clone(),
        quotient: &cf.head * &k,
        denom_const: &k - &Rational::one(),
        denom_sqrt: Rational::one(),
        radicand_slope: &c * &Rational::integer(4),
    };
    let order = DEFAULT_WORKING_ORDER;
    let from_closed = expr.series(order)?;
    let from_fraction = cfrac_to_series(cf, order)?;
    if let Some(i) = from_closed.first_difference(&from_fraction) {
        return Err(CfracError::CollapseMismatch { order: i });
    }
    Ok(expr)
}

/// Number of leading convergents on which two fractions coincide.
///
/// The first convergent past `leading h` introduces the head numerator `H h^2`,
/// and each later one introduces one more `a_k h`. Agreement stops at the first
/// differing numerator. Two fractions agreeing on every coefficient either of
/// them stores count as agreeing through the longer of the two.
pub fn convergent_agreement_order(a: &CFraction, b: &CFraction) -> usize {
    if a.leading != b.leading || a.head != b.head {
        return 0;
    }
    let limit = a.depth().max(b.depth());
    let mut count = 1;
    for k in 1..=limit {
        match (a.coeff(k), b.coeff(k)) {
            (Some(x), Some(y)) if x == y => count += 1,
            _ => break,
        }
    }
    count
}
