//! Truncated formal power series over [`Rational`].
//!
//! A series of order `N` knows the coefficients of `x^0 ..= x^N`; everything
//! past `x^N` is unknown, not zero. Binary operations return the smaller order
//! of their inputs, and operations that lose information (division by a series
//! with zero constant term) lower it further.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("a power series needs at least one coefficient")]
    Empty,
    #[error("denominator has zero constant term and the numerator cannot absorb it")]
    ZeroConstantTerm,
    #[error("denominator vanishes through its truncation order")]
    DivisionByZeroSeries,
    #[error("square root needs constant term 1, found {0}")]
    NonUnitConstant(Rational),
    #[error("inner series of a composition must have zero constant term, found {0}")]
    NonzeroInnerConstant(Rational),
    #[error("series to revert has zero linear term")]
    ZeroLinearTerm,
    #[error("series to revert has nonzero constant term {0}")]
    NotCentered(Rational),
}

/// A power series `c_0 + c_1 x + ... + c_N x^N + O(x^{N+1})`.
///
/// `PartialEq` is structural (same order, same coefficients). Use
/// [`PowerSeries::certified_eq`] to compare series of different orders.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    pub fn try_new(coeffs: Vec<Rational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(PowerSeries { coeffs })
    }

    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self::try_new(coeffs).expect("power series needs at least one coefficient")
    }

    /// Pads or cuts `coeffs` to exactly `order + 1` entries; missing entries
    /// are taken to be exact zeros (use for polynomials).
    pub fn from_polynomial(coeffs: &[Rational], order: usize) -> Self {
        let mut c: Vec<Rational> = coeffs.iter().take(order + 1).cloned().collect();
        c.resize(order + 1, Rational::zero());
        PowerSeries { coeffs: c }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        Self::monomial(c, 0, order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// `c x^k`, truncated at `order`.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The indeterminate `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^k`, or `None` past the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&Rational> {
        self.coeffs.get(k)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Index of the first nonzero coefficient, `None` if the series vanishes
    /// through its order.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        PowerSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Compares two series on the prefix both of them know.
    ///
    /// Returns `Some(n)` when they agree through `x^n`, with `n` the smaller
    /// of the two orders, and `None` on the first disagreement.
    pub fn certified_eq(&self, other: &PowerSeries) -> Option<usize> {
        let n = self.order().min(other.order());
        (self.coeffs[..=n] == other.coeffs[..=n]).then_some(n)
    }

    /// Index of the first coefficient where the two series differ, looking
    /// only at the common prefix.
    pub fn first_difference(&self, other: &PowerSeries) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`. The order grows by `k`, since the shifted-in low
    /// coefficients are exact zeros.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        PowerSeries { coeffs }
    }

    /// Divides by `x^k`, which must divide the series exactly. The order drops by `k`.
    fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.coeffs[..k].iter().all(Rational::is_zero));
        PowerSeries {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    pub fn add(&self, other: &PowerSeries) -> Self {
        let n = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=n)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> Self {
        let n = self.order().min(other.order());
        PowerSeries {
            coeffs: (0..=n)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &PowerSeries) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] += &(a * b);
            }
        }
        PowerSeries { coeffs }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self / den`.
    ///
    /// When `den(0) = 0`, a common factor `x^v` is cancelled first, which
    /// lowers the order of the result by `v`.
    pub fn div(&self, den: &PowerSeries) -> Result<Self, SeriesError> {
        let v = den.valuation().ok_or(SeriesError::DivisionByZeroSeries)?;
        if v > 0 {
            let num_ok = match self.valuation() {
                Some(u) => u >= v,
                None => self.order() >= v,
            };
            if !num_ok {
                return Err(SeriesError::ZeroConstantTerm);
            }
            return self.shift_down(v).div(&den.shift_down(v));
        }
        let n = self.order().min(den.order());
        let inv_d0 = den.coeffs[0].recip().expect("nonzero constant term");
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                if !den.coeffs[j].is_zero() {
                    acc -= &(&den.coeffs[j] * &out[k - j]);
                }
            }
            out.push(acc * &inv_d0);
        }
        Ok(PowerSeries { coeffs: out })
    }

    pub fn recip(&self) -> Result<Self, SeriesError> {
        Self::one(self.order()).div(self)
    }

    /// Principal square root of a series with constant term 1.
    ///
    /// Solves `r^2 = s` coefficient by coefficient with `r_0 = 1`:
    /// `2 r_k = s_k - sum_{j=1}^{k-1} r_j r_{k-j}`.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::NonUnitConstant(self.coeffs[0].clone()));
        }
        let half = Rational::ratio(1, 2);
        let mut r: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        r.push(Rational::one());
        for k in 1..=self.order() {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &(&r[j] * &r[k - j]);
            }
            r.push(acc * &half);
        }
        Ok(PowerSeries { coeffs: r })
    }

    /// `outer(inner(x))`; `inner` must have zero constant term.
    pub fn compose(outer: &PowerSeries, inner: &PowerSeries) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstant(inner.coeffs[0].clone()));
        }
        let n = outer.order().min(inner.order());
        let inner = inner.truncate(n);
        // Horner in the inner series.
        let mut acc = Self::constant(outer.coeffs[n].clone(), n);
        for c in outer.coeffs[..n].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse: the series `r` with `r(s(x)) = s(r(x)) = x`.
    ///
    /// Uses Lagrange inversion, `[x^k] r = (1/k) [x^{k-1}] (x / s(x))^k`.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NotCentered(self.coeffs[0].clone()));
        }
        let n = self.order();
        if n == 0 {
            // Nothing is known past the constant term.
            return Ok(Self::zero(0));
        }
        if self.coeffs[1].is_zero() {
            return Err(SeriesError::ZeroLinearTerm);
        }
        // s(x)/x, of order n - 1, then its reciprocal x/s(x).
        let phi = self.shift_down(1).recip()?;
        let mut out = vec![Rational::zero(); n + 1];
        let mut power = Self::one(n - 1);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            power = power.mul(&phi);
            *slot = &power.coeffs[k - 1] / &Rational::integer(k as i64);
        }
        Ok(PowerSeries { coeffs: out })
    }

    /// Partial sum at a floating-point argument.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    /// Human-readable polynomial form in the variable `var`, e.g.
    /// `4h - h^2 - 1/2 h^3 + O(h^4)`.
    pub fn to_poly_string(&self, var: &str) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else if mag.is_integer() {
                out.push_str(&format!("{mag}{mono}"));
            } else {
                out.push_str(&format!("{mag} {mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O({var}^{})", self.order() + 1));
        out
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_poly_string("x"))
    }
}

impl fmt::Debug for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<Rational>::deserialize(deserializer)?;
        PowerSeries::try_new(coeffs).map_err(serde::de::Error::custom)
    }
}

impl<'b> Add<&'b PowerSeries> for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &'b PowerSeries) -> PowerSeries {
        PowerSeries::add(self, rhs)
    }
}

impl<'b> Sub<&'b PowerSeries> for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &'b PowerSeries) -> PowerSeries {
        PowerSeries::sub(self, rhs)
    }
}

impl<'b> Mul<&'b PowerSeries> for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &'b PowerSeries) -> PowerSeries {
        PowerSeries::mul(self, rhs)
    }
}

impl<'b> Mul<&'b Rational> for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &'b Rational) -> PowerSeries {
        self.scale(rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ps(c: &[(i64, i64)]) -> PowerSeries {
        PowerSeries::new(c.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn ring_examples() {
        let a = ps(&[(1, 1), (1, 1), (0, 1)]);
        let b = ps(&[(1, 1), (-1, 1), (0, 1)]);
        assert_eq!(&a * &b, ps(&[(1, 1), (0, 1), (-1, 1)]));

        let x = PowerSeries::x(4);
        assert!((&x + &(-&x)).is_zero());

        // (1 + x/2)^2, multiplied out by hand: 1 + x + x^2/4.
        let c = ps(&[(1, 1), (1, 2), (0, 1), (0, 1)]);
        assert_eq!(c.pow(2), ps(&[(1, 1), (1, 1), (1, 4), (0, 1)]));
        assert_eq!(c.scale(&q(2, 1)), ps(&[(2, 1), (1, 1), (0, 1), (0, 1)]));
    }

    #[test]
    fn order_is_minimum_of_inputs() {
        let a = PowerSeries::one(3);
        let b = PowerSeries::one(7);
        assert_eq!((&a + &b).order(), 3);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!(a.div(&b).unwrap().order(), 3);
    }

    #[test]
    fn geometric_division() {
        let n = 6;
        let one_minus_x = PowerSeries::from_polynomial(&[q(1, 1), q(-1, 1)], n);
        let g = PowerSeries::one(n).div(&one_minus_x).unwrap();
        assert!(g.coeffs().iter().all(|c| c.is_one()));

        // x^2 / (1 + x): alternating signs from x^2 on.
        let x2 = PowerSeries::monomial(q(1, 1), 2, n);
        let one_plus_x = PowerSeries::from_polynomial(&[q(1, 1), q(1, 1)], n);
        let r = x2.div(&one_plus_x).unwrap();
        let expected: Vec<_> = (0..=n)
            .map(|k| match k {
                0 | 1 => q(0, 1),
                k if k % 2 == 0 => q(1, 1),
                _ => q(-1, 1),
            })
            .collect();
        assert_eq!(r.coeffs(), expected.as_slice());
    }

    #[test]
    fn division_with_cancelled_valuation_loses_order() {
        // (x^2 + x^3) / (x + x^2) = x, known only through order n - 1.
        let n = 6;
        let num = PowerSeries::from_polynomial(&[q(0, 1), q(0, 1), q(1, 1), q(1, 1)], n);
        let den = PowerSeries::from_polynomial(&[q(0, 1), q(1, 1), q(1, 1)], n);
        let r = num.div(&den).unwrap();
        assert_eq!(r.order(), n - 1);
        assert_eq!(r, PowerSeries::x(n - 1));
    }

    #[test]
    fn division_errors() {
        let n = 4;
        let x = PowerSeries::x(n);
        assert_eq!(
            PowerSeries::one(n).div(&x),
            Err(SeriesError::ZeroConstantTerm)
        );
        assert_eq!(
            x.div(&PowerSeries::zero(n)),
            Err(SeriesError::DivisionByZeroSeries)
        );
    }

    #[test]
    fn subtrahend_of_closed_form_leading_terms() {
        // 3h^2 / (3 - 3h/2 - 9h^2/8): hand expansion gives h^2 + h^3/2 + ...
        let n = 4;
        let num = PowerSeries::monomial(q(3, 1), 2, n);
        let den = PowerSeries::from_polynomial(&[q(3, 1), q(-3, 2), q(-9, 8)], n);
        let r = num.div(&den).unwrap();
        assert_eq!(r.coeff(2), Some(&q(1, 1)));
        assert_eq!(r.coeff(3), Some(&q(1, 2)));
    }

    /// binom(1/2, k) by the falling-factorial definition.
    fn binom_half(k: usize) -> Rational {
        (0..k)
            .map(|j| (q(1, 2) - q(j as i64, 1)) / q(j as i64 + 1, 1))
            .product()
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(PowerSeries::one(5).sqrt().unwrap(), PowerSeries::one(5));

        let sq = PowerSeries::from_polynomial(&[q(1, 1), q(-2, 1), q(1, 1)], 6);
        assert_eq!(
            sq.sqrt().unwrap(),
            PowerSeries::from_polynomial(&[q(1, 1), q(-1, 1)], 6)
        );

        let n = 10;
        let s = PowerSeries::from_polynomial(&[q(1, 1), q(-3, 1)], n);
        let oracle: Vec<Rational> = (0..=n)
            .map(|k| binom_half(k) * q(-3, 1).pow(k as i32))
            .collect();
        let r = s.sqrt().unwrap();
        assert_eq!(r.coeffs(), oracle.as_slice());
        assert_eq!(&r.coeffs()[..4], &[q(1, 1), q(-3, 2), q(-9, 8), q(-27, 16)]);
    }

    #[test]
    fn sqrt_rejects_non_unit_constant() {
        let s = PowerSeries::constant(q(4, 1), 3);
        assert_eq!(s.sqrt(), Err(SeriesError::NonUnitConstant(q(4, 1))));
    }

    #[test]
    fn compose_examples() {
        let n = 8;
        let outer = PowerSeries::monomial(q(1, 1), 2, n);
        let inner = PowerSeries::from_polynomial(&[q(1, 1), q(1, 1)], n);
        assert_eq!(
            PowerSeries::compose(&outer, &inner),
            Err(SeriesError::NonzeroInnerConstant(q(1, 1)))
        );

        let f = PowerSeries::from_polynomial(&[q(0, 1), q(2, 1), q(-1, 3), q(5, 7)], n);
        assert_eq!(PowerSeries::compose(&PowerSeries::x(n), &f).unwrap(), f);

        let geo = PowerSeries::one(n)
            .div(&PowerSeries::from_polynomial(&[q(1, 1), q(-1, 1)], n))
            .unwrap();
        let x2 = PowerSeries::monomial(q(1, 1), 2, n);
        let c = PowerSeries::compose(&geo, &x2).unwrap();
        for (k, ck) in c.coeffs().iter().enumerate() {
            assert_eq!(ck.is_one(), k % 2 == 0, "k = {k}");
        }
    }

    #[test]
    fn revert_examples() {
        let n = 8;
        assert_eq!(PowerSeries::x(n).revert().unwrap(), PowerSeries::x(n));
        let quarter = PowerSeries::monomial(q(1, 4), 1, n);
        assert_eq!(
            quarter.revert().unwrap(),
            PowerSeries::monomial(q(4, 1), 1, n)
        );
    }

    #[test]
    fn revert_errors() {
        let n = 5;
        let s = PowerSeries::monomial(q(1, 1), 2, n);
        assert_eq!(s.revert(), Err(SeriesError::ZeroLinearTerm));
        let t = PowerSeries::from_polynomial(&[q(1, 1), q(1, 1)], n);
        assert_eq!(t.revert(), Err(SeriesError::NotCentered(q(1, 1))));
    }

    #[test]
    fn certified_comparison_reports_common_order() {
        let a = PowerSeries::from_polynomial(&[q(1, 1), q(2, 1)], 3);
        let b = PowerSeries::from_polynomial(&[q(1, 1), q(2, 1), q(0, 1), q(0, 1), q(9, 1)], 6);
        assert_eq!(a.certified_eq(&b), Some(3));
        assert_ne!(a, b);
        let c = PowerSeries::from_polynomial(&[q(1, 1), q(3, 1)], 6);
        assert_eq!(a.certified_eq(&c), None);
        assert_eq!(a.first_difference(&c), Some(1));
    }

    #[test]
    fn poly_string() {
        let s = PowerSeries::from_polynomial(&[q(0, 1), q(4, 1), q(-1, 1), q(-1, 2)], 3);
        assert_eq!(s.to_poly_string("h"), "4h - h^2 - 1/2 h^3 + O(h^4)");
        assert_eq!(PowerSeries::zero(1).to_string(), "0 + O(x^2)");
    }

    #[test]
    fn serde_list_of_strings() {
        let s = PowerSeries::from_polynomial(&[q(1, 1), q(-3, 2)], 2);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["1","-3/2","0"]"#);
        assert_eq!(serde_json::from_str::<PowerSeries>(&json).unwrap(), s);
        assert!(serde_json::from_str::<PowerSeries>("[]").is_err());
    }
}
