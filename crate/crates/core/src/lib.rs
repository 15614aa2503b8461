//! Exact derivation and numeric validation of the closed-form approximation
//! of the ellipse shape parameter from its perimeter
//!
//! ```text
//! ((a - b)/(a + b))^2 ≈ 4h - 3h^2/(2 + sqrt(1 - 3h)),   L = π (a + b)(1 + h)
//! ```
//!
//! The exact side works over [`Rational`] coefficients: the perimeter series
//! in `λ² = ((a - b)/(a + b))²` is generated, solved for `h`, reverted to give
//! `λ²` as a series in `h`, and compared with the expansion of the closed form.
//! The [`cfrac`] module rebuilds the closed form from the continued fraction of
//! the reverted series by freezing its tail. The [`numeric`] module measures
//! the same error on concrete ellipses.

pub mod cfrac;
pub mod derivation;
pub mod goldens;
pub mod numeric;
pub mod rational;
pub mod series;

pub use cfrac::{
    cfrac_expand, cfrac_to_series, collapse_to_closed_form, convergent_agreement_order,
    freeze_tail, solve_periodic_tail, CFraction, CfracError, ClosedFormExpr, TailClosedForm,
};
pub use derivation::{DerivationError, DerivationReport};
pub use rational::{Rational, RationalError};
pub use series::{PowerSeries, SeriesError};

/// Default truncation order for the exact pipeline: two guard coefficients
/// past `h^8`, plus room for the `h^9` term of the perimeter series.
pub const DEFAULT_WORKING_ORDER: usize = 12;
