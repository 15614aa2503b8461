//! Published coefficient values, kept as data so that generated series can be
//! checked against them and anything past the published range is reported as
//! derived rather than verified.

use crate::cfrac::CFraction;
use crate::rational::Rational;
use crate::series::PowerSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoldenTable {
    /// `h` as a series in `λ²`.
    HSeries,
    /// `λ²` as a series in `h`, by reversion.
    TrueInverse,
    /// Expansion of the closed-form approximation in `h`.
    Approx,
    /// `TrueInverse - Approx`.
    Difference,
    /// Partial numerators `a1, a2, ...` of the C-fraction of `TrueInverse`.
    CfracTrue,
}

impl GoldenTable {
    pub const ALL: [GoldenTable; 5] = [
        GoldenTable::HSeries,
        GoldenTable::TrueInverse,
        GoldenTable::Approx,
        GoldenTable::Difference,
        GoldenTable::CfracTrue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GoldenTable::HSeries => "h_series",
            GoldenTable::TrueInverse => "true_series",
            GoldenTable::Approx => "approx_series",
            GoldenTable::Difference => "difference",
            GoldenTable::CfracTrue => "cfrac_true",
        }
    }

    /// `(index, value)` pairs. Series tables are indexed by power; the
    /// C-fraction table by the 1-based partial numerator index.
    pub fn entries(self) -> &'static [(usize, &'static str)] {
        match self {
            GoldenTable::HSeries => &[
                (0, "0"),
                (1, "1/4"),
                (2, "1/64"),              // 1/4^3
                (3, "1/256"),             // 1/4^4
                (4, "25/16384"),          // 25/4^7
                (5, "49/65536"),          // 49/4^8
                (6, "441/1048576"),       // 441/4^10
                (7, "1089/4194304"),      // 1089/4^11
                (8, "184041/1073741824"), // 184041/4^15
                (9, "511225/4294967296"), // 511225/4^16
            ],
            GoldenTable::TrueInverse => &[
                (0, "0"),
                (1, "4"),
                (2, "-1"),
                (3, "-1/2"),
                (4, "-5/8"),
                (5, "-17/16"),
                (6, "-273/128"),
                (7, "-609/128"),
                (8, "-23391/2048"),
            ],
            GoldenTable::Approx => &[
                (0, "0"),
                (1, "4"),
                (2, "-1"),
                (3, "-1/2"),
                (4, "-5/8"),
                (5, "-17/16"),
                (6, "-269/128"),
                (7, "-1163/256"),
                (8, "-10657/1024"),
            ],
            GoldenTable::Difference => &[
                (0, "0"),
                (1, "0"),
                (2, "0"),
                (3, "0"),
                (4, "0"),
                (5, "0"),
                (6, "-1/32"),
                (7, "-55/256"),
                (8, "-2077/2048"),
            ],
            GoldenTable::CfracTrue => &[(1, "1/2"), (2, "3/4"), (3, "3/4"), (4, "29/18")],
        }
    }

    pub fn value(self, index: usize) -> Option<Rational> {
        self.entries()
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, v)| v.parse().expect("golden literal"))
    }

    pub fn max_index(self) -> usize {
        self.entries().iter().map(|(i, _)| *i).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenMismatch {
    pub table: GoldenTable,
    pub index: usize,
    pub expected: Rational,
    pub computed: Rational,
}

impl std::fmt::Display for GoldenMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}[{}]: published {}, computed {}",
            self.table.name(),
            self.index,
            self.expected,
            self.computed
        )
    }
}

/// Compares a series with a golden table on every published index the series
/// reaches.
pub fn check_series(table: GoldenTable, s: &PowerSeries) -> Vec<GoldenMismatch> {
    table
        .entries()
        .iter()
        .filter_map(|&(i, _)| {
            let computed = s.coeff(i)?.clone();
            let expected = table.value(i)?;
            (computed != expected).then_some(GoldenMismatch {
                table,
                index: i,
                expected,
                computed,
            })
        })
        .collect()
}

pub fn check_cfrac(cf: &CFraction) -> Vec<GoldenMismatch> {
    let table = GoldenTable::CfracTrue;
    table
        .entries()
        .iter()
        .filter_map(|&(i, _)| {
            let computed = cf.partial_coeffs().get(i - 1)?.clone();
            let expected = table.value(i)?;
            (computed != expected).then_some(GoldenMismatch {
                table,
                index: i,
                expected,
                computed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn literals_parse_and_are_consistent() {
        for t in GoldenTable::ALL {
            for &(i, _) in t.entries() {
                assert!(t.value(i).is_some());
            }
        }
        // The published difference is the difference of the published series.
        for k in 0..=8 {
            let d =
                GoldenTable::TrueInverse.value(k).unwrap() - GoldenTable::Approx.value(k).unwrap();
            assert_eq!(d, GoldenTable::Difference.value(k).unwrap(), "h^{k}");
        }
        assert_eq!(GoldenTable::HSeries.value(8), Some(q(184041, 1 << 30)));
    }

    #[test]
    fn mismatches_are_reported_not_hidden() {
        let s = PowerSeries::from_polynomial(&[q(0, 1), q(4, 1), q(-1, 1), q(-1, 3)], 3);
        let m = check_series(GoldenTable::TrueInverse, &s);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].index, 3);
        assert_eq!(
            m[0].to_string(),
            "true_series[3]: published -1/2, computed -1/3"
        );
    }
}
