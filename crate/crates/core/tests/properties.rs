use elliptic_cfrac::cfrac::CfracError;
use elliptic_cfrac::rational::q;
use elliptic_cfrac::{cfrac_expand, cfrac_to_series, solve_periodic_tail, PowerSeries, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// `s(0) = 0`, `s'(0) != 0`, known through `x^order`.
fn revertible(order: usize) -> impl Strategy<Value = PowerSeries> {
    (
        nonzero_rational(),
        prop::collection::vec(rational(), order - 1),
    )
        .prop_map(|(c1, rest)| {
            let mut c = vec![Rational::zero(), c1];
            c.extend(rest);
            PowerSeries::new(c)
        })
}

fn unit_constant(order: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec(rational(), order).prop_map(|rest| {
        let mut c = vec![Rational::one()];
        c.extend(rest);
        PowerSeries::new(c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reversion_round_trip(s in revertible(10)) {
        let r = s.revert().unwrap();
        let x = PowerSeries::x(10);
        prop_assert_eq!(PowerSeries::compose(&s, &r).unwrap(), x.clone());
        prop_assert_eq!(PowerSeries::compose(&r, &s).unwrap(), x);
        prop_assert!(r.coeffs().iter().all(Rational::is_normalized));
    }

    #[test]
    fn sqrt_round_trip(s in unit_constant(10)) {
        let r = s.sqrt().unwrap();
        prop_assert_eq!(r.constant_term(), &Rational::one());
        prop_assert_eq!(&r * &r, s);
    }

    #[test]
    fn division_undoes_multiplication(a in unit_constant(8), b in unit_constant(8), scale in nonzero_rational()) {
        let b = b.scale(&scale);
        prop_assert_eq!((&a * &b).div(&b).unwrap(), a);
    }

    #[test]
    fn cfrac_round_trip(s in revertible(10), c2 in nonzero_rational(), depth in 0usize..=8) {
        let mut c = s.into_coeffs();
        c[2] = c2;
        let s = PowerSeries::new(c).truncate(depth + 2);
        match cfrac_expand(&s, depth) {
            Ok(cf) => {
                prop_assert!(cf.is_terminated() || cf.depth() == depth);
                let order = depth + 2;
                prop_assert_eq!(cfrac_to_series(&cf, order).unwrap(), s);
            }
            // A vanishing linear term in some remainder has no C-fraction of this shape.
            Err(CfracError::ZeroPartialNumerator { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn periodic_tail_satisfies_fixed_point(c in rational()) {
        let b = solve_periodic_tail(c);
        prop_assert!(b.residual(12).unwrap().is_zero());
        let s = b.series(12).unwrap();
        prop_assert_eq!(s.constant_term(), &Rational::one());
    }
}
