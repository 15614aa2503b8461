use std::f64::consts::PI;

use elliptic_cfrac::derivation::difference_series;
use elliptic_cfrac::numeric::{
    asymptotic_law_violations, error_sweep, h_of, invert_from_measurements, lambda_of,
    perimeter_agm, perimeter_series, ramanujan_lambda_sq, sweep_tsv, uniform_grid, BracketSide,
    Ellipse, NumericError, PrecisionConfig, SWEEP_TSV_HEADER,
};
use proptest::prelude::*;

/// Trapezoid rule for `∫_0^{2π} sqrt(a² sin²θ + b² cos²θ) dθ`. The integrand
/// is smooth and periodic, so the rule converges geometrically for `b > 0`.
fn perimeter_quadrature(a: f64, b: f64, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            let (s, c) = (i as f64 * step).sin_cos();
            (a * a * s * s + b * b * c * c).sqrt()
        })
        .sum();
    sum * step
}

fn unit_ellipse(lambda: f64) -> Ellipse {
    Ellipse::new(1.0, (1.0 - lambda) / (1.0 + lambda)).unwrap()
}

#[test]
fn engines_match_quadrature() {
    for &(a, b) in &[(1.0, 1.0), (2.0, 1.0), (1.0, 0.5), (3.0, 0.2), (1.0, 0.05)] {
        let e = Ellipse::new(a, b).unwrap();
        let oracle = perimeter_quadrature(a, b, 4000);
        let agm = perimeter_agm(&e, &PrecisionConfig::default()).unwrap();
        let ser = perimeter_series(&e, &PrecisionConfig::for_series()).unwrap();
        assert!(
            (agm - oracle).abs() <= 1e-12 * oracle,
            "agm {a} {b}: {agm} vs {oracle}"
        );
        assert!(
            (ser - oracle).abs() <= 1e-12 * oracle,
            "series {a} {b}: {ser} vs {oracle}"
        );
    }
}

#[test]
fn two_to_one_ellipse_perimeter() {
    let e = Ellipse::new(2.0, 1.0).unwrap();
    let agm = perimeter_agm(&e, &PrecisionConfig::default()).unwrap();
    assert!((agm - 9.688_448_220_547_675).abs() < 1e-13);
    let h = h_of(&e, &PrecisionConfig::default()).unwrap();
    assert!((h - (agm / (3.0 * PI) - 1.0)).abs() < 1e-15);
}

#[test]
fn engines_agree_across_shape_range() {
    let cfg = PrecisionConfig::default();
    let cfg_s = PrecisionConfig::for_series();
    for lambda in uniform_grid(0.0, 0.9, 90) {
        let e = unit_ellipse(lambda);
        let agm = perimeter_agm(&e, &cfg).unwrap();
        let ser = perimeter_series(&e, &cfg_s).unwrap();
        assert!(
            (agm - ser).abs() <= 10.0 * cfg.abs_tol,
            "lambda {lambda}: {agm} vs {ser}"
        );
    }
}

#[test]
fn excess_matches_both_perimeter_routes() {
    // Away from lambda = 0 the cancellation in L/(π(a+b)) - 1 is harmless.
    let cfg = PrecisionConfig::default();
    for lambda in [0.3, 0.5, 0.7, 0.9, 0.99] {
        let e = unit_ellipse(lambda);
        let p = perimeter_agm(&e, &cfg).unwrap();
        let direct = p / (PI * (e.a() + e.b())) - 1.0;
        let h = h_of(&e, &cfg).unwrap();
        assert!(
            (h - direct).abs() <= 1e-14,
            "lambda {lambda}: {h} vs {direct}"
        );
    }
    let flat = Ellipse::new(1.0, 0.0).unwrap();
    assert!((h_of(&flat, &cfg).unwrap() - (4.0 / PI - 1.0)).abs() < 1e-16);
}

#[test]
fn sweep_matches_exact_difference_series() {
    let d = difference_series(20).unwrap();
    let grid = uniform_grid(0.01, 0.2, 38);
    let rows = error_sweep(&grid, &PrecisionConfig::default()).unwrap();
    for r in rows.iter().filter(|r| r.is_resolved()) {
        let series: f64 = (6..=20)
            .map(|k| 32.0 * d.coeff(k).unwrap().to_f64() * r.h.powi(k as i32 - 6))
            .sum();
        assert!(
            (r.normalized - series).abs() <= 1e-3 * series.abs(),
            "lambda {}: sweep {} vs series {}",
            r.lambda,
            r.normalized,
            series
        );
    }
    assert!(rows.iter().all(|r| r.is_resolved()));
}

#[test]
fn large_lambda_row_agrees_with_plain_float_route() {
    let row = error_sweep(&[0.9], &PrecisionConfig::default()).unwrap()[0];
    let e = unit_ellipse(0.9);
    let p = perimeter_series(&e, &PrecisionConfig::for_series()).unwrap();
    let h = p / (PI * (e.a() + e.b())) - 1.0;
    let diff = 0.81 - ramanujan_lambda_sq(h).unwrap();
    let normalized = 32.0 * diff / h.powi(6);
    assert!((row.normalized - normalized).abs() < 1e-4 * normalized.abs());
    assert!((row.normalized + 9.494_997).abs() < 1e-5);
}

#[test]
fn small_lambda_rows_are_flagged_unresolved() {
    let rows = error_sweep(&[0.002, 0.005, 0.01], &PrecisionConfig::default()).unwrap();
    assert!(!rows[0].is_resolved());
    assert!(!rows[1].is_resolved());
    assert!(rows[2].is_resolved());
}

#[test]
fn law_holds_on_default_cli_grid() {
    let rows = error_sweep(&uniform_grid(0.0, 0.2, 20), &PrecisionConfig::default()).unwrap();
    assert!(asymptotic_law_violations(&rows).is_empty());
    assert_eq!(rows[0].normalized, -1.0);
}

#[test]
fn closed_form_overestimates_on_upper_range() {
    let rows = error_sweep(&uniform_grid(0.5, 0.99, 10), &PrecisionConfig::default()).unwrap();
    assert!(rows.iter().all(|r| r.diff < 0.0));
}

#[test]
fn sweep_rejects_out_of_domain_lambda() {
    let cfg = PrecisionConfig::default();
    assert!(matches!(
        error_sweep(&[1.0], &cfg),
        Err(NumericError::Domain { .. })
    ));
    assert!(matches!(
        error_sweep(&[-0.1], &cfg),
        Err(NumericError::Domain { .. })
    ));
}

#[test]
fn sweep_tsv_round_trips_bits() {
    let rows = error_sweep(&uniform_grid(0.0, 0.9, 9), &PrecisionConfig::default()).unwrap();
    let tsv = sweep_tsv(&rows);
    let mut lines = tsv.lines();
    assert_eq!(lines.next(), Some(SWEEP_TSV_HEADER));
    assert!(!tsv.contains('\r'));
    for (line, r) in lines.zip(&rows) {
        let parsed: Vec<f64> = line.split('\t').map(|f| f.parse().unwrap()).collect();
        let expected = [
            r.lambda,
            r.h,
            r.lambda_sq_true,
            r.lambda_sq_approx,
            r.diff,
            r.normalized,
        ];
        assert_eq!(parsed.len(), 6);
        for (p, e) in parsed.iter().zip(expected) {
            assert_eq!(p.to_bits(), e.to_bits());
        }
    }
}

#[test]
fn invert_worked_examples() {
    let circle = invert_from_measurements(2.0 * PI, 2.0).unwrap();
    assert!((circle.ellipse.a() - 1.0).abs() < 1e-15);
    assert!((circle.ellipse.b() - 1.0).abs() < 1e-15);

    let two_one = invert_from_measurements(9.688_448_220_547_676, 3.0).unwrap();
    assert!((two_one.ellipse.a() - 2.0).abs() < 1e-9);
    assert!((two_one.ellipse.b() - 1.0).abs() < 1e-9);
    assert!(!two_one.clamped);

    match invert_from_measurements(100.0, 1.0) {
        Err(NumericError::OutOfRange {
            side: BracketSide::Above,
            ..
        }) => {}
        other => panic!("{other:?}"),
    }
    match invert_from_measurements(3.0, 1.0) {
        Err(NumericError::OutOfRange {
            side: BracketSide::Below,
            ..
        }) => {}
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inversion_round_trip(lambda in 0.0f64..=0.5, scale in 0.01f64..100.0) {
        let e = Ellipse::new(scale, scale * (1.0 - lambda) / (1.0 + lambda)).unwrap();
        let p = perimeter_agm(&e, &PrecisionConfig::default()).unwrap();
        let inv = invert_from_measurements(p, e.a() + e.b()).unwrap();
        prop_assert!((inv.ellipse.a() - e.a()).abs() <= 1e-6 * e.a());
        prop_assert!((inv.ellipse.b() - e.b()).abs() <= 1e-6 * e.b());
        prop_assert!((inv.lambda - lambda_of(&e)).abs() <= 1e-6);
    }

    #[test]
    fn approximation_never_underestimates(lambda in 0.0f64..0.999) {
        let row = error_sweep(&[lambda], &PrecisionConfig::default()).unwrap()[0];
        prop_assert!(row.lambda_sq_approx - row.lambda_sq_true >= -1e-15);
    }

    #[test]
    fn perimeter_is_monotone_in_b(a in 0.1f64..10.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let cfg = PrecisionConfig::default();
        let p_lo = perimeter_agm(&Ellipse::new(a, a * lo).unwrap(), &cfg).unwrap();
        let p_hi = perimeter_agm(&Ellipse::new(a, a * hi).unwrap(), &cfg).unwrap();
        prop_assert!(p_lo <= p_hi + 1e-12 * a);
        prop_assert!(p_lo >= 4.0 * a - 1e-12 && p_hi <= 2.0 * PI * a + 1e-12 * a);
    }
}
