use std::f64::consts::PI;

use proptest::prelude::*;
use speclab::constants::*;

#[test]
fn c_upper_below_one_and_increasing_in_k() {
    for &d in &[2usize, 3, 4, 6, 10] {
        let mut prev = 0.0;
        for k in 1..=200 {
            let c = c_upper(k, d).unwrap();
            assert!(c < 1.0 && c > prev, "k={k} d={d}");
            prev = c;
        }
    }
    for &d in &[2usize, 3] {
        assert!(c_upper(1000, d).unwrap() > 0.99);
    }
}

#[test]
fn c_upper_decays_like_inverse_square_dimension() {
    for k in 1..=3 {
        let envelope = c_upper_d2_envelope(k);
        for d in 2..=MAX_DIMENSION {
            let scaled = c_upper(k, d).unwrap() * (d * d) as f64;
            assert!(scaled <= envelope, "k={k} d={d}: {scaled} > {envelope}");
        }
    }
}

#[test]
fn c_upper_monotone_in_dimension() {
    for k in 1..=20 {
        for d in 2..60 {
            assert!(c_upper(k, d + 1).unwrap() <= c_upper(k, d).unwrap(), "k={k} d={d}");
        }
    }
}

#[test]
fn sandwich_and_scaled_sharp_constant() {
    let mut prev = 0.0;
    for d in 2..=MAX_DIMENSION {
        let sharp = alpha1_sharp(d).unwrap();
        assert!(funano_lower(d).unwrap() <= alpha1_simple(d).unwrap());
        assert!(alpha1_simple(d).unwrap() <= sharp);
        assert!((sharp - c_upper(1, d).unwrap()).abs() <= 1e-15);
        let scaled = sharp * (d * d) as f64;
        assert!(scaled > prev && scaled <= PI * PI, "d={d}");
        prev = scaled;
    }
}

#[test]
fn asymptotic_envelope_for_sharp_constant() {
    for d in 20..=MAX_DIMENSION {
        let df = d as f64;
        let a = alpha1_sharp(d).unwrap();
        assert!((a - PI * PI / (df * df)).abs() <= 5e3 / (df * df * df), "d={d}");
    }
}

#[test]
fn table_ranges_rejected() {
    assert!(emit_constant_table(1, 121).is_err());
    assert!(alpha1_sharp(121).is_err());
    assert!(kroger_upper(1, 2, -1.0).is_err());
}

proptest! {
    #[test]
    fn kroger_scales_with_diameter(k in 1usize..50, d in 2usize..40, diam in 0.1f64..10.0) {
        let a = kroger_upper(k, d, 1.0).unwrap();
        let b = kroger_upper(k, d, diam).unwrap();
        prop_assert!((b * diam * diam - a).abs() <= 1e-12 * a);
        prop_assert!(kroger_upper(k, d, diam).unwrap() >= payne_weinberger_lower(diam).unwrap());
    }

    #[test]
    fn nonsharp_bounds_do_not_exceed_upper(k in 1usize..1000, d in 3usize..120) {
        prop_assert!(alpha_lower_nonsharp(k, 2).unwrap() <= c_upper(k, 2).unwrap());
        prop_assert!(alpha_lower_nonsharp(2, d).unwrap() <= c_upper(2, d).unwrap());
    }
}
