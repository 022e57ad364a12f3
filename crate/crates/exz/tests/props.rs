//! Property tests: parser round trips, complex arithmetic identities,
//! classification invariants on randomized domains, and surrogate
//! stability.

use exz::geometry::{Angle, Domain, Pt};
use exz::num::{pairwise_sum, splitmix64, Cx};
use exz::potential::{capacity_leja, leja_points};
use proptest::prelude::*;
use rug::Rational;

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (any::<i32>(), 1u32..=100_000).prop_map(|(n, d)| Rational::from((n, d)))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..=1000, 1u32..=1000).prop_map(|(n, d)| Rational::from((n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_strings_round_trip(q in rational_strategy()) {
        let s = exz::io::rational_to_string(&q);
        let back = exz::io::parse_rational_string(&s).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn decimal_rationals_parse_exactly(int in -1000i64..1000, frac in 0u32..10_000) {
        // strings like "-12.0345" denote exact rationals
        let s = format!("{int}.{frac:04}");
        let q = exz::io::parse_rational_string(&s).unwrap();
        let expect = Rational::from(int)
            + Rational::from((frac, 10_000u32)) * if int < 0 { -1 } else { 1 };
        prop_assert_eq!(q, expect);
    }

    #[test]
    fn angle_strings_round_trip(pi_num in -8i64..=8, pi_den in 1u32..=12, off in small_rational()) {
        let a = Angle::new(Rational::from((pi_num, pi_den as i64)), off);
        let s = exz::io::angle_to_string(&a);
        let back = exz::io::parse_angle(&s).unwrap();
        prop_assert!((a.to_f64() - back.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn complex_field_identities(ax in -100.0f64..100.0, ay in -100.0f64..100.0,
                                bx in -100.0f64..100.0, by in -100.0f64..100.0) {
        let bits = 128;
        let a = Cx::from_f64(ax, ay, bits);
        let b = Cx::from_f64(bx, by, bits);
        // commutativity is exact under correct rounding
        prop_assert!(a.add(&b).dist(&b.add(&a)).to_f64() == 0.0);
        prop_assert!(a.mul(&b).dist(&b.mul(&a)).to_f64() == 0.0);
        // conjugation is an involution and multiplies to |a|^2
        prop_assert!(a.conj().conj().dist(&a).to_f64() == 0.0);
        let m = a.mul(&a.conj());
        prop_assert!(m.im.to_f64().abs() < 1e-30);
        prop_assert!((m.re.to_f64() - a.sqnorm().to_f64()).abs() <= 1e-25 * (1.0 + m.re.to_f64()));
        // a - a = 0 and a + (-a) = 0
        prop_assert!(a.sub(&a).abs().to_f64() == 0.0);
        prop_assert!(a.add(&a.neg()).abs().to_f64() == 0.0);
    }

    #[test]
    fn complex_division_inverts_multiplication(ax in -10.0f64..10.0, ay in -10.0f64..10.0,
                                               bx in -10.0f64..10.0, by in -10.0f64..10.0) {
        prop_assume!(bx.abs() > 1e-3 || by.abs() > 1e-3);
        let bits = 192;
        let a = Cx::from_f64(ax, ay, bits);
        let b = Cx::from_f64(bx, by, bits);
        let q = a.mul(&b).div(&b);
        prop_assert!(q.dist(&a).to_f64() < 1e-40 * (1.0 + a.abs().to_f64()));
    }

    #[test]
    fn sqrt_squares_back(ax in -50.0f64..50.0, ay in -50.0f64..50.0) {
        let bits = 192;
        let a = Cx::from_f64(ax, ay, bits);
        let s = a.sqrt();
        let sq = s.mul(&s);
        prop_assert!(sq.dist(&a).to_f64() < 1e-40 * (1.0 + a.abs().to_f64()));
        // principal branch: nonnegative real part
        prop_assert!(s.re.to_f64() >= 0.0);
    }

    #[test]
    fn pairwise_sum_matches_exact_sum(values in prop::collection::vec(-1.0e6f64..1.0e6, 1..300)) {
        let fast = pairwise_sum(&values);
        // reference: exact rational accumulation
        let mut exact = Rational::new();
        for &v in &values {
            exact += Rational::from_f64(v).unwrap();
        }
        let exact = exact.to_f64();
        let scale: f64 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((fast - exact).abs() <= 1e-12 * scale);
    }

    #[test]
    fn splitmix_is_a_bijection_sample(x in any::<u64>(), y in any::<u64>()) {
        // injectivity spot check plus determinism
        prop_assert_eq!(splitmix64(x), splitmix64(x));
        if x != y {
            prop_assert_ne!(splitmix64(x), splitmix64(y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every triangle with positive area is accepted and classified as
    /// three convex corners with interior angles summing to pi.
    #[test]
    fn triangles_classify_as_three_convex_corners(
        ax in -20i64..20, ay in -20i64..20,
        bx in -20i64..20, by in -20i64..20,
        cx in -20i64..20, cy in -20i64..20,
    ) {
        let area2 = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
        prop_assume!(area2 != 0);
        let d = Domain::polygon(vec![Pt::new(ax, ay), Pt::new(bx, by), Pt::new(cx, cy)]).unwrap();
        let corners = d.corner_scan();
        prop_assert_eq!(corners.len(), 3);
        let mut total = 0.0;
        for c in &corners {
            prop_assert!(!c.is_inward());
            prop_assert!(c.interior_angle > 0.0 && c.interior_angle < std::f64::consts::PI);
            total += c.interior_angle;
        }
        prop_assert!((total - std::f64::consts::PI).abs() < 1e-9);
        prop_assert!(!d.theorem_verdict().full_sequence_convergence_predicted);
    }

    /// Axis-aligned rectangles: four right angles, no prediction; JSON
    /// round trip preserves the classification.
    #[test]
    fn rectangles_round_trip_through_json(
        x0 in -50i64..50, y0 in -50i64..50,
        w in 1i64..60, h in 1i64..60,
    ) {
        let d = Domain::polygon(vec![
            Pt::new(x0, y0),
            Pt::new(x0 + w, y0),
            Pt::new(x0 + w, y0 + h),
            Pt::new(x0, y0 + h),
        ]).unwrap();
        let text = exz::io::domain_to_json(&d);
        let back = exz::io::domain_from_json(&text).unwrap();
        prop_assert_eq!(exz::io::domain_to_json(&back), text);
        let corners = back.corner_scan();
        prop_assert_eq!(corners.len(), 4);
        for c in &corners {
            prop_assert!((c.interior_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    /// A rectangle with one notch always produces exactly one inward
    /// corner, and the theorem verdict flips to predicted.
    #[test]
    fn notched_rectangles_have_one_inward_corner(
        w in 4i64..40, h in 4i64..40,
        nx in 1i64..3, ny in 1i64..3,
    ) {
        prop_assume!(nx < w && ny < h);
        let d = Domain::polygon(vec![
            Pt::new(0, 0),
            Pt::new(w, 0),
            Pt::new(w, h),
            Pt::new(nx, h),
            Pt::new(nx, h - ny),
            Pt::new(0, h - ny),
        ]).unwrap();
        let inward: Vec<_> = d.corner_scan().into_iter().filter(|c| c.is_inward()).collect();
        prop_assert_eq!(inward.len(), 1);
        prop_assert!((inward[0].interior_angle - 1.5 * std::f64::consts::PI).abs() < 1e-12);
        prop_assert!(d.theorem_verdict().full_sequence_convergence_predicted);
    }

    /// Sector classification depends only on the opening angle.
    #[test]
    fn sector_prediction_tracks_the_opening(num in 1i64..16) {
        // opening = num * pi / 8, skipping the degenerate full turn
        prop_assume!(num != 16);
        let half = Rational::from((num, 16));
        let d = Domain::sector(
            Pt::new(0, 0),
            Rational::from(1),
            Angle::from_pi(-half.clone()),
            Angle::from_pi(half),
        ).unwrap();
        let predicted = d.theorem_verdict().full_sequence_convergence_predicted;
        prop_assert_eq!(predicted, num > 8, "opening {}pi/8", num);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Leja sequences are prefix-stable in the count and capacity tracks
    /// the radius for random disks.
    #[test]
    fn leja_capacity_tracks_disk_radius(
        cx in -5i64..5, cy in -5i64..5, r_num in 2i64..8,
    ) {
        let disk = Domain::disk(Pt::new(cx, cy), Rational::from((r_num, 2))).unwrap();
        let small = leja_points(&disk, 48, 4096).unwrap();
        let large = leja_points(&disk, 96, 4096).unwrap();
        for (a, b) in small.atoms().iter().zip(large.atoms().iter()) {
            prop_assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }
        let cap = capacity_leja(&large).unwrap();
        let expect = r_num as f64 / 2.0;
        prop_assert!((cap.value - expect).abs() < 0.08 * expect,
            "cap {} vs {}", cap.value, expect);
    }
}
