//! Quadrature construction: Gauss-Legendre nodes, per-cell rules, and
//! whole-domain rules checked against closed-form areas and moments.

use exz::geometry::{Angle, Cell, Domain, Pt};
use rug::ops::Pow;
use exz::num::Cx;
use exz::numerics::{domain_rule, gauss_legendre_nodes, oversampled_domain_rule};
use rug::{Float, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

const BITS: u32 = 256;

#[test]
fn gauss_legendre_matches_tabulated_low_orders() {
    // m = 2: nodes +-1/sqrt(3) (so node^2 = 1/3), weights 1
    let (n2, w2) = gauss_legendre_nodes(2, BITS).unwrap();
    let third = Rational::from((1, 3));
    for node in &n2 {
        let sq_err = (Float::with_val(BITS, node.clone().square()) - &third).abs();
        assert!(sq_err.to_f64() < 1e-70, "node^2 != 1/3: {sq_err:e}");
    }
    assert!(n2[0].to_f64() < 0.0 && n2[1].to_f64() > 0.0);
    for w in &w2 {
        let err = Float::with_val(BITS, w - 1u32).abs();
        assert!(err.to_f64() < 1e-70);
    }

    // m = 3: nodes 0, +-sqrt(3/5) (node^2 = 3/5); weights 8/9, 5/9
    let (n3, w3) = gauss_legendre_nodes(3, BITS).unwrap();
    let three_fifths = Rational::from((3, 5));
    for node in [&n3[0], &n3[2]] {
        let sq_err = (Float::with_val(BITS, node.clone().square()) - &three_fifths).abs();
        assert!(sq_err.to_f64() < 1e-70);
    }
    assert!(n3[1].to_f64().abs() < 1e-70);
    let w_err = (Float::with_val(BITS, &w3[0]) - Rational::from((5, 9))).abs();
    assert!(w_err.to_f64() < 1e-70);
    let w_err = (Float::with_val(BITS, &w3[1]) - Rational::from((8, 9))).abs();
    assert!(w_err.to_f64() < 1e-70);
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    // an m-point rule is exact through degree 2m-1
    for m in [4usize, 9, 16] {
        let (nodes, weights) = gauss_legendre_nodes(m, BITS).unwrap();
        for p in 0..(2 * m) {
            let mut acc = Float::with_val(BITS, 0);
            for (x, w) in nodes.iter().zip(weights.iter()) {
                let term = Float::with_val(BITS, x.clone().pow(p as u32)) * w;
                acc += term;
            }
            // integral of x^p over [-1,1]
            let exact = if p % 2 == 1 {
                Float::with_val(BITS, 0)
            } else {
                Float::with_val(BITS, 2) / Float::with_val(BITS, (p + 1) as u32)
            };
            let err = (acc - exact).abs().to_f64();
            assert!(err < 1e-60, "m={m} p={p} err={err:e}");
        }
    }
}

#[test]
fn gauss_legendre_nodes_are_symmetric_and_weights_positive() {
    let (nodes, weights) = gauss_legendre_nodes(13, BITS).unwrap();
    let m = nodes.len();
    for i in 0..m {
        assert!(weights[i].to_f64() > 0.0);
        let mirrored = Float::with_val(BITS, &nodes[i] + &nodes[m - 1 - i]);
        assert!(mirrored.to_f64().abs() < 1e-70);
        let wdiff = Float::with_val(BITS, &weights[i] - &weights[m - 1 - i]);
        assert!(wdiff.to_f64().abs() < 1e-70);
    }
}

fn total_weight_f64(rule: &exz::numerics::QuadratureRule) -> f64 {
    rule.total_weight(BITS).to_f64()
}

#[test]
fn rule_weight_equals_area_for_every_shape() {
    let square = Domain::polygon(vec![
        Pt::new(0, 0),
        Pt::new(3, 0),
        Pt::new(3, 2),
        Pt::new(0, 2),
    ])
    .unwrap();
    let rule = domain_rule(&square, 8, BITS).unwrap();
    assert!((total_weight_f64(&rule) - 6.0).abs() < 1e-40);

    let disk = Domain::disk(Pt::new(1, -1), r(3, 2)).unwrap();
    let rule = domain_rule(&disk, 8, BITS).unwrap();
    let area = 2.25 * std::f64::consts::PI;
    assert!((total_weight_f64(&rule) - area).abs() < 1e-15 * area);

    let sector = Domain::sector(
        Pt::new(0, 0),
        r(2, 1),
        Angle::from_pi(r(-3, 4)),
        Angle::from_pi(r(3, 4)),
    )
    .unwrap();
    let rule = domain_rule(&sector, 8, BITS).unwrap();
    let area = 3.0 * std::f64::consts::PI; // (3/4) * pi * r^2, r = 2
    assert!((total_weight_f64(&rule) - area).abs() < 1e-15 * area);

    let union = Domain::union(vec![
        Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap(),
        Domain::disk(Pt::new(5, 0), r(1, 1)).unwrap(),
    ])
    .unwrap();
    let rule = domain_rule(&union, 8, BITS).unwrap();
    let area = 2.0 * std::f64::consts::PI;
    assert!((total_weight_f64(&rule) - area).abs() < 1e-15 * area);
}

/// Integrate |z|^(2a) z^b over the rule; compare against closed forms for a
/// centered disk: int |z|^(2a) dA = 2*pi*R^(2a+2)/(2a+2), and all moments
/// with b != 0 vanish by rotational symmetry.
#[test]
fn disk_rule_reproduces_radial_moments() {
    let disk = Domain::disk(Pt::new(0, 0), r(2, 1)).unwrap();
    let rule = domain_rule(&disk, 12, BITS).unwrap();
    for a in 0u32..6 {
        let mut acc = Float::with_val(BITS, 0);
        for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let term = Float::with_val(BITS, z.sqnorm().pow(a)) * w;
            acc += term;
        }
        let exact = Float::with_val(BITS, std::f64::consts::PI)
            * Float::with_val(BITS, 2.0f64.powi(2 * a as i32 + 2))
            / Float::with_val(BITS, a + 1);
        let rel = ((acc - &exact) / exact).abs().to_f64();
        assert!(rel < 1e-14, "a={a} rel={rel:e}");
    }

    // odd complex moments vanish
    for b in 1u32..5 {
        let mut re = Float::with_val(BITS, 0);
        let mut im = Float::with_val(BITS, 0);
        for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let mut p = Cx::real(Float::with_val(BITS, 1));
            for _ in 0..b {
                p = p.mul(z);
            }
            re += Float::with_val(BITS, &p.re * w);
            im += Float::with_val(BITS, &p.im * w);
        }
        assert!(re.to_f64().abs() < 1e-12, "b={b}");
        assert!(im.to_f64().abs() < 1e-12, "b={b}");
    }
}

#[test]
fn polygon_rule_integrates_bivariate_monomials_exactly() {
    // triangle (0,0),(1,0),(0,1): int x^p y^q dA = p! q! / (p+q+2)!
    let tri = Cell::Tri {
        a: Pt::new(0, 0),
        b: Pt::new(1, 0),
        c: Pt::new(0, 1),
    };
    let rule = exz::numerics::cell_rule(&tri, 10, BITS).unwrap();
    let factorial = |k: u32| -> f64 { (1..=k).map(|v| v as f64).product::<f64>().max(1.0) };
    for p in 0u32..5 {
        for q in 0u32..5 {
            let mut acc = Float::with_val(BITS, 0);
            for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let term = Float::with_val(BITS, z.re.clone().pow(p) * z.im.clone().pow(q)) * w;
                acc += term;
            }
            let exact = factorial(p) * factorial(q) / factorial(p + q + 2);
            assert!(
                (acc.to_f64() - exact).abs() < 1e-40 + 1e-15 * exact,
                "p={p} q={q}"
            );
        }
    }
}

#[test]
fn sector_rule_matches_polar_closed_form() {
    // quarter disk in the first quadrant, radius 1:
    // int x^2 dA = int_0^{pi/2} cos^2 t dt * int_0^1 r^3 dr = (pi/4)(1/4)
    let sector = Domain::sector(
        Pt::new(0, 0),
        r(1, 1),
        Angle::from_pi(r(0, 1)),
        Angle::from_pi(r(1, 2)),
    )
    .unwrap();
    let rule = domain_rule(&sector, 10, BITS).unwrap();
    let mut acc = Float::with_val(BITS, 0);
    for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let term = Float::with_val(BITS, z.re.clone().square()) * w;
        acc += term;
    }
    let exact = std::f64::consts::PI / 16.0;
    assert!((acc.to_f64() - exact).abs() < 1e-20);
}

#[test]
fn nodes_lie_inside_the_domain() {
    let l_shape = Domain::polygon(vec![
        Pt::new(0, 0),
        Pt::new(2, 0),
        Pt::new(2, 1),
        Pt::new(1, 1),
        Pt::new(1, 2),
        Pt::new(0, 2),
    ])
    .unwrap();
    let rule = domain_rule(&l_shape, 6, BITS).unwrap();
    assert!(!rule.is_empty());
    for z in &rule.nodes {
        let p = (z.re.to_f64(), z.im.to_f64());
        assert!(
            l_shape.distance_to_boundary(p) > -1e-12,
            "node {p:?} outside"
        );
    }
}

#[test]
fn oversampled_rule_agrees_with_base_rule_on_low_moments() {
    let disk = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let base = domain_rule(&disk, 6, BITS).unwrap();
    let over = oversampled_domain_rule(&disk, 6, BITS).unwrap();
    assert!(over.len() > base.len());
    for a in 0u32..4 {
        let acc = |rule: &exz::numerics::QuadratureRule| -> f64 {
            let mut s = Float::with_val(BITS, 0);
            for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                s += Float::with_val(BITS, z.sqnorm().pow(a)) * w;
            }
            s.to_f64()
        };
        assert!((acc(&base) - acc(&over)).abs() < 1e-14);
    }
}

#[test]
fn degree_grows_node_count() {
    let disk = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let lo = domain_rule(&disk, 4, BITS).unwrap();
    let hi = domain_rule(&disk, 32, BITS).unwrap();
    assert!(hi.len() > lo.len());
}

#[test]
fn gauss_legendre_rejects_zero_points() {
    assert!(gauss_legendre_nodes(0, BITS).is_err());
}
