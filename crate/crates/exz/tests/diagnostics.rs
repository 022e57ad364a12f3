//! Measure-comparison metrics, region restriction semantics, and the
//! orchestrated per-degree study report.

use exz::diagnostics::{
    compare_measures, interior_growth_probe, sequence_study, CompareGrid, GrowthGrid,
    RegionFilter, StudyConfig,
};
use exz::error::Error;
use exz::geometry::{Angle, Domain, Pt};
use exz::num::PrecisionContext;
use exz::orthopoly::bergman_arnoldi;
use exz::potential::MeasureCloud;
use rug::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn circle_cloud(radius: f64, m: usize) -> MeasureCloud {
    let atoms: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
            (radius * t.cos(), radius * t.sin())
        })
        .collect();
    MeasureCloud::uniform(atoms).unwrap()
}

#[test]
fn identical_clouds_compare_to_zero() {
    let cloud = circle_cloud(1.0, 128);
    let grid = CompareGrid::free((0.0, 0.0), 1.0);
    let rep = compare_measures(&cloud, &cloud, None, &grid).unwrap();
    for d in &rep.moment_distances {
        assert_eq!(*d, 0.0);
    }
    assert_eq!(rep.histogram_tv, 0.0);
    assert_eq!(rep.potential_sup_distance, 0.0);
    assert!(rep.moment_distances.len() >= 13);
}

#[test]
fn comparison_metrics_are_symmetric() {
    let a = circle_cloud(1.0, 96);
    let b = circle_cloud(0.7, 64);
    let grid = CompareGrid::free((0.0, 0.0), 1.0);
    let ab = compare_measures(&a, &b, None, &grid).unwrap();
    let ba = compare_measures(&b, &a, None, &grid).unwrap();
    assert!((ab.histogram_tv - ba.histogram_tv).abs() < 1e-15);
    assert!((ab.potential_sup_distance - ba.potential_sup_distance).abs() < 1e-15);
    for (x, y) in ab.moment_distances.iter().zip(ba.moment_distances.iter()) {
        assert!((x - y).abs() < 1e-15);
    }
}

/// A point mass at the center and the uniform circle share every complex
/// moment and the exterior potential, yet the angle histogram separates
/// them: all mass in one bin vs 1/36 per bin gives TV = 35/36.
#[test]
fn center_mass_vs_circle_shows_why_histograms_are_needed() {
    let delta = MeasureCloud::uniform(vec![(0.0, 0.0)]).unwrap();
    let circle = circle_cloud(1.0, 360);
    let grid = CompareGrid::free((0.0, 0.0), 1.0);
    let rep = compare_measures(&delta, &circle, None, &grid).unwrap();
    // moments k >= 1 vanish for both measures
    for (k, d) in rep.moment_distances.iter().enumerate().skip(1) {
        assert!(*d < 1e-12, "moment {k} distance {d}");
    }
    // exterior potentials agree (both look like a unit point charge)
    assert!(rep.potential_sup_distance < 1e-3);
    // but the histogram tells them apart at the maximum possible distance
    assert!((rep.histogram_tv - 35.0 / 36.0).abs() < 1e-12);
}

#[test]
fn hull_escape_counts_mass_outside_the_domain_hull() {
    let dom = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let grid = CompareGrid::for_domain(&dom);
    let inside = MeasureCloud::uniform(vec![(0.0, 0.0), (0.5, 0.0)]).unwrap();
    let half_out = MeasureCloud::uniform(vec![(0.0, 0.0), (3.0, 0.0)]).unwrap();
    let reference = circle_cloud(1.0, 64);
    let rep_in = compare_measures(&inside, &reference, None, &grid).unwrap();
    assert_eq!(rep_in.hull_escape_fraction, 0.0);
    let rep_out = compare_measures(&half_out, &reference, None, &grid).unwrap();
    assert!((rep_out.hull_escape_fraction - 0.5).abs() < 1e-15);
}

#[test]
fn region_filter_restricts_and_renormalizes() {
    let union = Domain::union(vec![
        Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap(),
        Domain::disk(Pt::new(10, 0), r(1, 1)).unwrap(),
    ])
    .unwrap();
    // margin must stay below half the inter-part gap
    assert!(RegionFilter::new(union.clone(), 0, 5.0).is_err());
    let filter = RegionFilter::new(union.clone(), 0, 0.5).unwrap();

    // 3 atoms near part 0, 1 atom near part 1
    let nu = MeasureCloud::uniform(vec![(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (10.0, 0.0)]).unwrap();
    let mu = MeasureCloud::uniform(vec![(0.9, 0.0), (-0.9, 0.0), (9.1, 0.0), (10.9, 0.0)]).unwrap();
    let grid = CompareGrid::for_domain(&union);
    let rep = compare_measures(&nu, &mu, Some(&filter), &grid).unwrap();
    let nu_mass = rep.restricted_nu_mass.unwrap();
    let mu_mass = rep.restricted_mu_mass.unwrap();
    assert!((nu_mass - 0.75).abs() < 1e-15);
    assert!((mu_mass - 0.5).abs() < 1e-15);

    // a filter that captures nothing errors out
    let empty_nu = MeasureCloud::uniform(vec![(10.0, 0.0)]).unwrap();
    assert!(matches!(
        compare_measures(&empty_nu, &mu, Some(&filter), &grid),
        Err(Error::EmptyRestriction)
    ));
}

#[test]
fn restriction_mass_bookkeeping_is_exact() {
    let union = Domain::union(vec![
        Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap(),
        Domain::disk(Pt::new(10, 0), r(1, 1)).unwrap(),
    ])
    .unwrap();
    let f0 = RegionFilter::new(union.clone(), 0, 0.5).unwrap();
    let f1 = RegionFilter::new(union.clone(), 1, 0.5).unwrap();
    let nu = MeasureCloud::uniform(vec![(0.0, 0.0), (0.3, 0.0), (10.0, 0.0), (9.5, 0.0), (0.1, 0.2)])
        .unwrap();
    // surrogate with mass near both parts so each restriction is nonempty
    let mu = MeasureCloud::uniform(vec![(0.9, 0.0), (-0.9, 0.0), (9.2, 0.0), (10.8, 0.0)]).unwrap();
    let grid = CompareGrid::for_domain(&union);
    let m0 = compare_measures(&nu, &mu, Some(&f0), &grid)
        .unwrap()
        .restricted_nu_mass
        .unwrap();
    let m1 = compare_measures(&nu, &mu, Some(&f1), &grid)
        .unwrap()
        .restricted_nu_mass
        .unwrap();
    assert_eq!(m0 + m1, 1.0);
}

#[test]
fn growth_probe_approaches_capacity_from_below_on_the_disk() {
    let n_max = 20;
    let ctx = PrecisionContext::for_degree(256, n_max).unwrap();
    let dom = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let seq = bergman_arnoldi(&dom, n_max, &ctx).unwrap();
    let filter = RegionFilter::new(dom, 0, 0.1).unwrap();
    let rep = interior_growth_probe(&seq, &filter, &GrowthGrid::default()).unwrap();
    // |B_n(z)|^(1/n) = ((n+1)/pi)^(1/2n) |z| -> |z| < 1 = cap on a disk
    // grid; the running estimate must stay below capacity + margin and
    // approach it within 10% by the last step
    assert!((rep.capacity_estimate - 1.0).abs() < 0.03);
    let last = *rep.running_max.last().unwrap();
    assert!(last <= 1.1 * rep.capacity_estimate, "limsup estimate {last}");
    assert!(last >= 0.85 * rep.capacity_estimate, "limsup estimate {last}");
    // the running maximum is nondecreasing by construction
    for w in rep.running_max.windows(2) {
        assert!(w[1] >= w[0]);
    }
    assert!(rep.grid_points > 0);
    assert_eq!(rep.per_n.len(), n_max);
}

#[test]
fn study_on_the_disk_reports_flat_tv_and_balayage_pass() {
    // the disk study: every zero sits at the center, so tv stays at its
    // maximum while the balayage check must still pass (the swept measure
    // matches the circle surrogate regardless)
    let dom = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let ctx = PrecisionContext::for_degree(192, 8).unwrap();
    let cfg = StudyConfig {
        leja_count: 128,
        leja_mesh: 4096,
        balayage_samples_total: 4000,
        ..StudyConfig::default()
    };
    let rep = sequence_study(&dom, &[4, 8], &ctx, &cfg).unwrap();
    assert_eq!(rep.per_n.len(), 2);
    for p in &rep.per_n {
        assert!((p.tv - 35.0 / 36.0).abs() < 0.01, "tv = {}", p.tv);
        assert_eq!(p.hull_escape, 0.0);
        assert_eq!(p.moments.len(), 13);
        assert!(p.moments[0] < 1e-12);
    }
    let bal = &rep.balayage_check;
    assert!(bal.pass, "balayage sup {} vs bound {}", bal.sup_distance, bal.bound);
    assert_eq!(bal.n, 8);
    // no reentrant corner, so the verdict reports that no full-sequence
    // convergence was predicted in the first place
    assert_eq!(rep.verdict, "no-full-sequence-prediction");
}

#[test]
fn study_rejects_unsorted_degree_lists() {
    let dom = Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap();
    let ctx = PrecisionContext::for_degree(192, 8).unwrap();
    let cfg = StudyConfig::default();
    assert!(sequence_study(&dom, &[8, 4], &ctx, &cfg).is_err());
    assert!(sequence_study(&dom, &[], &ctx, &cfg).is_err());
}

#[test]
fn reentrant_sector_study_trends_down() {
    // small-degree rehearsal of the reentrant study: tv must decrease
    // from n = 6 to n = 12 even this early
    let dom = Domain::sector(
        Pt::new(0, 0),
        r(1, 1),
        Angle::from_pi(r(-3, 4)),
        Angle::from_pi(r(3, 4)),
    )
    .unwrap();
    let ctx = PrecisionContext::for_degree(256, 12).unwrap();
    let cfg = StudyConfig {
        leja_count: 128,
        leja_mesh: 4096,
        balayage_samples_total: 4000,
        ..StudyConfig::default()
    };
    let rep = sequence_study(&dom, &[6, 12], &ctx, &cfg).unwrap();
    assert!(rep.per_n[1].tv < rep.per_n[0].tv);
    assert!(rep.balayage_check.pass);
}
