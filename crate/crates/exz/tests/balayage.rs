//! Walk-on-spheres harmonic-measure sampling, the boundary sweep built on
//! it, and the potential-split probe around a reentrant corner.

use exz::balayage::{
    balayage_out, disk_exit_exact, proof_probe_s, wos_exit_batch, ProofProbeConfig, WosConfig,
};
use exz::error::Error;
use exz::geometry::{Angle, Domain, Pt};
use exz::num::PrecisionContext;
use exz::potential::{log_potential, MeasureCloud};
use rug::Rational;

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn unit_disk() -> Domain {
    Domain::disk(Pt::new(0, 0), r(1, 1)).unwrap()
}

fn poisson_bin_masses(start: (f64, f64), bins: usize) -> Vec<f64> {
    // integrate the Poisson kernel (1-|a|^2) / (2 pi |e^(i t) - a|^2) over
    // each angular bin with a fine midpoint rule
    let a2 = start.0 * start.0 + start.1 * start.1;
    let sub = 256;
    let tau = 2.0 * std::f64::consts::PI;
    let mut out = vec![0.0; bins];
    for (b, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..sub {
            let t = tau * (b as f64 + (j as f64 + 0.5) / sub as f64) / bins as f64;
            let dx = t.cos() - start.0;
            let dy = t.sin() - start.1;
            acc += (1.0 - a2) / (tau * (dx * dx + dy * dy));
        }
        *slot = acc * tau / (bins * sub) as f64;
    }
    out
}

fn bin_of(p: (f64, f64), center: (f64, f64), bins: usize) -> usize {
    let tau = 2.0 * std::f64::consts::PI;
    let a = (p.1 - center.1).atan2(p.0 - center.0).rem_euclid(tau);
    (((a / tau) * bins as f64) as usize).min(bins - 1)
}

/// Exit histogram from z = 1/2 against the integrated Poisson kernel:
/// every one of 36 bins within 4/sqrt(N) at N = 1e5 samples.
#[test]
fn wos_matches_poisson_kernel_on_the_disk() {
    let n = 100_000;
    let cfg = WosConfig {
        samples_per_atom: 1,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 7,
    };
    let exits = wos_exit_batch(&unit_disk(), (0.5, 0.0), &cfg, n).unwrap();
    assert_eq!(exits.len(), n);
    let bins = 36;
    let mut hist = vec![0.0f64; bins];
    for &p in &exits {
        // every exit lands on the unit circle (within the shell tolerance)
        assert!((p.0.hypot(p.1) - 1.0).abs() < 1e-5);
        hist[bin_of(p, (0.0, 0.0), bins)] += 1.0 / n as f64;
    }
    let expect = poisson_bin_masses((0.5, 0.0), bins);
    let tol = 4.0 / (n as f64).sqrt();
    for b in 0..bins {
        assert!(
            (hist[b] - expect[b]).abs() <= tol,
            "bin {b}: wos {} vs poisson {} (tol {tol})",
            hist[b],
            expect[b]
        );
    }
}

/// The exact Moebius sampler is the oracle: with matched sample counts the
/// two histograms agree bin by bin at the same statistical resolution.
#[test]
fn wos_agrees_with_exact_disk_sampler() {
    let n = 50_000;
    let cfg = WosConfig {
        samples_per_atom: 1,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 11,
    };
    let wos = wos_exit_batch(&unit_disk(), (0.3, -0.2), &cfg, n).unwrap();
    let exact = disk_exit_exact((0.0, 0.0), 1.0, (0.3, -0.2), 99, n);
    let bins = 36;
    let mut hw = vec![0.0f64; bins];
    let mut he = vec![0.0f64; bins];
    for i in 0..n {
        hw[bin_of(wos[i], (0.0, 0.0), bins)] += 1.0 / n as f64;
        he[bin_of(exact[i], (0.0, 0.0), bins)] += 1.0 / n as f64;
    }
    let tol = 2.0 * 4.0 / (n as f64).sqrt();
    for b in 0..bins {
        assert!((hw[b] - he[b]).abs() <= tol, "bin {b}");
    }
}

#[test]
fn wos_is_deterministic_for_a_fixed_seed() {
    let cfg = WosConfig {
        samples_per_atom: 1,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 5,
    };
    let a = wos_exit_batch(&unit_disk(), (0.2, 0.1), &cfg, 500).unwrap();
    let b = wos_exit_batch(&unit_disk(), (0.2, 0.1), &cfg, 500).unwrap();
    assert_eq!(a, b);
    let cfg2 = WosConfig { seed: 6, ..cfg };
    let c = wos_exit_batch(&unit_disk(), (0.2, 0.1), &cfg2, 500).unwrap();
    assert_ne!(a, c);
}

#[test]
fn wos_rejects_exterior_starts_and_bad_configs() {
    let cfg = WosConfig::default();
    assert!(matches!(
        wos_exit_batch(&unit_disk(), (2.0, 0.0), &cfg, 10),
        Err(Error::OutsideDomain { .. })
    ));
    let bad = WosConfig {
        shell_epsilon: 0.0,
        ..WosConfig::default()
    };
    assert!(bad.validate().is_err());
    let bad = WosConfig {
        samples_per_atom: 0,
        ..WosConfig::default()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn balayage_conserves_mass_exactly_and_lands_on_the_boundary() {
    let domain = Domain::disk(Pt::new(0, 0), r(2, 1)).unwrap();
    let atoms = vec![(0.0, 0.0), (0.5, 0.5), (-1.0, 0.3)];
    let weights = vec![r(1, 2), r(1, 3), r(1, 6)];
    let cloud = MeasureCloud::new(atoms, weights).unwrap();
    let cfg = WosConfig {
        samples_per_atom: 64,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 3,
    };
    let swept = balayage_out(&cloud, &domain, &cfg).unwrap();
    // every atom became 64 boundary atoms; mass is conserved as exact
    // rationals, not approximately
    assert_eq!(swept.len(), 3 * 64);
    assert_eq!(swept.total_mass(), Rational::from(1u32));
    for &(x, y) in swept.atoms() {
        assert!((x.hypot(y) - 2.0).abs() < 1e-4);
    }
    // per-atom masses: 1/2 split into 64 pieces of 1/128 each
    assert_eq!(swept.weights()[0], Rational::from((1u32, 128u32)));
}

#[test]
fn balayage_passes_boundary_atoms_through_and_rejects_exterior_ones() {
    let domain = unit_disk();
    let cfg = WosConfig {
        samples_per_atom: 16,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 3,
    };
    // an atom exactly on the boundary is kept as-is
    let boundary_cloud = MeasureCloud::uniform(vec![(1.0, 0.0), (0.0, 0.0)]).unwrap();
    let swept = balayage_out(&boundary_cloud, &domain, &cfg).unwrap();
    assert_eq!(swept.len(), 1 + 16);
    assert!(swept
        .atoms()
        .iter()
        .any(|&(x, y)| (x - 1.0).abs() < 1e-12 && y.abs() < 1e-12));

    let outside = MeasureCloud::uniform(vec![(3.0, 0.0)]).unwrap();
    assert!(matches!(
        balayage_out(&outside, &domain, &cfg),
        Err(Error::AtomOutsideDomain { atom: 0, .. })
    ));
}

/// Sweeping an interior point mass preserves the exterior potential up to
/// the Monte Carlo error: U^(swept) ~ U^(delta) outside the disk.
#[test]
fn balayage_preserves_exterior_potential() {
    let domain = unit_disk();
    let cloud = MeasureCloud::uniform(vec![(0.4, 0.1)]).unwrap();
    let n = 20_000;
    let cfg = WosConfig {
        samples_per_atom: n,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 17,
    };
    let swept = balayage_out(&cloud, &domain, &cfg).unwrap();
    let stat = 3.0 / (n as f64).sqrt();
    for z in [(3.0, 0.0), (0.0, -2.5), (2.0, 2.0)] {
        let u0 = log_potential(&cloud, z).unwrap();
        let u1 = log_potential(&swept, z).unwrap();
        assert!(
            (u0 - u1).abs() < stat,
            "z={z:?}: {u0} vs {u1} (stat {stat})"
        );
    }
}

/// Harmonic measure of the disk seen from an off-center point is the
/// Poisson kernel; the swept cloud must reproduce its angular histogram.
#[test]
fn balayage_histogram_matches_harmonic_measure() {
    let domain = unit_disk();
    let start = (0.5, 0.0);
    let cloud = MeasureCloud::uniform(vec![start]).unwrap();
    let n = 100_000;
    let cfg = WosConfig {
        samples_per_atom: n,
        shell_epsilon: 1e-6,
        max_steps: 10_000,
        seed: 23,
    };
    let swept = balayage_out(&cloud, &domain, &cfg).unwrap();
    let bins = 36;
    let mut hist = vec![0.0f64; bins];
    for (i, &p) in swept.atoms().iter().enumerate() {
        hist[bin_of(p, (0.0, 0.0), bins)] += swept.weight_f64(i);
    }
    let expect = poisson_bin_masses(start, bins);
    let tol = 4.0 / (n as f64).sqrt();
    for b in 0..bins {
        assert!((hist[b] - expect[b]).abs() <= tol, "bin {b}");
    }
}

// ---- potential-split probe ---------------------------------------------

/// Reentrant sector: the angular integral through the complement stays
/// bounded below while the integral through the sector grows unboundedly
/// (factor > 2 per radius decade), and the split vanishes at the corner.
#[test]
fn proof_probe_certifies_both_claims_on_the_reentrant_sector() {
    let dom = Domain::sector(
        Pt::new(0, 0),
        r(1, 1),
        Angle::from_pi(r(-3, 4)),
        Angle::from_pi(r(3, 4)),
    )
    .unwrap();
    let cfg = ProofProbeConfig::for_sector(dom).unwrap();
    let ctx = PrecisionContext::for_degree(256, 32).unwrap();
    let rep = proof_probe_s(&cfg, &ctx).unwrap();

    assert!(rep.claim_a_bounded, "outer integral dipped to {}", rep.claim_a_min);
    assert!(rep.claim_a_min > rep.claim_a_floor);
    assert!(
        rep.claim_b_decade_factor > 2.0,
        "inner growth factor {}",
        rep.claim_b_decade_factor
    );
    assert!(rep.claim_b_monotone && rep.claim_b_diverging);
    assert!(rep.s_corner.abs() < 1e-2, "S at corner = {}", rep.s_corner);
    assert!(rep.calibration_residual < 0.05);
    // traces cover both rays over all radii
    assert_eq!(rep.ray_traces.len(), 2);
    assert_eq!(rep.integrals.len(), cfg.radii.len());
}

#[test]
fn proof_probe_requires_a_sector_domain() {
    let disk = unit_disk();
    assert!(ProofProbeConfig::for_sector(disk).is_err());
}
