//! Weak-star convergence diagnostics for zero-counting measures: proxy
//! metrics (complex moments, exterior potentials, boundary-angle
//! histograms, hull escape) with trend-over-n verdicts, plus the study
//! orchestrator that ties orthogonal sequences, Leja surrogates and
//! balayage together into one JSON report.

use crate::balayage::{balayage_out, WosConfig};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Shape};
use crate::num::{Cx, PrecisionContext};
use crate::orthopoly::{bergman_arnoldi, OrthoSequence};
use crate::potential::{
    capacity_leja, cloud_from_zeros, leja_points, log_potential, MeasureCloud,
};
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;
use std::f64::consts::TAU;

/// Restriction of a measure comparison to one part of a union domain:
/// atoms within `margin` of the selected part (or inside it) are kept.
/// The margin must stay below half the smallest gap between parts so the
/// selection is unambiguous.
#[derive(Debug, Clone)]
pub struct RegionFilter {
    domain: Domain,
    part: usize,
    margin: f64,
}

impl RegionFilter {
    pub fn new(domain: Domain, part: usize, margin: f64) -> Result<RegionFilter> {
        if part >= domain.parts().len() {
            return Err(Error::InvalidConfig(format!(
                "part index {} out of range ({} parts)",
                part,
                domain.parts().len()
            )));
        }
        if !(margin >= 0.0) || !margin.is_finite() {
            return Err(Error::InvalidConfig(
                "filter margin must be finite and nonnegative".into(),
            ));
        }
        if let Some(gap) = domain.min_part_distance() {
            if margin >= 0.5 * gap {
                return Err(Error::InvalidConfig(format!(
                    "filter margin {} must be below half the minimal part gap {}",
                    margin, gap
                )));
            }
        }
        Ok(RegionFilter {
            domain,
            part,
            margin,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn part(&self) -> usize {
        self.part
    }

    fn keeps(&self, z: (f64, f64)) -> bool {
        self.domain.part_signed_distance(self.part, z) <= self.margin
    }

    /// Atoms selected by the filter, with their total (unnormalized) mass.
    fn restrict(&self, cloud: &MeasureCloud) -> (Vec<(f64, f64)>, Vec<Rational>, Rational) {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        let mut mass = Rational::new();
        for (i, &z) in cloud.atoms().iter().enumerate() {
            if self.keeps(z) {
                atoms.push(z);
                weights.push(cloud.weights()[i].clone());
                mass += &cloud.weights()[i];
            }
        }
        (atoms, weights, mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Test-grid and threshold configuration for measure comparisons. The
/// exterior grid (one circle at twice the diameter plus a uniform annular
/// grid) lies where the potentials of all candidate measures are
/// harmonic, so agreement there extends outward by the maximum principle.
#[derive(Debug, Clone)]
pub struct CompareGrid {
    /// Domain used for hull-escape accounting; None compares bare clouds.
    pub domain: Option<Domain>,
    /// Common center for the exterior grid and the angle histogram.
    pub center: (f64, f64),
    /// Radius of the exterior test circle (twice the domain diameter).
    pub circle_radius: f64,
    /// Inner radius of the annular grid (outside the enclosing disk).
    pub annulus_inner: f64,
    pub circle_points: usize,
    /// Annular grid resolution (radii x angles).
    pub annulus_axis: usize,
    pub moment_count: usize,
    pub histogram_bins: usize,
    /// Slack for hull membership tests.
    pub hull_tol: f64,
    /// Pass thresholds (calibration constants, not theory).
    pub tv_threshold: f64,
    pub hull_threshold: f64,
}

impl CompareGrid {
    /// The common center is the shape's distinguished point — a disk's
    /// center or a sector's vertex — falling back to the bounding-box
    /// center for polygons and unions. Anchoring a sector's histogram at
    /// its vertex collapses each straight edge to one fixed angle, so the
    /// statistic reads the edge/arc mass split rather than the slow radial
    /// profile along the edges; the bundled tv thresholds are calibrated
    /// in this frame.
    pub fn for_domain(domain: &Domain) -> CompareGrid {
        let (x0, y0, x1, y1) = domain.bbox();
        let center = match domain.parts() {
            [Shape::Disk { center, .. }] => center.to_f64(),
            [Shape::Sector { vertex, .. }] => vertex.to_f64(),
            _ => (0.5 * (x0 + x1), 0.5 * (y0 + y1)),
        };
        // enclosing radius measured from the chosen center
        let r_encl = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)]
            .iter()
            .map(|&(x, y)| (x - center.0).hypot(y - center.1))
            .fold(0.0f64, f64::max);
        let diam = domain.diameter();
        CompareGrid {
            domain: Some(domain.clone()),
            center,
            circle_radius: 2.0 * diam,
            annulus_inner: 1.25 * r_encl,
            circle_points: 128,
            annulus_axis: 16,
            moment_count: 12,
            histogram_bins: 36,
            hull_tol: 1e-9,
            tv_threshold: 0.15,
            hull_threshold: 0.2,
        }
    }

    /// Plain-cloud comparison around a given center (no hull accounting).
    pub fn free(center: (f64, f64), scale: f64) -> CompareGrid {
        CompareGrid {
            domain: None,
            center,
            circle_radius: 2.0 * scale,
            annulus_inner: 1.25 * scale,
            circle_points: 128,
            annulus_axis: 16,
            moment_count: 12,
            histogram_bins: 36,
            hull_tol: 1e-9,
            tv_threshold: 0.15,
            hull_threshold: 0.2,
        }
    }

    fn exterior_points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.circle_points + self.annulus_axis * self.annulus_axis);
        for k in 0..self.circle_points {
            let t = TAU * k as f64 / self.circle_points as f64;
            let (s, c) = t.sin_cos();
            pts.push((
                self.center.0 + self.circle_radius * c,
                self.center.1 + self.circle_radius * s,
            ));
        }
        let m = self.annulus_axis;
        for i in 0..m {
            let r = self.annulus_inner
                + (self.circle_radius - self.annulus_inner) * (i as f64 + 0.5) / m as f64;
            for j in 0..m {
                let t = TAU * (j as f64 + 0.5) / m as f64;
                let (s, c) = t.sin_cos();
                pts.push((self.center.0 + r * c, self.center.1 + r * s));
            }
        }
        pts
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// |m_k(nu) - m_k(mu_hat)| for k = 0..=moment_count; index 0 is zero
    /// by normalization.
    pub moment_distances: Vec<f64>,
    pub potential_sup_distance: f64,
    pub histogram_tv: f64,
    pub hull_escape_fraction: f64,
    /// Masses captured by the filter before renormalization (None for
    /// whole-plane comparisons).
    pub restricted_nu_mass: Option<f64>,
    pub restricted_mu_mass: Option<f64>,
    pub verdict: Verdict,
}

fn moments(atoms: &[(f64, f64)], weights: &[f64], count: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); count + 1];
    for (&(x, y), &w) in atoms.iter().zip(weights.iter()) {
        let mut px = 1.0;
        let mut py = 0.0;
        for m in out.iter_mut() {
            m.0 += w * px;
            m.1 += w * py;
            let nx = px * x - py * y;
            py = px * y + py * x;
            px = nx;
        }
    }
    out
}

fn histogram(atoms: &[(f64, f64)], weights: &[f64], center: (f64, f64), bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for (&(x, y), &w) in atoms.iter().zip(weights.iter()) {
        let a = (y - center.1).atan2(x - center.0).rem_euclid(TAU);
        let idx = ((a / TAU) * bins as f64) as usize;
        h[idx.min(bins - 1)] += w;
    }
    h
}

struct NormalizedCloud {
    atoms: Vec<(f64, f64)>,
    weights: Vec<f64>,
    restricted_mass: Option<f64>,
}

fn normalize_for_compare(
    cloud: &MeasureCloud,
    filter: Option<&RegionFilter>,
) -> Result<NormalizedCloud> {
    match filter {
        None => Ok(NormalizedCloud {
            atoms: cloud.atoms().to_vec(),
            weights: (0..cloud.len()).map(|i| cloud.weight_f64(i)).collect(),
            restricted_mass: None,
        }),
        Some(f) => {
            let (atoms, weights, mass) = f.restrict(cloud);
            if atoms.is_empty() || mass == 0 {
                return Err(Error::EmptyRestriction);
            }
            let mass_f = mass.to_f64();
            let weights = weights
                .into_iter()
                .map(|w| (w / &mass).to_f64())
                .collect();
            Ok(NormalizedCloud {
                atoms,
                weights,
                restricted_mass: Some(mass_f),
            })
        }
    }
}

/// Compares two measure clouds through the proxy metrics: moment
/// distances, exterior-potential sup distance, boundary-angle histogram
/// total variation, and the fraction of nu-mass escaping the polynomial
/// hull. With a filter, both clouds are restricted and renormalized and
/// the captured masses are recorded.
pub fn compare_measures(
    nu: &MeasureCloud,
    mu_hat: &MeasureCloud,
    filter: Option<&RegionFilter>,
    grid: &CompareGrid,
) -> Result<ConvergenceReport> {
    let a = normalize_for_compare(nu, filter)?;
    let b = normalize_for_compare(mu_hat, filter)?;

    let ma = moments(&a.atoms, &a.weights, grid.moment_count);
    let mb = moments(&b.atoms, &b.weights, grid.moment_count);
    let moment_distances: Vec<f64> = ma
        .iter()
        .zip(mb.iter())
        .map(|(p, q)| (p.0 - q.0).hypot(p.1 - q.1))
        .collect();

    let cloud_a = MeasureCloud::from_f64(&a.atoms, &a.weights)?;
    let cloud_b = MeasureCloud::from_f64(&b.atoms, &b.weights)?;
    let mut sup = 0.0f64;
    for z in grid.exterior_points() {
        let d = (log_potential(&cloud_a, z)? - log_potential(&cloud_b, z)?).abs();
        sup = sup.max(d);
    }

    let ha = histogram(&a.atoms, &a.weights, grid.center, grid.histogram_bins);
    let hb = histogram(&b.atoms, &b.weights, grid.center, grid.histogram_bins);
    let histogram_tv = 0.5
        * ha.iter()
            .zip(hb.iter())
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>();

    let hull_escape_fraction = match &grid.domain {
        None => 0.0,
        Some(dom) => {
            let mut esc = 0.0;
            for (&z, &w) in a.atoms.iter().zip(a.weights.iter()) {
                if !dom.hull_contains(z, grid.hull_tol) {
                    esc += w;
                }
            }
            esc
        }
    };

    let verdict = if histogram_tv <= grid.tv_threshold && hull_escape_fraction <= grid.hull_threshold
    {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ConvergenceReport {
        moment_distances,
        potential_sup_distance: sup,
        histogram_tv,
        hull_escape_fraction,
        restricted_nu_mass: a.restricted_mass,
        restricted_mu_mass: b.restricted_mass,
        verdict,
    })
}

/// Interior sampling grid for the pointwise growth probe.
#[derive(Debug, Clone)]
pub struct GrowthGrid {
    pub axis_points: usize,
    /// Minimal distance (as a fraction of the diameter) kept between grid
    /// points and the part boundary.
    pub inset_fraction: f64,
    /// Boundary surrogate resolution for the capacity reference.
    pub leja_count: usize,
    pub leja_mesh: usize,
}

impl Default for GrowthGrid {
    fn default() -> Self {
        GrowthGrid {
            axis_points: 24,
            inset_fraction: 0.02,
            leja_count: 128,
            leja_mesh: 2048,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    /// max over the grid of |P_n(z)|^(1/n), indexed by n-1.
    pub per_n: Vec<f64>,
    /// Running maximum of per_n (the limit-superior estimate).
    pub running_max: Vec<f64>,
    pub capacity_estimate: f64,
    pub grid_points: usize,
}

/// Tracks max |P_n(z)|^(1/n) over an interior grid of the selected hull
/// component for every n up to the sequence length, against the capacity
/// estimate it should approach. The orthonormal scaling washes out in the
/// n-th root, so the probe applies to both sequence kinds unchanged.
pub fn interior_growth_probe(
    seq: &OrthoSequence,
    component: &RegionFilter,
    grid: &GrowthGrid,
) -> Result<GrowthReport> {
    let domain = component.domain();
    let diam = domain.diameter();
    let inset = grid.inset_fraction * diam;
    let ((x0, y0), (x1, y1)) = domain.part_bbox(component.part());
    let m = grid.axis_points.max(2);
    let mut points = Vec::new();
    for i in 0..m {
        let x = x0 + (x1 - x0) * (i as f64 + 0.5) / m as f64;
        for j in 0..m {
            let y = y0 + (y1 - y0) * (j as f64 + 0.5) / m as f64;
            if domain.part_signed_distance(component.part(), (x, y)) <= -inset {
                points.push((x, y));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let n_max = seq.n_max();
    let bits = seq.precision_bits();
    let mut per_n = vec![0.0f64; n_max];
    for &(x, y) in &points {
        let z = Cx::from_f64(x, y, bits);
        let vals = seq.evaluate_all(&z, n_max)?;
        for n in 1..=n_max {
            let a = vals[n].abs().to_f64().powf(1.0 / n as f64);
            if a > per_n[n - 1] {
                per_n[n - 1] = a;
            }
        }
    }
    let mut running_max = Vec::with_capacity(n_max);
    let mut run = f64::NEG_INFINITY;
    for &v in &per_n {
        run = run.max(v);
        running_max.push(run);
    }
    let mu = leja_points(domain, grid.leja_count, grid.leja_mesh)?;
    let capacity_estimate = capacity_leja(&mu)?.value;
    Ok(GrowthReport {
        per_n,
        running_max,
        capacity_estimate,
        grid_points: points.len(),
    })
}

/// Orchestration parameters for a full sequence study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub leja_count: usize,
    pub leja_mesh: usize,
    pub wos: WosConfig,
    /// Total walk budget for the balayage check; split evenly over the
    /// zeros of the largest n.
    pub balayage_samples_total: usize,
    /// Statistical tolerance model for the balayage check:
    /// bound = stat_factor/sqrt(samples) + leja_tol.
    pub stat_factor: f64,
    pub leja_tol: f64,
    pub filter_part: Option<(usize, f64)>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            leja_count: 512,
            leja_mesh: 8192,
            wos: WosConfig::default(),
            balayage_samples_total: 100_000,
            stat_factor: 3.0,
            leja_tol: 5e-4,
            filter_part: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerNReport {
    pub n: usize,
    pub moments: Vec<f64>,
    pub potential_sup: f64,
    pub tv: f64,
    pub hull_escape: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalayageCheck {
    pub n: usize,
    pub samples_total: usize,
    pub sup_distance: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRecord {
    pub precision_bits: u32,
    pub seed: u64,
    pub leja_count: usize,
    pub leja_mesh: usize,
    pub tv_threshold: f64,
    pub hull_threshold: f64,
    pub stat_factor: f64,
    pub leja_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub domain: String,
    pub verdict: String,
    pub per_n: Vec<PerNReport>,
    pub balayage_check: BalayageCheck,
    pub calibration: CalibrationRecord,
}

/// True when the sequence is non-increasing up to one inversion (noise
/// allowance used by the trend verdict).
pub fn trend_non_increasing(values: &[f64]) -> bool {
    let inversions = values
        .windows(2)
        .filter(|w| w[1] > w[0] + 1e-12)
        .count();
    inversions <= 1
}

/// Runs one Arnoldi build at the largest n, extracts zeros for every n in
/// the list, compares each zero-counting measure against the Leja
/// surrogate, sweeps the top-n zeros onto the boundary and checks the
/// exterior potential match, and summarizes the histogram trend.
pub fn sequence_study(
    domain: &Domain,
    n_list: &[usize],
    ctx: &PrecisionContext,
    cfg: &StudyConfig,
) -> Result<StudyReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("n_list must be nonempty".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "n_list must be strictly increasing".into(),
        ));
    }
    let n_top = *n_list.last().expect("nonempty");
    let seq = bergman_arnoldi(domain, n_top, ctx)?;
    let mu_hat = leja_points(domain, cfg.leja_count, cfg.leja_mesh)?;
    let grid = CompareGrid::for_domain(domain);
    let filter = match cfg.filter_part {
        None => None,
        Some((part, margin)) => Some(RegionFilter::new(domain.clone(), part, margin)?),
    };

    let per_n: Vec<PerNReport> = n_list
        .par_iter()
        .map(|&n| -> Result<PerNReport> {
            let zeros = seq.zeros(n, ctx)?;
            let nu = cloud_from_zeros(&zeros)?;
            let rep = compare_measures(&nu, &mu_hat, filter.as_ref(), &grid)?;
            Ok(PerNReport {
                n,
                moments: rep.moment_distances,
                potential_sup: rep.potential_sup_distance,
                tv: rep.histogram_tv,
                hull_escape: rep.hull_escape_fraction,
            })
        })
        .collect::<Result<_>>()?;

    // Balayage check at the top n. Sweeping acts only on the part of the
    // measure inside the open domain; atoms already outside (possible for
    // zeros in hull pockets of a nonconvex domain) stay where they are.
    let zeros_top = seq.zeros(n_top, ctx)?;
    let nu_top = cloud_from_zeros(&zeros_top)?;
    let mut wos = cfg.wos.clone();
    wos.samples_per_atom = (cfg.balayage_samples_total / n_top).max(1);
    let shell = wos.shell_epsilon * domain.diameter();
    let mut inside_atoms = Vec::new();
    let mut inside_weights = Vec::new();
    let mut outside_atoms = Vec::new();
    let mut outside_weights = Vec::new();
    for (i, &z) in nu_top.atoms().iter().enumerate() {
        if domain.distance_to_boundary(z) >= -shell {
            inside_atoms.push(z);
            inside_weights.push(nu_top.weights()[i].clone());
        } else {
            outside_atoms.push(z);
            outside_weights.push(nu_top.weights()[i].clone());
        }
    }
    let swept_inside = balayage_out(
        &MeasureCloud::new(inside_atoms, inside_weights)?,
        domain,
        &wos,
    )?;
    let mut all_atoms = swept_inside.atoms().to_vec();
    let mut all_weights = swept_inside.weights().to_vec();
    all_atoms.extend_from_slice(&outside_atoms);
    all_weights.extend(outside_weights);
    let swept = MeasureCloud::new(all_atoms, all_weights)?;
    let samples_total = wos.samples_per_atom * n_top;
    let mut sup_distance = 0.0f64;
    for z in grid.exterior_points() {
        let d = (log_potential(&swept, z)? - log_potential(&mu_hat, z)?).abs();
        sup_distance = sup_distance.max(d);
    }
    let bound = cfg.stat_factor / (samples_total as f64).sqrt() + cfg.leja_tol;
    let balayage_check = BalayageCheck {
        n: n_top,
        samples_total,
        sup_distance,
        bound,
        pass: sup_distance <= bound,
    };

    let tvs: Vec<f64> = per_n.iter().map(|p| p.tv).collect();
    let verdict = if domain.theorem_verdict().full_sequence_convergence_predicted {
        let last_tv = *tvs.last().expect("nonempty");
        if trend_non_increasing(&tvs) && last_tv <= grid.tv_threshold && balayage_check.pass {
            "trend-consistent"
        } else {
            "trend-inconsistent"
        }
    } else {
        "no-full-sequence-prediction"
    }
    .to_string();

    Ok(StudyReport {
        domain: describe_domain(domain),
        verdict,
        per_n,
        balayage_check,
        calibration: CalibrationRecord {
            precision_bits: ctx.precision_bits,
            seed: cfg.wos.seed,
            leja_count: cfg.leja_count,
            leja_mesh: cfg.leja_mesh,
            tv_threshold: grid.tv_threshold,
            hull_threshold: grid.hull_threshold,
            stat_factor: cfg.stat_factor,
            leja_tol: cfg.leja_tol,
        },
    })
}

/// Compact one-line description of a domain for reports.
pub fn describe_domain(domain: &Domain) -> String {
    use crate::geometry::Shape;
    let parts: Vec<String> = domain
        .parts()
        .iter()
        .map(|p| match p {
            Shape::Disk { center, radius } => format!(
                "disk(center=({}, {}), r={})",
                center.x.to_f64(),
                center.y.to_f64(),
                radius.to_f64()
            ),
            Shape::Sector {
                vertex,
                radius,
                angle_start,
                angle_end,
            } => format!(
                "sector(vertex=({}, {}), r={}, angles=[{}, {}])",
                vertex.x.to_f64(),
                vertex.y.to_f64(),
                radius.to_f64(),
                angle_start.to_f64(),
                angle_end.to_f64()
            ),
            Shape::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
        })
        .collect();
    parts.join(" + ")
}
