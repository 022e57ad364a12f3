//! Quadrature: Gauss-Legendre rules and per-cell area rules.
//!
//! Triangles use a Duffy (collapsed tensor) map, polar cells a radial Gauss
//! rule crossed with either a trapezoid rule (full circles, exact for
//! trigonometric degree below the point count) or an angular Gauss rule
//! sized from the oscillation bound so that degree-`d` monomials integrate
//! to roughly half working precision.

use crate::error::{Error, Result};
use crate::geometry::{Angle, Cell, Domain};
use crate::num::{rational_to_float, Cx};
use rug::float::Constant;
use rug::ops::NegAssign;
use rug::{Assign, Float, Rational};
use std::collections::BTreeMap;

/// Nodes and positive weights realizing the area inner product over a cell
/// union, exact for bivariate polynomials in `z`, `conj(z)` up to the
/// requested total degree.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Cx>,
    pub weights: Vec<Float>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self, bits: u32) -> Float {
        let mut acc = Float::new(bits);
        for w in &self.weights {
            acc += w;
        }
        acc
    }

    fn extend(&mut self, other: QuadratureRule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1], ascending, exactly symmetric
/// about 0 (mirrored, not recomputed). Newton iteration from the Chebyshev
/// seed angle converges quadratically; failure signals a precision bug.
pub fn gauss_legendre_nodes(m: usize, bits: u32) -> Result<(Vec<Float>, Vec<Float>)> {
    if m == 0 {
        return Err(Error::InvalidConfig(
            "quadrature rule needs at least one node".into(),
        ));
    }
    let work = bits + 32;
    let mut nodes = vec![Float::new(bits); m];
    let mut weights = vec![Float::new(bits); m];
    let pi = Float::with_val(work, Constant::Pi);
    for k in 1..=m / 2 {
        // seed: cos(pi*(k - 1/4)/(m + 1/2)), k-th root from the right
        let mut seed = pi.clone();
        seed *= Float::with_val(work, k as f64 - 0.25);
        seed /= Float::with_val(work, m as f64 + 0.5);
        let mut x = seed.cos();
        let mut converged = false;
        for _ in 0..200 {
            let (p, dp) = legendre_pair(m, &x, work);
            let mut dx = p;
            dx /= &dp;
            x -= &dx;
            // quadratic convergence: stop once the step is negligible
            if dx.is_zero()
                || dx.get_exp().map_or(true, |e| e < -((work as i32) - 16))
            {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { index: k, count: m });
        }
        let (_, dp) = legendre_pair(m, &x, work);
        // w = 2 / ((1 - x^2) * P'(x)^2)
        let mut w = Float::with_val(work, 1u32);
        w -= x.clone().square();
        w *= dp.square();
        w.recip_mut();
        w *= 2u32;
        let xr = Float::with_val(bits, &x);
        let wr = Float::with_val(bits, &w);
        let mut xneg = xr.clone();
        xneg.neg_assign();
        nodes[m - k] = xr;
        nodes[k - 1] = xneg;
        weights[m - k] = wr.clone();
        weights[k - 1] = wr;
    }
    if m % 2 == 1 {
        let mid = (m - 1) / 2;
        let zero = Float::new(work);
        let (_, dp) = legendre_pair(m, &zero, work);
        let mut w = dp.square();
        w.recip_mut();
        w *= 2u32;
        nodes[mid] = Float::new(bits);
        weights[mid] = Float::with_val(bits, &w);
    }
    Ok((nodes, weights))
}

/// (P_m(x), P'_m(x)) by the three-term recurrence.
fn legendre_pair(m: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut p_prev = Float::with_val(bits, 1u32);
    let mut p = Float::with_val(bits, x);
    if m == 0 {
        return (p_prev, Float::new(bits));
    }
    for j in 2..=m {
        // p_j = ((2j-1) x p_{j-1} - (j-1) p_{j-2}) / j
        let mut next = p.clone();
        next *= x;
        next *= Float::with_val(bits, (2 * j - 1) as u32);
        let mut back = p_prev.clone();
        back *= Float::with_val(bits, (j - 1) as u32);
        next -= &back;
        next /= Float::with_val(bits, j as u32);
        p_prev = p;
        p = next;
    }
    // P'_m = m (x P_m - P_{m-1}) / (x^2 - 1)
    let mut num = p.clone();
    num *= x;
    num -= &p_prev;
    num *= Float::with_val(bits, m as u32);
    let mut den = x.clone().square();
    den -= 1u32;
    num /= &den;
    (p, num)
}

/// Area rule over a single cell, exact to total degree `degree`.
pub fn cell_rule(cell: &Cell, degree: u32, bits: u32) -> Result<QuadratureRule> {
    let mut cache = GlCache::new(bits);
    cell_rule_cached(cell, degree, bits, &mut cache)
}

/// Concatenated rule over all cells of the domain.
pub fn domain_rule(domain: &Domain, degree: u32, bits: u32) -> Result<QuadratureRule> {
    let mut cache = GlCache::new(bits);
    let mut rule = QuadratureRule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for cell in domain.cells()? {
        rule.extend(cell_rule_cached(&cell, degree, bits, &mut cache)?);
    }
    Ok(rule)
}

struct GlCache {
    bits: u32,
    rules: BTreeMap<usize, (Vec<Float>, Vec<Float>)>,
}

impl GlCache {
    fn new(bits: u32) -> Self {
        GlCache {
            bits,
            rules: BTreeMap::new(),
        }
    }

    fn get(&mut self, m: usize) -> Result<&(Vec<Float>, Vec<Float>)> {
        if !self.rules.contains_key(&m) {
            let r = gauss_legendre_nodes(m, self.bits)?;
            self.rules.insert(m, r);
        }
        Ok(self.rules.get(&m).expect("just inserted"))
    }
}

fn cell_rule_cached(
    cell: &Cell,
    degree: u32,
    bits: u32,
    cache: &mut GlCache,
) -> Result<QuadratureRule> {
    match cell {
        Cell::Tri { a, b, c } => triangle_rule(a, b, c, degree, bits, cache),
        Cell::Polar {
            center,
            r0,
            r1,
            a0,
            a1,
            full_circle,
        } => polar_rule(center, r0, r1, a0, a1, *full_circle, degree, bits, cache),
    }
}

fn pt_to_cx(p: &crate::geometry::Pt, bits: u32) -> Cx {
    Cx::from_floats(rational_to_float(&p.x, bits), rational_to_float(&p.y, bits))
}

/// Duffy map P(u, v) = a + u(b-a) + uv(c-b) over the unit square;
/// Jacobian u * |2 area|, so the radial direction needs one extra degree.
fn triangle_rule(
    a: &crate::geometry::Pt,
    b: &crate::geometry::Pt,
    c: &crate::geometry::Pt,
    degree: u32,
    bits: u32,
    cache: &mut GlCache,
) -> Result<QuadratureRule> {
    let d = degree as usize;
    let mu = (d + 3) / 2 + 1;
    let mv = (d + 2) / 2 + 1;
    let (xu, wu) = cache.get(mu)?.clone();
    let (xv, wv) = cache.get(mv)?.clone();
    let ca = pt_to_cx(a, bits);
    let cb = pt_to_cx(b, bits);
    let cc = pt_to_cx(c, bits);
    let ab = cb.sub(&ca);
    let bc = cc.sub(&cb);
    // twice the signed area; orientation was normalized at validation
    let mut two_area = Float::new(bits);
    two_area.assign(ab.re.mul_sub_mul_ref(&bc.im, &ab.im, &bc.re));
    two_area.abs_mut();
    let half = Float::with_val(bits, 0.5f64);
    let mut rule = QuadratureRule {
        nodes: Vec::with_capacity(mu * mv),
        weights: Vec::with_capacity(mu * mv),
    };
    for iu in 0..mu {
        let mut u = Float::with_val(bits, &xu[iu]);
        u += 1u32;
        u *= &half;
        let mut wu_s = Float::with_val(bits, &wu[iu]);
        wu_s *= &half;
        for iv in 0..mv {
            let mut v = Float::with_val(bits, &xv[iv]);
            v += 1u32;
            v *= &half;
            let mut wv_s = Float::with_val(bits, &wv[iv]);
            wv_s *= &half;
            // node = a + u*(b-a) + u*v*(c-b)
            let mut node = bc.scale(&v);
            node = node.add(&ab);
            node = node.scale(&u);
            node = node.add(&ca);
            let mut w = wu_s.clone();
            w *= &wv_s;
            w *= &u;
            w *= &two_area;
            rule.nodes.push(node);
            rule.weights.push(w);
        }
    }
    Ok(rule)
}

/// Number of radial Gauss points for degree-`d` exactness of r^(d+1).
fn radial_count(degree: u32) -> usize {
    (degree as usize + 3) / 2 + 1
}

/// Even trapezoid point count: exact for trigonometric frequencies < N.
fn trapezoid_count(degree: u32) -> usize {
    let n = degree as usize + 1;
    if n % 2 == 0 {
        n
    } else {
        n + 1
    }
}

/// Angular Gauss size for span `2h`: smallest even m with
/// (h*d*e/(4m))^(2m) below 2^-(bits/2 + 40); floor 4.
fn angular_gauss_count(half_span: f64, degree: u32, bits: u32) -> usize {
    let k = degree.max(1) as f64;
    let target = (bits as f64 / 2.0 + 40.0) * std::f64::consts::LN_2;
    let hke = half_span * k * std::f64::consts::E;
    let mut m = 4usize;
    loop {
        let bound = 2.0 * m as f64 * (4.0 * m as f64 / hke).ln();
        if bound >= target {
            break;
        }
        m += 1 + m / 16;
    }
    if m % 2 == 1 {
        m += 1;
    }
    m
}

#[allow(clippy::too_many_arguments)]
fn polar_rule(
    center: &crate::geometry::Pt,
    r0: &Rational,
    r1: &Rational,
    a0: &Angle,
    a1: &Angle,
    full_circle: bool,
    degree: u32,
    bits: u32,
    cache: &mut GlCache,
) -> Result<QuadratureRule> {
    let c = pt_to_cx(center, bits);
    let (radii, rweights) = radial_nodes(r0, r1, degree, bits, cache)?;
    let thetas = if full_circle {
        let n = trapezoid_count(degree);
        let mut w = Float::with_val(bits, Constant::Pi);
        w *= 2u32;
        w /= Float::with_val(bits, n as u32);
        let base = a0.value(bits);
        (0..n)
            .map(|t| {
                let mut th = Float::with_val(bits, Constant::Pi);
                th *= 2 * t as u32;
                th /= Float::with_val(bits, n as u32);
                th += &base;
                (th, w.clone())
            })
            .collect::<Vec<_>>()
    } else {
        let span = a1.sub(a0);
        let half = span.scaled(Rational::from((1, 2)));
        let mid = a0.add(&half);
        let m = angular_gauss_count(half.to_f64(), degree, bits);
        let (xs, ws) = cache.get(m)?.clone();
        let half_v = half.value(bits);
        let mid_v = mid.value(bits);
        xs.iter()
            .zip(ws.iter())
            .map(|(x, w)| {
                let mut th = Float::with_val(bits, x);
                th *= &half_v;
                th += &mid_v;
                let mut wt = Float::with_val(bits, w);
                wt *= &half_v;
                (th, wt)
            })
            .collect::<Vec<_>>()
    };
    let mut rule = QuadratureRule {
        nodes: Vec::with_capacity(radii.len() * thetas.len()),
        weights: Vec::with_capacity(radii.len() * thetas.len()),
    };
    for (r, wr) in radii.iter().zip(rweights.iter()) {
        for (th, wt) in &thetas {
            let e = crate::num::cis(th);
            let node = e.scale(r).add(&c);
            let mut w = wr.clone();
            w *= wt;
            rule.nodes.push(node);
            rule.weights.push(w);
        }
    }
    Ok(rule)
}

/// Radial Gauss nodes on [r0, r1] with the polar Jacobian folded in:
/// weights are w_gauss * (r1-r0)/2 * r.
fn radial_nodes(
    r0: &Rational,
    r1: &Rational,
    degree: u32,
    bits: u32,
    cache: &mut GlCache,
) -> Result<(Vec<Float>, Vec<Float>)> {
    let m = radial_count(degree);
    let (xs, ws) = cache.get(m)?.clone();
    let lo = rational_to_float(r0, bits);
    let hi = rational_to_float(r1, bits);
    let mut mid = lo.clone();
    mid += &hi;
    mid /= 2u32;
    let mut half = hi;
    half -= &lo;
    half /= 2u32;
    let mut radii = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (x, w) in xs.iter().zip(ws.iter()) {
        let mut r = Float::with_val(bits, x);
        r *= &half;
        r += &mid;
        let mut wt = Float::with_val(bits, w);
        wt *= &half;
        wt *= &r;
        radii.push(r);
        weights.push(wt);
    }
    Ok((radii, weights))
}

/// Compressed rule over the upper half of a conjugation-symmetric node set.
/// `nodes` hold Im >= 0 representatives; `eff_weights` fold in the mirrored
/// twin (2w for strictly upper nodes, w on the real axis). Inner products of
/// conjugation-symmetric functions over the full set equal real dot products
/// over this half set.
#[derive(Debug, Clone)]
pub(crate) struct SymPolarRule {
    pub nodes: Vec<Cx>,
    pub eff_weights: Vec<Float>,
}

/// Disk of radius `r` centered at the origin.
pub(crate) fn sym_disk_rule(radius: &Rational, degree: u32, bits: u32) -> Result<SymPolarRule> {
    let mut cache = GlCache::new(bits);
    let (radii, rweights) = radial_nodes(&Rational::new(), radius, degree, bits, &mut cache)?;
    let n = trapezoid_count(degree);
    debug_assert_eq!(n % 2, 0);
    let mut wtheta = Float::with_val(bits, Constant::Pi);
    wtheta *= 2u32;
    wtheta /= Float::with_val(bits, n as u32);
    // t = 0 and t = n/2 sit on the real axis; 0 < t < n/2 have mirrored twins
    let mut thetas = Vec::with_capacity(n / 2 + 1);
    for t in 0..=n / 2 {
        let mut th = Float::with_val(bits, Constant::Pi);
        th *= 2 * t as u32;
        th /= Float::with_val(bits, n as u32);
        let on_axis = t == 0 || t == n / 2;
        let mut w = wtheta.clone();
        if !on_axis {
            w *= 2u32;
        }
        thetas.push((th, w));
    }
    Ok(tensor_sym(&radii, &rweights, &thetas))
}

/// Sector with vertex at the origin, bisector along +x, canonical angular
/// range (-half_span, +half_span).
pub(crate) fn sym_sector_rule(
    radius: &Rational,
    half_span: &Angle,
    degree: u32,
    bits: u32,
) -> Result<SymPolarRule> {
    let mut cache = GlCache::new(bits);
    let (radii, rweights) = radial_nodes(&Rational::new(), radius, degree, bits, &mut cache)?;
    let m = angular_gauss_count(half_span.to_f64(), degree, bits);
    debug_assert_eq!(m % 2, 0);
    let (xs, ws) = cache.get(m)?.clone();
    let half_v = half_span.value(bits);
    // even rule: nodes come in exact +- pairs, none at 0; keep the positive
    // half with doubled weights
    let mut thetas = Vec::with_capacity(m / 2);
    for (x, w) in xs.iter().zip(ws.iter()).skip(m / 2) {
        let mut th = Float::with_val(bits, x);
        th *= &half_v;
        let mut wt = Float::with_val(bits, w);
        wt *= &half_v;
        wt *= 2u32;
        thetas.push((th, wt));
    }
    Ok(tensor_sym(&radii, &rweights, &thetas))
}

fn tensor_sym(radii: &[Float], rweights: &[Float], thetas: &[(Float, Float)]) -> SymPolarRule {
    let mut nodes = Vec::with_capacity(radii.len() * thetas.len());
    let mut eff_weights = Vec::with_capacity(radii.len() * thetas.len());
    for (r, wr) in radii.iter().zip(rweights.iter()) {
        for (th, wt) in thetas {
            let e = crate::num::cis(th);
            nodes.push(e.scale(r));
            let mut w = wr.clone();
            w *= wt;
            eff_weights.push(w);
        }
    }
    SymPolarRule { nodes, eff_weights }
}

/// Higher-degree companion rule used by tests to cross-check orthonormality
/// with independent nodes.
pub fn oversampled_domain_rule(domain: &Domain, degree: u32, bits: u32) -> Result<QuadratureRule> {
    domain_rule(domain, degree + 8, bits)
}
