//! Planar compact sets: polygons, disks, circular sectors, and finite
//! disjoint unions.
//!
//! Coordinates are exact rationals and angles are stored as `a*pi + b` with
//! rational `a`, `b`, so validation and corner classification are decided by
//! exact sign predicates, never by floating-point comparisons. A per-domain
//! f64 snapshot (boundary pieces, bounding box, hull support) is prebuilt for
//! the statistical layers; see [`boundary`].

mod boundary;

pub use boundary::{BoundaryPath, Piece};

use crate::error::{Error, Result};
use crate::num::rational_to_float;
use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::{Complete, Float, Rational};

/// Exact planar point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pt {
    pub x: Rational,
    pub y: Rational,
}

impl Pt {
    pub fn new(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        Pt {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    fn sub(&self, o: &Pt) -> Pt {
        Pt {
            x: (&self.x - &o.x).complete(),
            y: (&self.y - &o.y).complete(),
        }
    }
}

/// Exact cross product (b - a) x (c - a).
fn cross(a: &Pt, b: &Pt, c: &Pt) -> Rational {
    let abx = (&b.x - &a.x).complete();
    let aby = (&b.y - &a.y).complete();
    let acx = (&c.x - &a.x).complete();
    let acy = (&c.y - &a.y).complete();
    abx * acy - aby * acx
}

fn orient(a: &Pt, b: &Pt, c: &Pt) -> i32 {
    cross(a, b, c).cmp0() as i32
}

/// Angle represented exactly as `pi_coeff * pi + offset` radians with
/// rational coefficients. Sign questions are decided exactly whenever one
/// coefficient vanishes; the mixed case is settled at 256 bits, which is
/// correct unless the input encodes pi to more than ~75 decimal digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Angle {
    pub pi_coeff: Rational,
    pub offset: Rational,
}

impl Angle {
    pub fn new(pi_coeff: impl Into<Rational>, offset: impl Into<Rational>) -> Self {
        Angle {
            pi_coeff: pi_coeff.into(),
            offset: offset.into(),
        }
    }

    pub fn zero() -> Self {
        Angle {
            pi_coeff: Rational::new(),
            offset: Rational::new(),
        }
    }

    pub fn from_pi(c: impl Into<Rational>) -> Self {
        Angle {
            pi_coeff: c.into(),
            offset: Rational::new(),
        }
    }

    pub fn from_radians(r: impl Into<Rational>) -> Self {
        Angle {
            pi_coeff: Rational::new(),
            offset: r.into(),
        }
    }

    pub fn value(&self, bits: u32) -> Float {
        let pi = Float::with_val(bits, Constant::Pi);
        let mut v = rational_to_float(&self.pi_coeff, bits);
        v *= &pi;
        v += rational_to_float(&self.offset, bits);
        v
    }

    pub fn to_f64(&self) -> f64 {
        self.value(96).to_f64()
    }

    pub fn add(&self, o: &Angle) -> Angle {
        Angle {
            pi_coeff: (&self.pi_coeff + &o.pi_coeff).complete(),
            offset: (&self.offset + &o.offset).complete(),
        }
    }

    pub fn sub(&self, o: &Angle) -> Angle {
        Angle {
            pi_coeff: (&self.pi_coeff - &o.pi_coeff).complete(),
            offset: (&self.offset - &o.offset).complete(),
        }
    }

    pub fn scaled(&self, s: impl Into<Rational>) -> Angle {
        let s = s.into();
        Angle {
            pi_coeff: (&self.pi_coeff * &s).complete(),
            offset: (&self.offset * &s).complete(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pi_coeff.cmp0() == std::cmp::Ordering::Equal
            && self.offset.cmp0() == std::cmp::Ordering::Equal
    }

    /// Sign of the angle value: -1, 0, or +1.
    pub fn sign(&self) -> i32 {
        if self.offset.cmp0() == std::cmp::Ordering::Equal {
            return self.pi_coeff.cmp0() as i32;
        }
        if self.pi_coeff.cmp0() == std::cmp::Ordering::Equal {
            return self.offset.cmp0() as i32;
        }
        let v = self.value(256);
        if v.is_zero() {
            0
        } else if v.is_sign_positive() {
            1
        } else {
            -1
        }
    }
}

/// One connected primitive region.
#[derive(Debug, Clone)]
pub enum Shape {
    Polygon { vertices: Vec<Pt> },
    Disk { center: Pt, radius: Rational },
    Sector {
        vertex: Pt,
        radius: Rational,
        angle_start: Angle,
        angle_end: Angle,
    },
}

impl Shape {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::Polygon { .. } => "polygon",
            Shape::Disk { .. } => "disk",
            Shape::Sector { .. } => "sector",
        }
    }
}

/// Validated compact set: one or more primitive parts with pairwise disjoint
/// closures, counterclockwise orientation, and positive area.
#[derive(Debug, Clone)]
pub struct Domain {
    parts: Vec<Shape>,
    warnings: Vec<String>,
    snapshot: boundary::Snapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerClass {
    Convex,
    Straight,
    InwardCorner,
}

/// Interior sector that certifies an inward corner: angles in units of pi,
/// opening `beta - alpha > 1`, fitting radius `r`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IcSectorParams {
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CornerReport {
    pub location: (f64, f64),
    #[serde(skip)]
    pub location_exact: Pt,
    pub interior_angle: f64,
    pub classification: CornerClass,
    pub ic_sector_params: Option<IcSectorParams>,
    pub part: usize,
    /// Lengths of the two boundary pieces meeting here (incoming, outgoing
    /// in traversal order).
    pub arm_lengths: (f64, f64),
    /// Curvatures of those pieces: 0 for straight edges, 1/r for arcs.
    pub arm_curvatures: (f64, f64),
}

impl CornerReport {
    pub fn is_inward(&self) -> bool {
        self.classification == CornerClass::InwardCorner
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentVerdict {
    pub component: usize,
    pub has_ncs_point: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CornerReport>,
}

/// Per-component witness search: a full-sequence convergence prediction
/// requires every interior component to carry an inward corner.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TheoremVerdict {
    pub components: Vec<ComponentVerdict>,
    pub full_sequence_convergence_predicted: bool,
}

/// Quadrature cell: exact triangle or polar (annular-sector) patch.
#[derive(Debug, Clone)]
pub enum Cell {
    Tri { a: Pt, b: Pt, c: Pt },
    Polar {
        center: Pt,
        r0: Rational,
        r1: Rational,
        a0: Angle,
        a1: Angle,
        full_circle: bool,
    },
}

impl Cell {
    pub fn area(&self, bits: u32) -> Float {
        match self {
            Cell::Tri { a, b, c } => {
                let mut ar = rational_to_float(&cross(a, b, c), bits);
                ar.abs_mut();
                ar /= 2u32;
                ar
            }
            Cell::Polar { r0, r1, a0, a1, .. } => {
                // (r1^2 - r0^2)/2 * (a1 - a0)
                let span = a1.sub(a0).value(bits);
                let sq = (r1.clone() * r1.clone() - r0.clone() * r0.clone()) / Rational::from(2);
                rational_to_float(&sq, bits) * span
            }
        }
    }
}

impl Domain {
    // ---- constructors (validation entry points) ----

    /// Validate a polygon: consecutive duplicates merged, clockwise input
    /// reoriented with a warning, simplicity enforced by exact segment
    /// predicates.
    pub fn polygon(vertices: Vec<Pt>) -> Result<Domain> {
        let mut warnings = Vec::new();
        let shape = validate_polygon(vertices, &mut warnings)?;
        Domain::from_parts(vec![shape], warnings)
    }

    pub fn disk(center: Pt, radius: Rational) -> Result<Domain> {
        if radius.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::InvalidConfig("disk radius must be positive".into()));
        }
        Domain::from_parts(vec![Shape::Disk { center, radius }], Vec::new())
    }

    pub fn sector(
        vertex: Pt,
        radius: Rational,
        angle_start: Angle,
        angle_end: Angle,
    ) -> Result<Domain> {
        if radius.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::DegenerateSector {
                reason: "radius must be positive".into(),
            });
        }
        let opening = angle_end.sub(&angle_start);
        if opening.sign() <= 0 {
            return Err(Error::DegenerateSector {
                reason: "angle_end must exceed angle_start".into(),
            });
        }
        if Angle::from_pi(2).sub(&opening).sign() <= 0 {
            return Err(Error::DegenerateSector {
                reason: "opening must be strictly less than 2*pi".into(),
            });
        }
        Domain::from_parts(
            vec![Shape::Sector {
                vertex,
                radius,
                angle_start,
                angle_end,
            }],
            Vec::new(),
        )
    }

    /// Union of already-validated domains. Parts are flattened; pairwise
    /// strictly positive closure distance is enforced (touching parts are
    /// rejected). Arc proximity uses the full supporting circle, which is
    /// conservative for sector parts.
    pub fn union(parts: Vec<Domain>) -> Result<Domain> {
        let mut shapes = Vec::new();
        let mut warnings = Vec::new();
        for d in parts {
            shapes.extend(d.parts);
            warnings.extend(d.warnings);
        }
        if shapes.is_empty() {
            return Err(Error::InvalidConfig("union has no parts".into()));
        }
        Domain::from_parts(shapes, warnings)
    }

    fn from_parts(parts: Vec<Shape>, warnings: Vec<String>) -> Result<Domain> {
        check_pairwise_disjoint(&parts)?;
        let snapshot = boundary::Snapshot::build(&parts);
        Ok(Domain {
            parts,
            warnings,
            snapshot,
        })
    }

    // ---- accessors ----

    pub fn parts(&self) -> &[Shape] {
        &self.parts
    }

    pub fn is_union(&self) -> bool {
        self.parts.len() > 1
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Maximum distance between boundary points (f64 snapshot value).
    pub fn diameter(&self) -> f64 {
        self.snapshot.diameter
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        self.snapshot.bbox
    }

    pub fn boundary(&self) -> &BoundaryPath {
        &self.snapshot.path
    }

    /// Exact area (pi enters only through disk and sector parts).
    pub fn area(&self, bits: u32) -> Float {
        let mut total = Float::new(bits);
        for p in &self.parts {
            match p {
                Shape::Polygon { vertices } => {
                    total += rational_to_float(&polygon_signed_area2(vertices), bits) / 2u32;
                }
                Shape::Disk { radius, .. } => {
                    let r2 = (radius * radius).complete();
                    let mut a = rational_to_float(&r2, bits);
                    a *= Float::with_val(bits, Constant::Pi);
                    total += a;
                }
                Shape::Sector {
                    radius,
                    angle_start,
                    angle_end,
                    ..
                } => {
                    let r2 = (radius * radius).complete();
                    let mut a = rational_to_float(&r2, bits);
                    a *= angle_end.sub(angle_start).value(bits);
                    a /= 2u32;
                    total += a;
                }
            }
        }
        total
    }

    // ---- geometric queries (f64 snapshot) ----

    /// Signed distance to the boundary: positive inside, negative outside.
    pub fn distance_to_boundary(&self, p: (f64, f64)) -> f64 {
        let d = self.snapshot.path.distance(p);
        if self.contains_interior_or_boundary(p) {
            d
        } else {
            -d
        }
    }

    fn contains_interior_or_boundary(&self, p: (f64, f64)) -> bool {
        self.parts
            .iter()
            .any(|s| boundary::shape_contains(s, p))
    }

    /// Index of the part whose closed region contains `p`.
    pub fn part_index_of(&self, p: (f64, f64)) -> Option<usize> {
        self.parts
            .iter()
            .position(|s| boundary::shape_contains(s, p))
    }

    /// Signed distance to one part: negative inside that part's closure,
    /// positive outside, magnitude = distance to the part boundary.
    pub fn part_signed_distance(&self, part: usize, p: (f64, f64)) -> f64 {
        let mut d = f64::INFINITY;
        for pp in self.snapshot.path.pieces() {
            if pp.part == part {
                d = d.min(pp.piece.nearest(p).1);
            }
        }
        if boundary::shape_contains(&self.parts[part], p) {
            -d
        } else {
            d
        }
    }

    /// Axis-aligned bounding box of one part.
    pub fn part_bbox(&self, part: usize) -> ((f64, f64), (f64, f64)) {
        let mut min = (f64::INFINITY, f64::INFINITY);
        let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for pp in self.snapshot.path.pieces() {
            if pp.part != part {
                continue;
            }
            let samples = 32;
            for k in 0..=samples {
                let q = pp.piece.point_at(pp.len * k as f64 / samples as f64);
                min.0 = min.0.min(q.0);
                min.1 = min.1.min(q.1);
                max.0 = max.0.max(q.0);
                max.1 = max.1.max(q.1);
            }
        }
        (min, max)
    }

    /// Minimum distance between closures of distinct parts (f64 snapshot);
    /// `None` for single-part domains.
    pub fn min_part_distance(&self) -> Option<f64> {
        if self.parts.len() < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.parts.len() {
            for j in i + 1..self.parts.len() {
                let d = self.snapshot.part_distance(i, j);
                best = best.min(d);
            }
        }
        Some(best)
    }

    /// Whether `p` lies in the convex hull of the domain, within `tol`.
    /// Curved boundaries are supported by dense arc sampling, so membership
    /// is accurate to about `1e-7 * diameter`.
    pub fn hull_contains(&self, p: (f64, f64), tol: f64) -> bool {
        self.snapshot.hull_contains(p, tol)
    }

    // ---- corners ----

    /// One report per polygon vertex and per sector vertex/arc endpoint,
    /// in boundary order per part. Disks contribute nothing.
    pub fn corner_scan(&self) -> Vec<CornerReport> {
        let mut out = Vec::new();
        for (pi, part) in self.parts.iter().enumerate() {
            match part {
                Shape::Polygon { vertices } => {
                    let n = vertices.len();
                    for i in 0..n {
                        let prev = &vertices[(i + n - 1) % n];
                        let cur = &vertices[i];
                        let next = &vertices[(i + 1) % n];
                        out.push(self.polygon_corner(pi, prev, cur, next));
                    }
                }
                Shape::Disk { .. } => {}
                Shape::Sector {
                    vertex,
                    radius,
                    angle_start,
                    angle_end,
                } => {
                    out.extend(self.sector_corners(
                        pi,
                        vertex,
                        radius,
                        angle_start,
                        angle_end,
                    ));
                }
            }
        }
        out
    }

    fn polygon_corner(&self, part: usize, prev: &Pt, cur: &Pt, next: &Pt) -> CornerReport {
        let e_in = cur.sub(prev);
        let e_out = next.sub(cur);
        let cr = (&e_in.x * &e_out.y).complete() - (&e_in.y * &e_out.x).complete();
        let dot = (&e_in.x * &e_out.x).complete() + (&e_in.y * &e_out.y).complete();
        let classification = match cr.cmp0() {
            std::cmp::Ordering::Greater => CornerClass::Convex,
            std::cmp::Ordering::Equal => CornerClass::Straight,
            std::cmp::Ordering::Less => CornerClass::InwardCorner,
        };
        // interior angle = pi - turn, turn = atan2(cross, dot) of the edges
        let turn = f64::atan2(cr.to_f64(), dot.to_f64());
        let interior = std::f64::consts::PI - turn;
        let location = cur.to_f64();
        let (ox, oy) = (e_out.x.to_f64(), e_out.y.to_f64());
        let len_in = e_in.x.to_f64().hypot(e_in.y.to_f64());
        let len_out = ox.hypot(oy);
        let ic_sector_params = if classification == CornerClass::InwardCorner {
            let alpha = f64::atan2(oy, ox) / std::f64::consts::PI;
            let clearance = self.snapshot.corner_clearance(location);
            let r = len_in.min(len_out).min(clearance);
            Some(IcSectorParams {
                alpha,
                beta: alpha + interior / std::f64::consts::PI,
                r,
            })
        } else {
            None
        };
        CornerReport {
            location,
            location_exact: cur.clone(),
            interior_angle: interior,
            classification,
            ic_sector_params,
            part,
            arm_lengths: (len_in, len_out),
            arm_curvatures: (0.0, 0.0),
        }
    }

    fn sector_corners(
        &self,
        part: usize,
        vertex: &Pt,
        radius: &Rational,
        angle_start: &Angle,
        angle_end: &Angle,
    ) -> Vec<CornerReport> {
        let opening = angle_end.sub(angle_start);
        // opening vs pi, decided exactly through the angle representation
        let rel = opening.sub(&Angle::from_pi(1)).sign();
        let classification = match rel {
            1 => CornerClass::InwardCorner,
            0 => CornerClass::Straight,
            _ => CornerClass::Convex,
        };
        let interior = opening.to_f64();
        let r_f = radius.to_f64();
        let loc = vertex.to_f64();
        let ic_sector_params = if classification == CornerClass::InwardCorner {
            Some(IcSectorParams {
                alpha: angle_start.to_f64() / std::f64::consts::PI,
                beta: angle_end.to_f64() / std::f64::consts::PI,
                r: r_f,
            })
        } else {
            None
        };
        let arc_len = r_f * opening.to_f64();
        let mut out = vec![CornerReport {
            location: loc,
            location_exact: vertex.clone(),
            interior_angle: interior,
            classification,
            ic_sector_params,
            part,
            arm_lengths: (r_f, r_f),
            arm_curvatures: (0.0, 0.0),
        }];
        // Arc endpoints: radial edge meets the arc at a right angle. Arm
        // order follows the counterclockwise traversal (edge->arc at the
        // start angle, arc->edge at the end angle).
        for (k, ang) in [angle_start, angle_end].into_iter().enumerate() {
            let v = ang.value(96);
            let (s, c) = v.sin_cos(Float::new(96));
            let x = loc.0 + r_f * c.to_f64();
            let y = loc.1 + r_f * s.to_f64();
            let (arms, curvs) = if k == 0 {
                ((r_f, arc_len), (0.0, 1.0 / r_f))
            } else {
                ((arc_len, r_f), (1.0 / r_f, 0.0))
            };
            out.push(CornerReport {
                location: (x, y),
                location_exact: vertex.clone(),
                interior_angle: std::f64::consts::FRAC_PI_2,
                classification: CornerClass::Convex,
                ic_sector_params: None,
                part,
                arm_lengths: arms,
                arm_curvatures: curvs,
            });
        }
        out
    }

    /// Local boundary scale at a corner: the shortest boundary piece meeting
    /// it. Used to size probe rings.
    pub fn corner_local_scale(&self, report: &CornerReport) -> f64 {
        self.snapshot.corner_adjacent_min_len(report.location)
    }

    /// Full-sequence convergence is predicted iff each part carries an
    /// inward corner (parts are the interior components: closures are
    /// pairwise disjoint by construction).
    pub fn theorem_verdict(&self) -> TheoremVerdict {
        let corners = self.corner_scan();
        let mut components = Vec::new();
        for part in 0..self.parts.len() {
            let witness = corners
                .iter()
                .find(|c| c.part == part && c.classification == CornerClass::InwardCorner)
                .cloned();
            components.push(ComponentVerdict {
                component: part,
                has_ncs_point: witness.is_some(),
                witness,
            });
        }
        let all = components.iter().all(|c| c.has_ncs_point);
        TheoremVerdict {
            components,
            full_sequence_convergence_predicted: all,
        }
    }

    // ---- cells ----

    /// Exact partition into quadrature cells: ear-clipped triangles for
    /// polygons, a single polar patch for disks and sectors.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        for part in &self.parts {
            match part {
                Shape::Polygon { vertices } => {
                    out.extend(ear_clip(vertices)?);
                }
                Shape::Disk { center, radius } => out.push(Cell::Polar {
                    center: center.clone(),
                    r0: Rational::new(),
                    r1: radius.clone(),
                    a0: Angle::zero(),
                    a1: Angle::from_pi(2),
                    full_circle: true,
                }),
                Shape::Sector {
                    vertex,
                    radius,
                    angle_start,
                    angle_end,
                } => out.push(Cell::Polar {
                    center: vertex.clone(),
                    r0: Rational::new(),
                    r1: radius.clone(),
                    a0: angle_start.clone(),
                    a1: angle_end.clone(),
                    full_circle: false,
                }),
            }
        }
        Ok(out)
    }
}

/// Twice the signed area (shoelace), exact.
fn polygon_signed_area2(vertices: &[Pt]) -> Rational {
    let mut acc = Rational::new();
    let n = vertices.len();
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        acc += (&a.x * &b.y).complete() - (&a.y * &b.x).complete();
    }
    acc
}

fn validate_polygon(vertices: Vec<Pt>, warnings: &mut Vec<String>) -> Result<Shape> {
    // merge consecutive duplicates, including a repeated closing vertex
    let mut vs: Vec<Pt> = Vec::with_capacity(vertices.len());
    for v in vertices {
        if vs.last() != Some(&v) {
            vs.push(v);
        }
    }
    while vs.len() > 1 && vs.first() == vs.last() {
        vs.pop();
    }
    if vs.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    let area2 = polygon_signed_area2(&vs);
    match area2.cmp0() {
        std::cmp::Ordering::Equal => return Err(Error::DegeneratePolygon),
        std::cmp::Ordering::Less => {
            vs.reverse();
            warnings.push("clockwise vertex order reoriented to counterclockwise".into());
        }
        std::cmp::Ordering::Greater => {}
    }
    let n = vs.len();
    // repeated non-consecutive vertices pinch the boundary
    for i in 0..n {
        for j in i + 1..n {
            if vs[i] == vs[j] {
                return Err(Error::SelfIntersecting { vertex_index: i });
            }
        }
    }
    // spikes: consecutive edges folding back along themselves
    for i in 0..n {
        let prev = &vs[(i + n - 1) % n];
        let cur = &vs[i];
        let next = &vs[(i + 1) % n];
        if orient(prev, cur, next) == 0 {
            let e_in = cur.sub(prev);
            let e_out = next.sub(cur);
            let dot = (&e_in.x * &e_out.x).complete() + (&e_in.y * &e_out.y).complete();
            if dot.cmp0() != std::cmp::Ordering::Greater {
                return Err(Error::SelfIntersecting { vertex_index: i });
            }
        }
    }
    // pairwise non-adjacent edge intersection, exact
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (a, b) = (&vs[i], &vs[(i + 1) % n]);
            let (c, d) = (&vs[j], &vs[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return Err(Error::SelfIntersecting { vertex_index: i });
            }
        }
    }
    Ok(Shape::Polygon { vertices: vs })
}

fn on_segment(a: &Pt, b: &Pt, p: &Pt) -> bool {
    // assumes collinear; checks bounding box membership
    let (min_x, max_x) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (min_y, max_y) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= min_x && &p.x <= max_x && &p.y >= min_y && &p.y <= max_y
}

/// Exact closed-segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: &Pt, b: &Pt, c: &Pt, d: &Pt) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0))
        && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))
    {
        return true;
    }
    (d1 == 0 && on_segment(c, d, a))
        || (d2 == 0 && on_segment(c, d, b))
        || (d3 == 0 && on_segment(a, b, c))
        || (d4 == 0 && on_segment(a, b, d))
}

fn point_in_triangle_closed(p: &Pt, a: &Pt, b: &Pt, c: &Pt) -> bool {
    // CCW triangle: inside or on boundary iff all orientations >= 0
    orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
}

/// Exact ear clipping. Terminates for every simple polygon (two-ears
/// theorem); the guard trips only if validation let a non-simple ring
/// through.
fn ear_clip(vertices: &[Pt]) -> Result<Vec<Cell>> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::with_capacity(vertices.len().saturating_sub(2));
    let mut stuck_guard = 0usize;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (&vertices[ia], &vertices[ib], &vertices[ic]);
            if orient(a, b, c) <= 0 {
                continue;
            }
            let blocked = idx.iter().any(|&other| {
                other != ia
                    && other != ib
                    && other != ic
                    && point_in_triangle_closed(&vertices[other], a, b, c)
            });
            if blocked {
                continue;
            }
            out.push(Cell::Tri {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            });
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            stuck_guard += 1;
            if stuck_guard > vertices.len() {
                return Err(Error::TriangulationFailed {
                    reason: "no ear found; polygon is not simple".into(),
                });
            }
        } else {
            stuck_guard = 0;
        }
    }
    let (a, b, c) = (&vertices[idx[0]], &vertices[idx[1]], &vertices[idx[2]]);
    if orient(a, b, c) <= 0 {
        return Err(Error::TriangulationFailed {
            reason: "degenerate final triangle".into(),
        });
    }
    out.push(Cell::Tri {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
    });
    Ok(out)
}

// ---- union disjointness (exact boundary predicates) ----

struct PartBoundary {
    segments: Vec<(Pt, Pt)>,
    /// Supporting circles of arcs (full circle: conservative for sectors).
    circles: Vec<(Pt, Rational)>,
    /// A point certainly in the part, for containment checks.
    probe: Pt,
}

fn part_boundary(shape: &Shape) -> PartBoundary {
    match shape {
        Shape::Polygon { vertices } => {
            let n = vertices.len();
            let segments = (0..n)
                .map(|i| (vertices[i].clone(), vertices[(i + 1) % n].clone()))
                .collect();
            PartBoundary {
                segments,
                circles: Vec::new(),
                probe: vertices[0].clone(),
            }
        }
        Shape::Disk { center, radius } => PartBoundary {
            segments: Vec::new(),
            circles: vec![(center.clone(), radius.clone())],
            probe: center.clone(),
        },
        Shape::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => {
            // radial edges approximated exactly at 160-bit endpoints: the
            // endpoints are transcendental in general, so we take a rational
            // enclosure by rounding; the separation test is conservative
            // anyway (full supporting circle).
            let bits = 160;
            let mk_end = |a: &Angle| {
                let v = a.value(bits);
                let (s, c) = v.sin_cos(Float::new(bits));
                let rf = rational_to_float(radius, bits);
                let x = (&rf * &c).complete(bits);
                let y = rf * s;
                Pt {
                    x: vertex.x.clone() + x.to_rational().expect("finite float"),
                    y: vertex.y.clone() + y.to_rational().expect("finite float"),
                }
            };
            let p0 = mk_end(angle_start);
            let p1 = mk_end(angle_end);
            PartBoundary {
                segments: vec![(vertex.clone(), p0), (vertex.clone(), p1)],
                circles: vec![(vertex.clone(), radius.clone())],
                probe: vertex.clone(),
            }
        }
    }
}

fn seg_circle_touch(a: &Pt, b: &Pt, c: &Pt, r: &Rational) -> bool {
    // min/max squared distance from c to segment [a,b], exact
    let ab = b.sub(a);
    let ac = c.sub(a);
    let len2 = (&ab.x * &ab.x).complete() + (&ab.y * &ab.y).complete();
    let dot = (&ab.x * &ac.x).complete() + (&ab.y * &ac.y).complete();
    let da2 = (&ac.x * &ac.x).complete() + (&ac.y * &ac.y).complete();
    let bc = c.sub(b);
    let db2 = (&bc.x * &bc.x).complete() + (&bc.y * &bc.y).complete();
    let min2 = if dot.cmp0() == std::cmp::Ordering::Less {
        da2.clone()
    } else if dot > len2 {
        db2.clone()
    } else {
        // da2 - dot^2/len2
        da2.clone() - (&dot * &dot).complete() / len2
    };
    let max2 = if da2 > db2 { da2 } else { db2 };
    let r2 = (r * r).complete();
    min2 <= r2 && r2 <= max2
}

fn circles_touch(c1: &Pt, r1: &Rational, c2: &Pt, r2: &Rational) -> bool {
    let d = c1.sub(c2);
    let d2 = (&d.x * &d.x).complete() + (&d.y * &d.y).complete();
    let sum = (r1 + r2).complete();
    let diff = (r1 - r2).complete();
    let sum2 = (&sum * &sum).complete();
    let diff2 = (&diff * &diff).complete();
    diff2 <= d2 && d2 <= sum2
}

fn check_pairwise_disjoint(parts: &[Shape]) -> Result<()> {
    if parts.len() < 2 {
        return Ok(());
    }
    let bounds: Vec<PartBoundary> = parts.iter().map(part_boundary).collect();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (bi, bj) = (&bounds[i], &bounds[j]);
            let overlap = Error::OverlappingUnionParts { first: i, second: j };
            for (a, b) in &bi.segments {
                for (c, d) in &bj.segments {
                    if segments_intersect(a, b, c, d) {
                        return Err(overlap);
                    }
                }
                for (c, r) in &bj.circles {
                    if seg_circle_touch(a, b, c, r) {
                        return Err(overlap);
                    }
                }
            }
            for (c, r) in &bi.circles {
                for (a, b) in &bj.segments {
                    if seg_circle_touch(a, b, c, r) {
                        return Err(overlap);
                    }
                }
                for (c2, r2) in &bj.circles {
                    if circles_touch(c, r, c2, r2) {
                        return Err(overlap);
                    }
                }
            }
            // nested parts: boundaries never touch, so probe containment
            // decides (f64 is safe: separation or containment is strict here)
            if boundary::shape_contains(&parts[j], bi.probe.to_f64())
                || boundary::shape_contains(&parts[i], bj.probe.to_f64())
            {
                return Err(overlap);
            }
        }
    }
    Ok(())
}
