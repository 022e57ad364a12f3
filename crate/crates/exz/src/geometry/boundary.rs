//! f64 boundary snapshot of a validated domain.
//!
//! The statistical layers (Leja scans, walk-on-spheres, histogram binning)
//! run in f64; this module owns the piecewise boundary description, nearest
//! point projection, arclength parametrization, convex hull, and diameter.
//! Everything here is derived once from the exact shapes at domain build
//! time and is immutable afterwards.

use super::Shape;

const TAU: f64 = std::f64::consts::TAU;

/// One boundary piece, traversed counterclockwise around the region.
#[derive(Debug, Clone)]
pub enum Piece {
    Seg { a: (f64, f64), b: (f64, f64) },
    /// Circular arc centered at `c` from angle `th0` to `th1 > th0`.
    Arc {
        c: (f64, f64),
        r: f64,
        th0: f64,
        th1: f64,
    },
}

impl Piece {
    pub fn len(&self) -> f64 {
        match self {
            Piece::Seg { a, b } => (b.0 - a.0).hypot(b.1 - a.1),
            Piece::Arc { r, th0, th1, .. } => r * (th1 - th0),
        }
    }

    /// Point at arclength `t` from the piece start, `t` in `[0, len]`.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        match self {
            Piece::Seg { a, b } => {
                let l = self.len();
                let u = if l > 0.0 { (t / l).clamp(0.0, 1.0) } else { 0.0 };
                (a.0 + u * (b.0 - a.0), a.1 + u * (b.1 - a.1))
            }
            Piece::Arc { c, r, th0, .. } => {
                let th = th0 + t / r;
                (c.0 + r * th.cos(), c.1 + r * th.sin())
            }
        }
    }

    /// Nearest point: returns (arclength along piece, distance, point).
    pub fn nearest(&self, p: (f64, f64)) -> (f64, f64, (f64, f64)) {
        match self {
            Piece::Seg { a, b } => {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let u = if len2 > 0.0 {
                    (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let q = (a.0 + u * dx, a.1 + u * dy);
                let d = (p.0 - q.0).hypot(p.1 - q.1);
                (u * len2.sqrt(), d, q)
            }
            Piece::Arc { c, r, th0, th1 } => {
                let (vx, vy) = (p.0 - c.0, p.1 - c.1);
                let rho = vx.hypot(vy);
                if rho == 0.0 {
                    let q = self.point_at(0.0);
                    return (0.0, *r, q);
                }
                let th = vy.atan2(vx);
                let rel = (th - th0).rem_euclid(TAU);
                let span = th1 - th0;
                if rel <= span {
                    let q = (c.0 + r * th.cos(), c.1 + r * th.sin());
                    (rel * r, (rho - r).abs(), q)
                } else {
                    let q0 = self.point_at(0.0);
                    let q1 = self.point_at(self.len());
                    let d0 = (p.0 - q0.0).hypot(p.1 - q0.1);
                    let d1 = (p.0 - q1.0).hypot(p.1 - q1.1);
                    if d0 <= d1 {
                        (0.0, d0, q0)
                    } else {
                        (self.len(), d1, q1)
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PathPiece {
    pub piece: Piece,
    pub len: f64,
    /// Cumulative arclength at the piece start.
    pub offset: f64,
    pub part: usize,
}

/// Concatenated boundary of all parts, parametrized by global arclength.
#[derive(Debug, Clone)]
pub struct BoundaryPath {
    pieces: Vec<PathPiece>,
    total_len: f64,
}

impl BoundaryPath {
    fn build(parts: &[Shape]) -> BoundaryPath {
        let mut pieces = Vec::new();
        let mut offset = 0.0;
        for (part, shape) in parts.iter().enumerate() {
            for piece in shape_pieces(shape) {
                let len = piece.len();
                pieces.push(PathPiece {
                    piece,
                    len,
                    offset,
                    part,
                });
                offset += len;
            }
        }
        BoundaryPath {
            pieces,
            total_len: offset,
        }
    }

    pub fn total_len(&self) -> f64 {
        self.total_len
    }

    pub fn pieces(&self) -> &[PathPiece] {
        &self.pieces
    }

    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let s = s.rem_euclid(self.total_len.max(f64::MIN_POSITIVE));
        for pp in &self.pieces {
            if s <= pp.offset + pp.len {
                return pp.piece.point_at(s - pp.offset);
            }
        }
        let last = self.pieces.last().expect("nonempty boundary");
        last.piece.point_at(last.len)
    }

    /// `count` points uniform in arclength, offset by half a step so corner
    /// points are never duplicated.
    pub fn mesh(&self, count: usize) -> Vec<(f64, f64)> {
        let step = self.total_len / count as f64;
        let mut out = Vec::with_capacity(count);
        let mut iter = self.pieces.iter();
        let mut cur = iter.next().expect("nonempty boundary");
        for k in 0..count {
            let s = (k as f64 + 0.5) * step;
            while s > cur.offset + cur.len {
                match iter.next() {
                    Some(next) => cur = next,
                    None => break,
                }
            }
            out.push(cur.piece.point_at(s - cur.offset));
        }
        out
    }

    /// Nearest boundary point: (global arclength, distance, point).
    pub fn project(&self, p: (f64, f64)) -> (f64, f64, (f64, f64)) {
        let mut best = (0.0, f64::INFINITY, (0.0, 0.0));
        for pp in &self.pieces {
            let (t, d, q) = pp.piece.nearest(p);
            if d < best.1 {
                best = (pp.offset + t, d, q);
            }
        }
        best
    }

    pub fn distance(&self, p: (f64, f64)) -> f64 {
        self.project(p).1
    }
}

fn shape_pieces(shape: &Shape) -> Vec<Piece> {
    match shape {
        Shape::Polygon { vertices } => {
            let pts: Vec<(f64, f64)> = vertices.iter().map(|v| v.to_f64()).collect();
            let n = pts.len();
            (0..n)
                .map(|i| Piece::Seg {
                    a: pts[i],
                    b: pts[(i + 1) % n],
                })
                .collect()
        }
        Shape::Disk { center, radius } => vec![Piece::Arc {
            c: center.to_f64(),
            r: radius.to_f64(),
            th0: 0.0,
            th1: TAU,
        }],
        Shape::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => {
            let v = vertex.to_f64();
            let r = radius.to_f64();
            let t0 = angle_start.to_f64();
            let t1 = angle_end.to_f64();
            let p0 = (v.0 + r * t0.cos(), v.1 + r * t0.sin());
            let p1 = (v.0 + r * t1.cos(), v.1 + r * t1.sin());
            vec![
                Piece::Seg { a: v, b: p0 },
                Piece::Arc {
                    c: v,
                    r,
                    th0: t0,
                    th1: t1,
                },
                Piece::Seg { a: p1, b: v },
            ]
        }
    }
}

/// Closed-region membership in f64 (boundary points may fall either side at
/// rounding scale, which every caller tolerates).
pub fn shape_contains(shape: &Shape, p: (f64, f64)) -> bool {
    match shape {
        Shape::Polygon { vertices } => {
            let pts: Vec<(f64, f64)> = vertices.iter().map(|v| v.to_f64()).collect();
            point_in_polygon(&pts, p)
        }
        Shape::Disk { center, radius } => {
            let c = center.to_f64();
            let r = radius.to_f64();
            (p.0 - c.0).hypot(p.1 - c.1) <= r
        }
        Shape::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => {
            let v = vertex.to_f64();
            let r = radius.to_f64();
            let (dx, dy) = (p.0 - v.0, p.1 - v.1);
            let rho = dx.hypot(dy);
            if rho > r {
                return false;
            }
            if rho == 0.0 {
                return true;
            }
            let rel = (dy.atan2(dx) - angle_start.to_f64()).rem_euclid(TAU);
            rel <= angle_end.sub(angle_start).to_f64()
        }
    }
}

fn point_in_polygon(pts: &[(f64, f64)], p: (f64, f64)) -> bool {
    let mut inside = false;
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if p.0 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Prebuilt f64 geometry derived from the exact shapes.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub path: BoundaryPath,
    pub diameter: f64,
    pub bbox: (f64, f64, f64, f64),
    hull: Vec<(f64, f64)>,
    part_support: Vec<Vec<(f64, f64)>>,
}

impl Snapshot {
    pub fn build(parts: &[Shape]) -> Snapshot {
        let path = BoundaryPath::build(parts);
        let part_support: Vec<Vec<(f64, f64)>> =
            parts.iter().map(|s| support_points(s, 256)).collect();
        let mut diameter: f64 = parts.iter().map(part_diameter).fold(0.0, f64::max);
        if parts.len() > 1 {
            let flat: Vec<(f64, f64)> = part_support.iter().flatten().copied().collect();
            for i in 0..flat.len() {
                for j in i + 1..flat.len() {
                    let d = (flat[i].0 - flat[j].0).hypot(flat[i].1 - flat[j].1);
                    diameter = diameter.max(d);
                }
            }
        }
        let hull_input: Vec<(f64, f64)> = parts
            .iter()
            .flat_map(|s| support_points(s, 4096))
            .collect();
        let hull = convex_hull(&hull_input);
        let mut bbox = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &hull_input {
            bbox.0 = bbox.0.min(x);
            bbox.1 = bbox.1.min(y);
            bbox.2 = bbox.2.max(x);
            bbox.3 = bbox.3.max(y);
        }
        Snapshot {
            path,
            diameter,
            bbox,
            hull,
            part_support,
        }
    }

    /// Minimum distance between samples of part `i` and the boundary pieces
    /// of part `j` (both directions). Sampling error is well below the
    /// separation scales this is used to check.
    pub fn part_distance(&self, i: usize, j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for &(dir_a, dir_b) in &[(i, j), (j, i)] {
            for &p in &self.part_support[dir_a] {
                for pp in self.path.pieces() {
                    if pp.part != dir_b {
                        continue;
                    }
                    best = best.min(pp.piece.nearest(p).1);
                }
            }
        }
        best
    }

    pub fn hull_contains(&self, p: (f64, f64), tol: f64) -> bool {
        let h = &self.hull;
        if h.len() < 3 {
            return false;
        }
        for i in 0..h.len() {
            let a = h[i];
            let b = h[(i + 1) % h.len()];
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let l = ex.hypot(ey);
            if l == 0.0 {
                continue;
            }
            let s = (ex * (p.1 - a.1) - ey * (p.0 - a.0)) / l;
            if s < -tol {
                return false;
            }
        }
        true
    }

    /// Distance from a corner to all boundary pieces not meeting it;
    /// bounds the radius of an interior sector anchored there.
    pub fn corner_clearance(&self, corner: (f64, f64)) -> f64 {
        let adj_tol = 1e-9 * self.diameter.max(1.0);
        let mut best = f64::INFINITY;
        for pp in self.path.pieces() {
            let start = pp.piece.point_at(0.0);
            let end = pp.piece.point_at(pp.len);
            let adjacent = dist(start, corner) <= adj_tol || dist(end, corner) <= adj_tol;
            if adjacent {
                continue;
            }
            best = best.min(pp.piece.nearest(corner).1);
        }
        best
    }

    /// Shortest boundary piece meeting the corner.
    pub fn corner_adjacent_min_len(&self, corner: (f64, f64)) -> f64 {
        let adj_tol = 1e-9 * self.diameter.max(1.0);
        let mut best = f64::INFINITY;
        for pp in self.path.pieces() {
            let start = pp.piece.point_at(0.0);
            let end = pp.piece.point_at(pp.len);
            if dist(start, corner) <= adj_tol || dist(end, corner) <= adj_tol {
                best = best.min(pp.len);
            }
        }
        if best.is_finite() {
            best
        } else {
            self.diameter
        }
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn part_diameter(shape: &Shape) -> f64 {
    match shape {
        Shape::Polygon { vertices } => {
            let pts: Vec<(f64, f64)> = vertices.iter().map(|v| v.to_f64()).collect();
            let mut best = 0.0f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    best = best.max(dist(pts[i], pts[j]));
                }
            }
            best
        }
        Shape::Disk { radius, .. } => 2.0 * radius.to_f64(),
        Shape::Sector {
            radius,
            angle_start,
            angle_end,
            ..
        } => {
            let r = radius.to_f64();
            let span = angle_end.sub(angle_start).to_f64();
            if span >= std::f64::consts::PI {
                2.0 * r
            } else {
                r.max(2.0 * r * (span / 2.0).sin())
            }
        }
    }
}

/// Boundary support points for hulls/diameters: exact polygon vertices,
/// `arc_samples` points per arc plus endpoints and centers of curvature
/// anchors (sector vertices).
fn support_points(shape: &Shape, arc_samples: usize) -> Vec<(f64, f64)> {
    match shape {
        Shape::Polygon { vertices } => vertices.iter().map(|v| v.to_f64()).collect(),
        Shape::Disk { center, radius } => {
            let c = center.to_f64();
            let r = radius.to_f64();
            (0..arc_samples)
                .map(|k| {
                    let th = TAU * k as f64 / arc_samples as f64;
                    (c.0 + r * th.cos(), c.1 + r * th.sin())
                })
                .collect()
        }
        Shape::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => {
            let v = vertex.to_f64();
            let r = radius.to_f64();
            let t0 = angle_start.to_f64();
            let span = angle_end.sub(angle_start).to_f64();
            let mut out = vec![v];
            for k in 0..=arc_samples {
                let th = t0 + span * k as f64 / arc_samples as f64;
                out.push((v.0 + r * th.cos(), v.1 + r * th.sin()));
            }
            out
        }
    }
}

/// Andrew monotone chain, counterclockwise output.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
