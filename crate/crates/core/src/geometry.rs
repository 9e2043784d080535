//! Planar compact sets: description, validation, boundary curves and
//! ray/set intersections.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Point = [f64; 2];

/// A compact planar set.
///
/// Region variants (`disk`, `polygon`, `jordan_curve`) denote the closed
/// region bounded by the curve. `segment` has empty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PlanarSet {
    Disk { center: Point, radius: f64 },
    Polygon { vertices: Vec<Point> },
    JordanCurve { parametrization: CurveParam, samples: usize },
    Segment { endpoints: [Point; 2] },
    Union { sets: Vec<PlanarSet> },
    Affine { base: Box<PlanarSet>, scale: f64, shift: Point },
}

/// Periodic parametrization of a closed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveParam {
    /// `x(t) = center + sum_{j>=1} cos[j-1] cos(jt) + sin[j-1] sin(jt)`, `t in [0, 2pi)`.
    Fourier { center: Point, cos: Vec<Point>, sin: Vec<Point> },
    /// Closed polyline through the given points.
    Points(Vec<Point>),
}

impl CurveParam {
    pub fn eval(&self, t: f64) -> Point {
        match self {
            CurveParam::Fourier { center, cos, sin } => fourier_eval(center, cos, sin, t).0,
            CurveParam::Points(p) => {
                let n = p.len();
                let u = t.rem_euclid(2.0 * PI) / (2.0 * PI) * n as f64;
                let i = (u.floor() as usize).min(n - 1);
                let f = u - i as f64;
                let a = p[i];
                let b = p[(i + 1) % n];
                [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
            }
        }
    }

    fn map(&self, s: f64, shift: Point) -> CurveParam {
        match self {
            CurveParam::Fourier { center, cos, sin } => CurveParam::Fourier {
                center: affine(*center, s, shift),
                cos: cos.iter().map(|c| [c[0] * s, c[1] * s]).collect(),
                sin: sin.iter().map(|c| [c[0] * s, c[1] * s]).collect(),
            },
            CurveParam::Points(p) => CurveParam::Points(p.iter().map(|&x| affine(x, s, shift)).collect()),
        }
    }
}

fn fourier_eval(center: &Point, cos: &[Point], sin: &[Point], t: f64) -> (Point, Point, Point) {
    let mut p = *center;
    let mut d1 = [0.0, 0.0];
    let mut d2 = [0.0, 0.0];
    let nmax = cos.len().max(sin.len());
    for j in 1..=nmax {
        let jf = j as f64;
        let (s, c) = (jf * t).sin_cos();
        let a = cos.get(j - 1).copied().unwrap_or([0.0, 0.0]);
        let b = sin.get(j - 1).copied().unwrap_or([0.0, 0.0]);
        for d in 0..2 {
            p[d] += a[d] * c + b[d] * s;
            d1[d] += jf * (-a[d] * s + b[d] * c);
            d2[d] += -jf * jf * (a[d] * c + b[d] * s);
        }
    }
    (p, d1, d2)
}

fn affine(x: Point, s: f64, shift: Point) -> Point {
    [x[0] * s + shift[0], x[1] * s + shift[1]]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// A flattened primitive: affine maps applied, unions expanded.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Disk { center: Point, radius: f64 },
    /// Closed region bounded by a simple polygon.
    Polygon(Vec<Point>),
    /// Closed region bounded by a smooth periodic curve, with its sample count.
    Smooth { param: CurveParam, samples: usize },
    Segment(Point, Point),
}

impl Piece {
    /// Polygon used for ray casting and inside tests.
    fn outline(&self) -> Option<Vec<Point>> {
        match self {
            Piece::Polygon(v) => Some(v.clone()),
            Piece::Smooth { param, samples } => match param {
                CurveParam::Points(p) => Some(p.clone()),
                _ => Some((0..*samples).map(|j| param.eval(2.0 * PI * j as f64 / *samples as f64)).collect()),
            },
            _ => None,
        }
    }

    fn contains(&self, p: Point) -> bool {
        match self {
            Piece::Disk { center, radius } => norm(sub(p, *center)) <= *radius,
            Piece::Segment(..) => false,
            _ => point_in_polygon(&self.outline().unwrap(), p),
        }
    }

    /// Intervals `[r0, r1]` of `{rho >= 0 : rho (cos th, sin th) in piece}`.
    fn ray_intervals(&self, theta: f64) -> Vec<(f64, f64)> {
        let u = [theta.cos(), theta.sin()];
        match self {
            Piece::Disk { center, radius } => {
                let uc = u[0] * center[0] + u[1] * center[1];
                let disc = uc * uc - (center[0] * center[0] + center[1] * center[1]) + radius * radius;
                if disc <= 0.0 {
                    return vec![];
                }
                let s = disc.sqrt();
                let (lo, hi) = (uc - s, uc + s);
                if hi <= 0.0 {
                    vec![]
                } else {
                    vec![(lo.max(0.0), hi)]
                }
            }
            Piece::Segment(..) => vec![],
            _ => polygon_ray_intervals(&self.outline().unwrap(), u),
        }
    }

    /// Angles at which the ray pattern changes combinatorially.
    fn critical_angles(&self) -> Vec<f64> {
        match self {
            Piece::Disk { center, radius } => {
                let d = norm(*center);
                if d <= *radius {
                    vec![]
                } else {
                    let a = center[1].atan2(center[0]);
                    let w = (radius / d).asin();
                    vec![a - w, a + w]
                }
            }
            Piece::Segment(a, b) => vec![a[1].atan2(a[0]), b[1].atan2(b[0])],
            _ => self.outline().unwrap().iter().map(|p| p[1].atan2(p[0])).collect(),
        }
    }

    fn max_radius(&self) -> f64 {
        match self {
            Piece::Disk { center, radius } => norm(*center) + radius,
            Piece::Segment(a, b) => norm(*a).max(norm(*b)),
            Piece::Smooth { param: CurveParam::Fourier { .. }, .. } => {
                let curve = self.boundary().pop().unwrap();
                (0..2048)
                    .map(|j| norm(curve.eval(curve.hi * j as f64 / 2048.0).0))
                    .fold(0.0, f64::max)
                    * (1.0 + 1e-6)
            }
            _ => self.outline().unwrap().iter().map(|&p| norm(p)).fold(0.0, f64::max),
        }
    }

    fn boundary(&self) -> Vec<Curve> {
        match self {
            Piece::Disk { center, radius } => vec![Curve::circle(*center, *radius)],
            Piece::Polygon(v) => vec![Curve::polyline(v.clone(), true)],
            Piece::Smooth { param: CurveParam::Points(p), .. } => vec![Curve::polyline(p.clone(), true)],
            Piece::Smooth { param: CurveParam::Fourier { center, cos, sin }, .. } => {
                vec![Curve::fourier(*center, cos.clone(), sin.clone())]
            }
            Piece::Segment(a, b) => vec![Curve::polyline(vec![*a, *b], false)],
        }
    }
}

/// Even-odd inside test.
pub fn point_in_polygon(v: &[Point], p: Point) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn polygon_ray_intervals(v: &[Point], u: Point) -> Vec<(f64, f64)> {
    let n = v.len();
    let mut hits = Vec::new();
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let e = sub(b, a);
        let den = cross(u, e);
        if den.abs() < 1e-300 {
            continue;
        }
        // rho u = a + s e
        let rho = cross(a, e) / den;
        let s = cross(a, u) / den;
        if (0.0..1.0).contains(&s) && rho > 0.0 {
            hits.push(rho);
        }
    }
    hits.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut it = hits.into_iter();
    if point_in_polygon(v, [0.0, 0.0]) {
        if let Some(r) = it.next() {
            out.push((0.0, r));
        }
    }
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        out.push((a, b));
    }
    out
}

/// Union of sorted interval lists.
fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn collinear(v: &[Point]) -> bool {
    let a = v[0];
    let scale = v.iter().map(|&p| norm(sub(p, a))).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    let Some(&b) = v.iter().find(|&&p| norm(sub(p, a)) > 1e-12 * scale) else {
        return true;
    };
    v.iter().all(|&p| cross(sub(b, a), sub(p, a)).abs() <= 1e-12 * scale * scale)
}

fn segments_cross(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(sub(p4, p3), sub(p1, p3));
    let d2 = cross(sub(p4, p3), sub(p2, p3));
    let d3 = cross(sub(p2, p1), sub(p3, p1));
    let d4 = cross(sub(p2, p1), sub(p4, p1));
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// Whether the closed polyline has a self-intersection between non-adjacent edges.
pub fn closed_polyline_self_intersects(v: &[Point]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

/// Signed area of a closed polygon (positive when counter-clockwise).
pub fn polygon_signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Whether a simple polygon is convex.
pub fn polygon_is_convex(v: &[Point]) -> bool {
    let n = v.len();
    let mut sign = 0.0;
    for i in 0..n {
        let c = cross(sub(v[(i + 1) % n], v[i]), sub(v[(i + 2) % n], v[(i + 1) % n]));
        if c.abs() < 1e-14 {
            continue;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

impl PlanarSet {
    pub fn disk(center: Point, radius: f64) -> Self {
        PlanarSet::Disk { center, radius }
    }

    /// Axis-aligned square of the given side centred at `center`.
    pub fn square(center: Point, side: f64) -> Self {
        let h = 0.5 * side;
        PlanarSet::Polygon {
            vertices: vec![
                [center[0] - h, center[1] - h],
                [center[0] + h, center[1] - h],
                [center[0] + h, center[1] + h],
                [center[0] - h, center[1] + h],
            ],
        }
    }

    pub fn segment(a: Point, b: Point) -> Self {
        PlanarSet::Segment { endpoints: [a, b] }
    }

    pub fn scaled(self, scale: f64, shift: Point) -> Self {
        PlanarSet::Affine { base: Box::new(self), scale, shift }
    }

    /// Check the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Geometry(m.to_string()));
        match self {
            PlanarSet::Disk { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) || !center.iter().all(|c| c.is_finite()) {
                    return bad("disk radius must be positive and finite");
                }
            }
            PlanarSet::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return bad("polygon needs at least 3 vertices");
                }
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return bad("polygon vertex is not finite");
                }
                if collinear(vertices) {
                    return bad("polygon vertices are collinear");
                }
                if closed_polyline_self_intersects(vertices) {
                    return bad("polygon is not simple");
                }
            }
            PlanarSet::JordanCurve { parametrization, samples } => {
                if *samples < 8 {
                    return bad("jordan curve needs at least 8 samples");
                }
                let pts = match parametrization {
                    CurveParam::Points(p) => p.clone(),
                    p => (0..*samples).map(|j| p.eval(2.0 * PI * j as f64 / *samples as f64)).collect(),
                };
                if pts.len() < 3 || collinear(&pts) {
                    return bad("jordan curve is degenerate");
                }
                let scale = pts.iter().map(|&p| norm(p)).fold(0.0, f64::max).max(1.0);
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        if norm(sub(pts[i], pts[j])) <= 1e-14 * scale {
                            return bad("jordan curve samples are not pairwise distinct");
                        }
                    }
                }
                if closed_polyline_self_intersects(&pts) {
                    return bad("jordan curve self-intersects at sample resolution");
                }
            }
            PlanarSet::Segment { endpoints: [a, b] } => {
                if norm(sub(*a, *b)) == 0.0 {
                    return bad("segment endpoints coincide");
                }
            }
            PlanarSet::Union { sets } => {
                if sets.is_empty() {
                    return bad("union of no sets");
                }
                for s in sets {
                    s.validate()?;
                }
            }
            PlanarSet::Affine { base, scale, shift } => {
                if !(scale.is_finite() && *scale != 0.0) || !shift.iter().all(|c| c.is_finite()) {
                    return bad("affine scale must be finite and nonzero");
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Flatten into primitives with affine maps applied.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        self.collect_pieces(1.0, [0.0, 0.0], &mut out);
        out
    }

    fn collect_pieces(&self, s: f64, shift: Point, out: &mut Vec<Piece>) {
        match self {
            PlanarSet::Disk { center, radius } => {
                out.push(Piece::Disk { center: affine(*center, s, shift), radius: radius * s.abs() })
            }
            PlanarSet::Polygon { vertices } => {
                out.push(Piece::Polygon(vertices.iter().map(|&v| affine(v, s, shift)).collect()))
            }
            PlanarSet::JordanCurve { parametrization, samples } => {
                out.push(Piece::Smooth { param: parametrization.map(s, shift), samples: *samples })
            }
            PlanarSet::Segment { endpoints: [a, b] } => {
                out.push(Piece::Segment(affine(*a, s, shift), affine(*b, s, shift)))
            }
            PlanarSet::Union { sets } => {
                for set in sets {
                    set.collect_pieces(s, shift, out);
                }
            }
            PlanarSet::Affine { base, scale, shift: sh } => {
                // x -> s (scale y + sh) + shift
                base.collect_pieces(s * scale, affine(*sh, s, shift), out);
            }
        }
    }

    /// Whether the set has nonempty interior.
    pub fn is_region(&self) -> bool {
        self.pieces().iter().any(|p| !matches!(p, Piece::Segment(..)))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces().iter().any(|piece| piece.contains(p))
    }

    /// `max |x|` over the set.
    pub fn max_radius(&self) -> f64 {
        self.pieces().iter().map(Piece::max_radius).fold(0.0, f64::max)
    }

    /// Boundary curves of all primitives. Their union contains the outer
    /// boundary of the set and is contained in the set, so it has the same
    /// capacity.
    pub fn boundary_curves(&self) -> Vec<Curve> {
        self.pieces().iter().flat_map(Piece::boundary).collect()
    }

    /// Ray/set intersection as a sorted list of disjoint radial intervals.
    pub fn ray_intervals(&self, theta: f64) -> Vec<(f64, f64)> {
        let all: Vec<(f64, f64)> = self.pieces().iter().flat_map(|p| p.ray_intervals(theta)).collect();
        merge_intervals(all)
    }

    /// Critical angles in `[0, 2pi)` (sorted, deduplicated) where the radial
    /// intervals change non-smoothly.
    pub fn critical_angles(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self
            .pieces()
            .iter()
            .flat_map(Piece::critical_angles)
            .map(|t| t.rem_euclid(2.0 * PI))
            .collect();
        a.sort_by(f64::total_cmp);
        a.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        a
    }

    /// Area of a region without overlaps between union members.
    pub fn area(&self) -> f64 {
        self.pieces()
            .iter()
            .map(|p| match p {
                Piece::Disk { radius, .. } => PI * radius * radius,
                Piece::Segment(..) => 0.0,
                other => polygon_signed_area(&other.outline().unwrap()).abs(),
            })
            .sum()
    }

    /// Short description used as provenance in outputs.
    pub fn descriptor(&self) -> String {
        match self {
            PlanarSet::Disk { center, radius } => format!("disk(c=({},{}),r={})", center[0], center[1], radius),
            PlanarSet::Polygon { vertices } => format!("polygon({} vertices)", vertices.len()),
            PlanarSet::JordanCurve { samples, .. } => format!("jordan_curve({samples} samples)"),
            PlanarSet::Segment { endpoints: [a, b] } => {
                format!("segment(({},{})-({},{}))", a[0], a[1], b[0], b[1])
            }
            PlanarSet::Union { sets } => {
                format!("union[{}]", sets.iter().map(|s| s.descriptor()).collect::<Vec<_>>().join(","))
            }
            PlanarSet::Affine { base, scale, shift } => {
                format!("affine({},s={},t=({},{}))", base.descriptor(), scale, shift[0], shift[1])
            }
        }
    }
}

/// A boundary curve parametrized on `[0, hi]`, periodic when closed.
#[derive(Debug, Clone)]
pub struct Curve {
    kind: CurveKind,
    pub hi: f64,
    pub closed: bool,
}

#[derive(Debug, Clone)]
enum CurveKind {
    Circle { center: Point, radius: f64 },
    Polyline { pts: Vec<Point>, cum: Vec<f64> },
    Fourier { center: Point, cos: Vec<Point>, sin: Vec<Point> },
}

impl Curve {
    pub fn circle(center: Point, radius: f64) -> Self {
        Curve { kind: CurveKind::Circle { center, radius }, hi: 2.0 * PI, closed: true }
    }

    /// Polyline parametrized by arc length.
    pub fn polyline(pts: Vec<Point>, closed: bool) -> Self {
        let n = pts.len();
        let edges = if closed { n } else { n - 1 };
        let mut cum = vec![0.0];
        for i in 0..edges {
            let l = norm(sub(pts[(i + 1) % n], pts[i]));
            cum.push(cum[i] + l);
        }
        let hi = *cum.last().unwrap();
        Curve { kind: CurveKind::Polyline { pts, cum }, hi, closed }
    }

    pub fn fourier(center: Point, cos: Vec<Point>, sin: Vec<Point>) -> Self {
        Curve { kind: CurveKind::Fourier { center, cos, sin }, hi: 2.0 * PI, closed: true }
    }

    /// Position, first and second derivative with respect to the parameter.
    pub fn eval(&self, s: f64) -> (Point, Point, Point) {
        let s = if self.closed { s.rem_euclid(self.hi) } else { s.clamp(0.0, self.hi) };
        match &self.kind {
            CurveKind::Circle { center, radius } => {
                let (sn, cs) = s.sin_cos();
                (
                    [center[0] + radius * cs, center[1] + radius * sn],
                    [-radius * sn, radius * cs],
                    [-radius * cs, -radius * sn],
                )
            }
            CurveKind::Polyline { pts, cum } => {
                let n = pts.len();
                let edges = cum.len() - 1;
                let i = match cum.binary_search_by(|c| c.total_cmp(&s)) {
                    Ok(i) => i.min(edges - 1),
                    Err(i) => (i - 1).min(edges - 1),
                };
                let a = pts[i];
                let b = pts[(i + 1) % n];
                let len = cum[i + 1] - cum[i];
                let d = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
                let f = s - cum[i];
                ([a[0] + f * d[0], a[1] + f * d[1]], d, [0.0, 0.0])
            }
            CurveKind::Fourier { center, cos, sin } => fourier_eval(center, cos, sin, s),
        }
    }

    /// Arc length (numerical for Fourier curves).
    pub fn length(&self) -> f64 {
        match &self.kind {
            CurveKind::Circle { radius, .. } => 2.0 * PI * radius,
            CurveKind::Polyline { .. } => self.hi,
            CurveKind::Fourier { .. } => {
                let m = 4096;
                (0..m)
                    .map(|j| norm(self.eval(self.hi * (j as f64 + 0.5) / m as f64).1))
                    .sum::<f64>()
                    * self.hi
                    / m as f64
            }
        }
    }

    /// Parameter values at (approximately) equal arc-length spacing.
    pub fn equispaced(&self, n: usize, offset: f64) -> Vec<f64> {
        if n == 0 {
            return vec![];
        }
        match &self.kind {
            CurveKind::Fourier { .. } => {
                // invert the arc-length function on a fine table
                let m = 4096;
                let mut cum = vec![0.0];
                for j in 0..m {
                    let d = norm(self.eval(self.hi * (j as f64 + 0.5) / m as f64).1) * self.hi / m as f64;
                    cum.push(cum[j] + d);
                }
                let total = cum[m];
                (0..n)
                    .map(|i| {
                        let target = ((i as f64 + offset) / n as f64).rem_euclid(1.0) * total;
                        let k = cum.partition_point(|&c| c <= target).clamp(1, m);
                        let f = (target - cum[k - 1]) / (cum[k] - cum[k - 1]);
                        self.hi * (k as f64 - 1.0 + f) / m as f64
                    })
                    .collect()
            }
            _ if self.closed => (0..n).map(|i| self.hi * ((i as f64 + offset) / n as f64).rem_euclid(1.0)).collect(),
            _ => {
                if n == 1 {
                    return vec![0.5 * self.hi];
                }
                // Chebyshev-like clustering toward the endpoints
                (0..n)
                    .map(|i| 0.5 * self.hi * (1.0 - (PI * i as f64 / (n - 1) as f64).cos()))
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_tags() {
        let s: PlanarSet = serde_json::from_str(r#"{"type":"disk","center":[0,0],"radius":1.0}"#).unwrap();
        assert_eq!(s, PlanarSet::disk([0.0, 0.0], 1.0));
        let u = PlanarSet::Union {
            sets: vec![
                PlanarSet::square([0.0, 0.0], 1.0),
                PlanarSet::disk([2.0, 0.0], 0.5).scaled(2.0, [1.0, 1.0]),
                PlanarSet::JordanCurve {
                    parametrization: CurveParam::Fourier { center: [0.0, 0.0], cos: vec![[1.0, 0.0]], sin: vec![[0.0, 1.0]] },
                    samples: 64,
                },
            ],
        };
        let txt = serde_json::to_string(&u).unwrap();
        assert_eq!(serde_json::from_str::<PlanarSet>(&txt).unwrap(), u);
    }

    #[test]
    fn validation() {
        assert!(PlanarSet::disk([0.0, 0.0], 0.0).validate().is_err());
        let line = PlanarSet::Polygon { vertices: vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]] };
        assert!(line.validate().is_err());
        let bowtie = PlanarSet::Polygon { vertices: vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]] };
        assert!(bowtie.validate().is_err());
        assert!(PlanarSet::disk([0.0, 0.0], 1.0).scaled(0.0, [0.0, 0.0]).validate().is_err());
        let dup = PlanarSet::JordanCurve {
            parametrization: CurveParam::Fourier { center: [0.0, 0.0], cos: vec![[0.0, 0.0], [1.0, 0.0]], sin: vec![[0.0, 0.0], [0.0, 1.0]] },
            samples: 16,
        };
        assert!(dup.validate().is_err(), "doubly traversed circle has repeated samples");
        assert!(PlanarSet::square([0.0, 0.0], 1.0).validate().is_ok());
    }

    #[test]
    fn affine_composition() {
        let s = PlanarSet::disk([1.0, 0.0], 1.0).scaled(2.0, [0.0, 1.0]).scaled(-1.0, [3.0, 0.0]);
        match &s.pieces()[0] {
            Piece::Disk { center, radius } => {
                assert_eq!(*radius, 2.0);
                assert_eq!(*center, [1.0, -1.0]);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn ray_intervals_square_and_disk() {
        let sq = PlanarSet::square([0.0, 0.0], 1.0);
        let iv = sq.ray_intervals(0.3);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].0 == 0.0 && (iv[0].1 - 0.5 / 0.3f64.cos()).abs() < 1e-14);
        let d = PlanarSet::disk([3.0, 0.0], 1.0);
        let iv = d.ray_intervals(0.0);
        assert!((iv[0].0 - 2.0).abs() < 1e-14 && (iv[0].1 - 4.0).abs() < 1e-14);
        assert!(d.ray_intervals(PI / 2.0).is_empty());
        let ca = d.critical_angles();
        assert_eq!(ca.len(), 2);
        let u = PlanarSet::Union { sets: vec![PlanarSet::disk([0.0, 0.0], 1.0), PlanarSet::disk([1.5, 0.0], 1.0)] };
        assert_eq!(u.ray_intervals(0.0), vec![(0.0, 2.5)]);
    }

    #[test]
    fn curves() {
        let c = Curve::polyline(PlanarSet::square([0.0, 0.0], 2.0).pieces()[0].outline().unwrap(), true);
        assert_eq!(c.hi, 8.0);
        let (p, d, _) = c.eval(3.0);
        assert_eq!(p, [1.0, 0.0]);
        assert_eq!(d, [0.0, 1.0]);
        let f = Curve::fourier([0.0, 0.0], vec![[2.0, 0.0]], vec![[0.0, 2.0]]);
        assert!((f.length() - 4.0 * PI).abs() < 1e-10);
        let seg = Curve::polyline(vec![[0.0, 0.0], [4.0, 0.0]], false);
        let s = seg.equispaced(5, 0.0);
        assert_eq!(s[0], 0.0);
        assert!((s[4] - 4.0).abs() < 1e-15);
    }
}
