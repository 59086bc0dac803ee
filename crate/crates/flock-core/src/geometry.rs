//! Dimension-generic vector algebra plus the few planar primitives the
//! avoidance probes and boundary handling need.

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

/// Below this norm a vector is treated as having no usable direction.
pub const EPS_ZERO: f64 = 1e-9;

/// Fixed-dimension Euclidean vector. Carries positions, velocities or
/// accelerations depending on context.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<const D: usize>(pub [f64; D]);

impl<const D: usize> Default for Vector<D> {
    fn default() -> Self {
        Self::ZERO
    }
}

pub type Vec2 = Vector<2>;
pub type Vec3 = Vector<3>;

impl<const D: usize> Vector<D> {
    pub const ZERO: Self = Vector([0.0; D]);

    pub fn dot(self, other: Self) -> f64 {
        let mut acc = 0.0;
        for k in 0..D {
            acc += self.0[k] * other.0[k];
        }
        acc
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector along self, or zero when the norm is at or below EPS_ZERO
    /// (callers treat that as "no direction available").
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n <= EPS_ZERO {
            Self::ZERO
        } else {
            self / n
        }
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn components(self) -> [f64; D] {
        self.0
    }
}

impl Vec2 {
    pub fn xy(x: f64, y: f64) -> Self {
        Vector([x, y])
    }

    pub fn x(self) -> f64 {
        self.0[0]
    }

    pub fn y(self) -> f64 {
        self.0[1]
    }

    /// Z-component of the 2D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }
}

impl<const D: usize> Add for Vector<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for k in 0..D {
            self.0[k] += rhs.0[k];
        }
        self
    }
}

impl<const D: usize> AddAssign for Vector<D> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const D: usize> Sub for Vector<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for k in 0..D {
            self.0[k] -= rhs.0[k];
        }
        self
    }
}

impl<const D: usize> Neg for Vector<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const D: usize> Mul<f64> for Vector<D> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for c in self.0.iter_mut() {
            *c *= k;
        }
        self
    }
}

impl<const D: usize> Div<f64> for Vector<D> {
    type Output = Self;
    fn div(self, k: f64) -> Self {
        self * (1.0 / k)
    }
}

impl<const D: usize> Index<usize> for Vector<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for Vector<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Planar rotation by a fixed angle.
#[derive(Clone, Copy, Debug)]
pub struct Rotation2 {
    cos: f64,
    sin: f64,
}

impl Rotation2 {
    pub fn from_angle(theta: f64) -> Self {
        Rotation2 {
            cos: theta.cos(),
            sin: theta.sin(),
        }
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vector([
            self.cos * v.x() - self.sin * v.y(),
            self.sin * v.x() + self.cos * v.y(),
        ])
    }
}

pub fn rotate(theta: f64, v: Vec2) -> Vec2 {
    Rotation2::from_angle(theta).apply(v)
}

/// Rescales v so its norm becomes cap·tanh(‖v‖/cap): near-identity for small
/// inputs, strictly below cap always, direction preserved.
pub fn tanh_saturate<const D: usize>(v: Vector<D>, cap: f64) -> Vector<D> {
    assert!(cap > 0.0, "saturation cap must be positive, got {cap}");
    let n = v.norm();
    if n <= EPS_ZERO {
        return Vector::ZERO;
    }
    // tanh rounds to exactly 1.0 for large arguments; keep the output norm in
    // the open interval below cap as the callers' safety contract expects.
    let s = (n / cap).tanh().min(1.0 - 8.0 * f64::EPSILON);
    v * (cap * s / n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    pub fn closest_point_to(self, p: Vec2) -> Vec2 {
        let d = self.b - self.a;
        let len_sq = d.norm_sq();
        if len_sq <= EPS_ZERO * EPS_ZERO {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len_sq).clamp(0.0, 1.0);
        self.a + d * t
    }

    /// Intersection point with another segment, if any. Endpoint contact
    /// counts. For collinear overlap, the overlap point nearest `self.a`.
    pub fn intersect(self, other: Segment) -> Option<Vec2> {
        let r = self.b - self.a;
        let s = other.b - other.a;
        let qp = other.a - self.a;
        let denom = r.cross(s);
        let scale = (r.norm() * s.norm()).max(f64::MIN_POSITIVE);
        if denom.abs() > 1e-12 * scale {
            let t = qp.cross(s) / denom;
            let u = qp.cross(r) / denom;
            if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                return Some(self.a + r * t);
            }
            return None;
        }
        // Parallel. Only collinear overlap can intersect.
        if qp.cross(r).abs() > 1e-12 * (r.norm() * qp.norm()).max(f64::MIN_POSITIVE) {
            return None;
        }
        let len_sq = r.norm_sq();
        if len_sq <= EPS_ZERO * EPS_ZERO {
            // Degenerate self: a point; hits if it lies on `other`.
            let on = other.closest_point_to(self.a);
            return ((on - self.a).norm() <= EPS_ZERO).then_some(self.a);
        }
        let t0 = qp.dot(r) / len_sq;
        let t1 = t0 + s.dot(r) / len_sq;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        let start = lo.max(0.0);
        if start <= hi.min(1.0) {
            Some(self.a + r * start)
        } else {
            None
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("edges {0} and {1} cross; ring must be simple")]
    SelfIntersecting(usize, usize),
}

/// Closed simple polygon stored as a vertex ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices(n));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if (vertices[j] - vertices[i]).norm() <= EPS_ZERO {
                return Err(PolygonError::DuplicateVertex(i, j));
            }
        }
        let poly = Polygon { vertices };
        for i in 0..n {
            for j in (i + 1)..n {
                // Skip pairs sharing a vertex (adjacent in the ring).
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if poly.edge(i).intersect(poly.edge(j)).is_some() {
                    return Err(PolygonError::SelfIntersecting(i, j));
                }
            }
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    /// Nearest point on the boundary ring. Interior queries are legal. On a
    /// distance tie the edge earliest in winding order wins.
    pub fn closest_boundary_point(&self, p: Vec2) -> Vec2 {
        let mut best = self.edge(0).closest_point_to(p);
        let mut best_d = (best - p).norm_sq();
        for i in 1..self.vertices.len() {
            let cand = self.edge(i).closest_point_to(p);
            let d = (cand - p).norm_sq();
            if d < best_d {
                best = cand;
                best_d = d;
            }
        }
        best
    }

    /// Even-odd ray cast. Points on the boundary may land on either side;
    /// callers needing exact boundary handling should also consult
    /// closest_boundary_point.
    pub fn contains(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y() > p.y()) != (b.y() > p.y()) {
                let x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
                if p.x() < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Boundary crossing of `s` nearest to `s.a`, if the segment touches the
    /// ring anywhere. A segment starting inside still reports the crossing.
    pub fn first_crossing(&self, s: Segment) -> Option<Vec2> {
        let mut best: Option<(f64, Vec2)> = None;
        for edge in self.edges() {
            if let Some(hit) = s.intersect(edge) {
                let d = (hit - s.a).norm_sq();
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, hit));
                }
            }
        }
        best.map(|(_, hit)| hit)
    }
}

pub fn closest_point_on_polygon(p: Vec2, poly: &Polygon) -> Vec2 {
    poly.closest_boundary_point(p)
}

pub fn segment_hits_polygon(s: Segment, poly: &Polygon) -> Option<Vec2> {
    poly.first_crossing(s)
}

/// Axis-aligned box, used for world bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<const D: usize> {
    pub min: Vector<D>,
    pub max: Vector<D>,
}

impl<const D: usize> Bounds<D> {
    pub fn well_ordered(&self) -> bool {
        (0..D).all(|k| self.min[k] < self.max[k])
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn contains(&self, p: Vector<D>) -> bool {
        (0..D).all(|k| self.min[k] <= p[k] && p[k] <= self.max[k])
    }
}

impl Bounds<2> {
    /// The four walls in a fixed order: bottom, right, top, left (counter-
    /// clockwise from the min corner). Wall index doubles as its id.
    pub fn walls(&self) -> [Segment; 4] {
        let (lo, hi) = (self.min, self.max);
        let bl = Vec2::xy(lo.x(), lo.y());
        let br = Vec2::xy(hi.x(), lo.y());
        let tr = Vec2::xy(hi.x(), hi.y());
        let tl = Vec2::xy(lo.x(), hi.y());
        [
            Segment::new(bl, br),
            Segment::new(br, tr),
            Segment::new(tr, tl),
            Segment::new(tl, bl),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_vec2_eq(v: Vec2, x: f64, y: f64, tol: f64) {
        assert_abs_diff_eq!(v.x(), x, epsilon = tol);
        assert_abs_diff_eq!(v.y(), y, epsilon = tol);
    }

    fn unit_square() -> Polygon {
        // Winding starts with the left edge so tie-breaks resolve to it.
        Polygon::new(vec![
            Vec2::xy(10.0, 10.0),
            Vec2::xy(10.0, 20.0),
            Vec2::xy(20.0, 20.0),
            Vec2::xy(20.0, 10.0),
        ])
        .unwrap()
    }

    #[test]
    fn rotate_identity() {
        let v = rotate(0.0, Vec2::xy(1.0, 0.0));
        assert_vec2_eq(v, 1.0, 0.0, 0.0);
    }

    #[test]
    fn rotate_quarter_turns() {
        // hand_check: rotate_quarter_cw_of_unit_x / rotate_quarter_ccw_of_unit_x
        let cw = rotate(-std::f64::consts::FRAC_PI_2, Vec2::xy(1.0, 0.0));
        assert_vec2_eq(cw, 0.0, -1.0, 1e-12);
        let ccw = rotate(std::f64::consts::FRAC_PI_2, Vec2::xy(1.0, 0.0));
        assert_vec2_eq(ccw, 0.0, 1.0, 1e-12);
    }

    #[test]
    fn closest_point_outside_square() {
        // hand_check: closest_point_square_outside_left
        let b = closest_point_on_polygon(Vec2::xy(5.0, 15.0), &unit_square());
        assert_vec2_eq(b, 10.0, 15.0, 0.0);
    }

    #[test]
    fn closest_point_on_edge_is_itself() {
        let p = Vec2::xy(10.0, 12.5);
        let b = closest_point_on_polygon(p, &unit_square());
        assert_vec2_eq(b, p.x(), p.y(), 0.0);
    }

    #[test]
    fn closest_point_center_tiebreak_first_edge() {
        // hand_check: closest_point_square_center_tiebreak
        let b = closest_point_on_polygon(Vec2::xy(15.0, 15.0), &unit_square());
        assert_vec2_eq(b, 10.0, 15.0, 0.0);
    }

    #[test]
    fn segment_crossing_square_returns_entry_point() {
        // hand_check: segment_cross_square_entry
        let s = Segment::new(Vec2::xy(0.0, 15.0), Vec2::xy(30.0, 15.0));
        let hit = segment_hits_polygon(s, &unit_square()).unwrap();
        assert_vec2_eq(hit, 10.0, 15.0, 1e-12);
    }

    #[test]
    fn segment_outside_parallel_misses() {
        let s = Segment::new(Vec2::xy(0.0, 25.0), Vec2::xy(30.0, 25.0));
        assert_eq!(segment_hits_polygon(s, &unit_square()), None);
    }

    #[test]
    fn segment_starting_inside_reports_exit() {
        // hand_check: segment_exit_square_top
        let s = Segment::new(Vec2::xy(15.0, 15.0), Vec2::xy(15.0, 25.0));
        let hit = segment_hits_polygon(s, &unit_square()).unwrap();
        assert_vec2_eq(hit, 15.0, 20.0, 1e-12);
    }

    #[test]
    fn segment_collinear_overlap_hits_nearest_point() {
        let s = Segment::new(Vec2::xy(10.0, 5.0), Vec2::xy(10.0, 40.0));
        let hit = segment_hits_polygon(s, &unit_square()).unwrap();
        assert_vec2_eq(hit, 10.0, 10.0, 1e-12);
    }

    #[test]
    fn tanh_saturate_zero_input() {
        assert_eq!(tanh_saturate(Vec2::ZERO, 2.0), Vec2::ZERO);
    }

    #[test]
    fn tanh_saturate_at_cap_norm() {
        // hand_check: tanh_rescale_4_cap4
        let v = tanh_saturate(Vec2::xy(4.0, 0.0), 4.0);
        assert_vec2_eq(v, 3.0463766238230594, 0.0, 1e-12);
    }

    #[test]
    fn tanh_saturate_huge_input_approaches_cap() {
        let v = tanh_saturate(Vec2::xy(1e6, 0.0), 2.0);
        assert_abs_diff_eq!(v.norm(), 2.0, epsilon = 1e-9);
        assert!(v.x() > 0.0 && v.y() == 0.0);
    }

    #[test]
    #[should_panic(expected = "saturation cap must be positive")]
    fn tanh_saturate_rejects_nonpositive_cap() {
        tanh_saturate(Vec2::xy(1.0, 0.0), 0.0);
    }

    #[test]
    fn polygon_rejects_too_few_vertices() {
        let err = Polygon::new(vec![Vec2::xy(0.0, 0.0), Vec2::xy(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, PolygonError::TooFewVertices(2));
    }

    #[test]
    fn polygon_rejects_duplicate_consecutive_vertices() {
        let err = Polygon::new(vec![
            Vec2::xy(0.0, 0.0),
            Vec2::xy(0.0, 0.0),
            Vec2::xy(1.0, 1.0),
        ])
        .unwrap_err();
        assert_eq!(err, PolygonError::DuplicateVertex(0, 1));
    }

    #[test]
    fn polygon_rejects_self_intersection() {
        // Bowtie.
        let err = Polygon::new(vec![
            Vec2::xy(0.0, 0.0),
            Vec2::xy(2.0, 2.0),
            Vec2::xy(2.0, 0.0),
            Vec2::xy(0.0, 2.0),
        ])
        .unwrap_err();
        assert!(matches!(err, PolygonError::SelfIntersecting(_, _)));
    }

    #[test]
    fn polygon_contains_basic() {
        let sq = unit_square();
        assert!(sq.contains(Vec2::xy(15.0, 15.0)));
        assert!(!sq.contains(Vec2::xy(5.0, 15.0)));
        assert!(!sq.contains(Vec2::xy(25.0, 15.0)));
    }

    #[test]
    fn normalized_of_tiny_vector_is_zero() {
        let v = Vec2::xy(1e-10, 0.0);
        assert_eq!(v.normalized(), Vec2::ZERO);
    }

    #[test]
    fn bounds_walls_cover_rectangle() {
        let b = Bounds {
            min: Vec2::xy(0.0, 0.0),
            max: Vec2::xy(50.0, 50.0),
        };
        let walls = b.walls();
        assert_eq!(walls[0].a, Vec2::xy(0.0, 0.0));
        assert_eq!(walls[0].b, Vec2::xy(50.0, 0.0));
        assert_eq!(walls[3].b, Vec2::xy(0.0, 0.0));
        assert!(b.well_ordered());
        assert_abs_diff_eq!(b.diagonal(), 50.0 * std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn rotation_preserves_norm(theta in -10.0f64..10.0, x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let v = Vec2::xy(x, y);
            let rv = rotate(theta, v);
            prop_assert!((rv.norm() - v.norm()).abs() <= 1e-12 * (1.0 + v.norm()));
        }

        #[test]
        fn tanh_saturate_below_cap_and_aligned(
            x in -1e3f64..1e3, y in -1e3f64..1e3, z in -1e3f64..1e3, cap in 0.01f64..100.0
        ) {
            let v = Vector([x, y, z]);
            let out = tanh_saturate(v, cap);
            prop_assert!(out.norm() < cap);
            if v.norm() > EPS_ZERO {
                // Nonnegative multiple of the input direction.
                let k = out.norm() / v.norm();
                let diff = out - v * k;
                prop_assert!(diff.norm() <= 1e-9 * (1.0 + out.norm()));
            }
        }

        #[test]
        fn tanh_saturate_monotone_in_norm(
            n1 in 0.0f64..100.0, n2 in 0.0f64..100.0, cap in 0.1f64..10.0
        ) {
            let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
            let a = tanh_saturate(Vec2::xy(lo, 0.0), cap).norm();
            let b = tanh_saturate(Vec2::xy(hi, 0.0), cap).norm();
            prop_assert!(a <= b + 1e-12);
        }

        #[test]
        fn tanh_saturate_near_identity_for_small_inputs(
            scale in 1e-6f64..0.01, cap in 0.1f64..10.0
        ) {
            let v = Vec2::xy(scale * cap, 0.0);
            let out = tanh_saturate(v, cap);
            prop_assert!((out - v).norm() <= 1e-4 * cap);
        }

        #[test]
        fn closest_point_matches_dense_sampling(
            cx in -5.0f64..5.0, cy in -5.0f64..5.0, radius in 0.5f64..5.0,
            sides in 3usize..8, px in -20.0f64..20.0, py in -20.0f64..20.0
        ) {
            // Regular convex polygon around (cx, cy).
            let verts: Vec<Vec2> = (0..sides)
                .map(|k| {
                    let ang = k as f64 / sides as f64 * std::f64::consts::TAU;
                    Vec2::xy(cx + radius * ang.cos(), cy + radius * ang.sin())
                })
                .collect();
            let poly = Polygon::new(verts).unwrap();
            let p = Vec2::xy(px, py);
            let best = poly.closest_boundary_point(p);
            // Dense sampling of the boundary.
            let mut sampled = f64::INFINITY;
            for edge in poly.edges() {
                for k in 0..=200 {
                    let t = k as f64 / 200.0;
                    let q = edge.a + (edge.b - edge.a) * t;
                    sampled = sampled.min((q - p).norm());
                }
            }
            prop_assert!((best - p).norm() <= sampled + 1e-6);
        }
    }
}
