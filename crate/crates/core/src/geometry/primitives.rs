use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::GeometryError;

/// A point (or vector) in the world plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `angle` (radians, counter-clockwise from +x).
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotates by +90 degrees.
    pub fn perp(self) -> Self {
        Self { x: -self.y, y: self.x }
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self { x: self.x / n, y: self.y / n }
    }

    pub fn lerp(self, other: Point2, t: f64) -> Self {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `[-PI, PI)`.
pub fn normalize_angle(angle: f64) -> f64 {
    if (-PI..PI).contains(&angle) {
        return angle;
    }
    let a = (angle + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can return exactly 2*PI for tiny negative inputs
    if a >= PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Signed smallest difference `a - b`, wrapped into `[-PI, PI)`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// Position plus heading. The heading is kept in `[-PI, PI)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Point2,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(position: Point2, heading: f64) -> Self {
        Self { position, heading: normalize_angle(heading) }
    }

    pub fn from_degrees(x: f64, y: f64, heading_deg: f64) -> Self {
        Self::new(Point2::new(x, y), heading_deg.to_radians())
    }

    pub fn heading_degrees(&self) -> f64 {
        exact_degrees(self.heading)
    }

    pub fn direction(&self) -> Point2 {
        Point2::from_angle(self.heading)
    }
}

/// Degrees value `d` such that `d.to_radians() == radians` whenever one exists
/// near `radians.to_degrees()`, so that degree-based files round-trip exactly.
pub fn exact_degrees(radians: f64) -> f64 {
    let first = radians.to_degrees();
    if first.to_radians() == radians {
        return first;
    }
    let mut below = first;
    let mut above = first;
    for _ in 0..8 {
        below = next_down(below);
        above = next_up(above);
        if below.to_radians() == radians {
            return below;
        }
        if above.to_radians() == radians {
            return above;
        }
    }
    first
}

fn next_up(x: f64) -> f64 {
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Disc footprint used for the robot and for humans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(GeometryError::InvalidCircle(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn overlaps_circle(&self, other: &Circle) -> bool {
        self.center.distance(other.center) <= self.radius + other.radius
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub fn new(min: Point2, max: Point2) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Shrinks every side by `margin`. May produce an empty box (min > max).
    pub fn shrunk(&self, margin: f64) -> Aabb {
        Aabb {
            min: Point2::new(self.min.x + margin, self.min.y + margin),
            max: Point2::new(self.max.x - margin, self.max.y - margin),
        }
    }

    /// Distance from `p` to the nearest side, positive inside, negative outside.
    pub fn inner_clearance(&self, p: Point2) -> f64 {
        let dx = (p.x - self.min.x).min(self.max.x - p.x);
        let dy = (p.y - self.min.y).min(self.max.y - p.y);
        dx.min(dy)
    }

    /// Corners in counter-clockwise order starting at `min`.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> {
        let c = self.corners();
        (0..4).map(move |i| (c[i], c[(i + 1) % 4]))
    }
}

/// Simple polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonObstacle {
    vertices: Vec<Point2>,
}

impl PolygonObstacle {
    /// Validates the vertex ring. Clockwise input is reversed to counter-clockwise.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::DegeneratePolygon(vertices.len()));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if is_self_intersecting(&vertices) {
            return Err(GeometryError::SelfIntersecting);
        }
        let area = signed_area(&vertices);
        if area.abs() < 1e-12 {
            return Err(GeometryError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle obstacle.
    pub fn rectangle(min: Point2, max: Point2) -> Result<Self, GeometryError> {
        Self::new(Aabb::new(min, max).corners().to_vec())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bounding_box(&self) -> Aabb {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        Aabb { min, max }
    }
}

fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn is_self_intersecting(vertices: &[Point2]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a0, a1) = (vertices[i], vertices[(i + 1) % n]);
        for j in (i + 1)..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (b0, b1) = (vertices[j], vertices[(j + 1) % n]);
            if super::collision::segments_intersect(a0, a1, b0, b1) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_angle_range() {
        assert_eq!(normalize_angle(PI), -PI);
        assert_eq!(normalize_angle(-PI), -PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
        assert!(normalize_angle(-1e-18) < PI);
    }

    #[test]
    fn clockwise_polygon_is_reversed() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        let p = PolygonObstacle::new(cw).unwrap();
        assert!(p.area() > 0.0);
    }

    #[test]
    fn rejects_bad_polygons() {
        let two = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        assert_eq!(PolygonObstacle::new(two), Err(GeometryError::DegeneratePolygon(2)));
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert_eq!(PolygonObstacle::new(bowtie), Err(GeometryError::SelfIntersecting));
        let line = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        assert_eq!(PolygonObstacle::new(line), Err(GeometryError::ZeroArea));
    }

    #[test]
    fn exact_degrees_round_trips() {
        for deg in [0.0, 15.0, 90.0, -45.0, 179.0, 33.3, -179.99] {
            let r = normalize_angle(f64::to_radians(deg));
            assert_eq!(exact_degrees(r).to_radians(), r);
        }
    }
}
