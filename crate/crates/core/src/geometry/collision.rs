//! Distance and overlap queries between points, segments, discs and polygons.

use super::{Circle, GeometryError, Point2, PolygonObstacle};

fn orientation(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching endpoints included.
pub fn segments_intersect(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> bool {
    let d1 = orientation(b0, b1, a0);
    let d2 = orientation(b0, b1, a1);
    let d3 = orientation(a0, a1, b0);
    let d4 = orientation(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(b0, b1, a0))
        || (d2 == 0.0 && on_segment(b0, b1, a1))
        || (d3 == 0.0 && on_segment(a0, a1, b0))
        || (d4 == 0.0 && on_segment(a0, a1, b1))
}

pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> Point2 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    p.distance(closest_point_on_segment(p, a, b))
}

pub fn segment_segment_distance(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Even-odd containment. Points on the boundary may go either way; callers
/// that care combine this with a boundary distance.
pub fn point_in_polygon(p: Point2, polygon: &PolygonObstacle) -> bool {
    let mut inside = false;
    for (a, b) in polygon.edges() {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from `p` to the polygon's boundary (ignores containment).
pub fn point_boundary_distance(p: Point2, polygon: &PolygonObstacle) -> f64 {
    polygon
        .edges()
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `p` to the polygon region; zero inside.
pub fn point_polygon_distance(p: Point2, polygon: &PolygonObstacle) -> f64 {
    if point_in_polygon(p, polygon) {
        0.0
    } else {
        point_boundary_distance(p, polygon)
    }
}

/// Distance from segment `a` to `b` to the polygon region; zero on contact or containment.
pub fn segment_polygon_distance(a: Point2, b: Point2, polygon: &PolygonObstacle) -> f64 {
    if point_in_polygon(a, polygon) {
        return 0.0;
    }
    polygon
        .edges()
        .map(|(e0, e1)| segment_segment_distance(a, b, e0, e1))
        .fold(f64::INFINITY, f64::min)
}

/// True iff the disc touches the polygon boundary or interior.
pub fn circle_polygon_overlap(c: &Circle, polygon: &PolygonObstacle) -> Result<bool, GeometryError> {
    if polygon.vertices().len() < 3 {
        return Err(GeometryError::DegeneratePolygon(polygon.vertices().len()));
    }
    Ok(point_polygon_distance(c.center, polygon) <= c.radius)
}
