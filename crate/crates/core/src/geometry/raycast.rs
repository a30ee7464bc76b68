use serde::{Deserialize, Serialize};

use super::{Circle, Point2};
use crate::scene::Scene;

/// What a depth ray hit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HitLabel {
    None,
    Static,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub label: HitLabel,
}

/// Ray parameter of the first intersection with segment `a` to `b`, if any.
/// `dir` must be a unit vector.
pub fn ray_segment(origin: Point2, dir: Point2, a: Point2, b: Point2) -> Option<f64> {
    let e = b - a;
    let ao = a - origin;
    let denom = dir.cross(e);
    if denom == 0.0 {
        if ao.cross(dir) != 0.0 {
            return None;
        }
        // collinear: nearest point of the segment ahead of the origin
        let ta = ao.dot(dir);
        let tb = (b - origin).dot(dir);
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        if hi < 0.0 {
            return None;
        }
        return Some(lo.max(0.0));
    }
    let t = ao.cross(e) / denom;
    let s = ao.cross(dir) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}

/// Nearest non-negative root of the ray-circle quadratic. From inside the
/// disc the exit point is reported.
pub fn ray_circle(origin: Point2, dir: Point2, circle: &Circle) -> Option<f64> {
    let f = origin - circle.center;
    let b = f.dot(dir);
    let c = f.norm_squared() - circle.radius * circle.radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let near = -b - sq;
    if near >= 0.0 {
        return Some(near);
    }
    let far = -b + sq;
    (far >= 0.0).then_some(far)
}

/// Casts one depth ray against the scene's walls, its outer bounds and the
/// human discs. `direction` is an absolute angle in radians.
pub fn cast_ray(
    origin: Point2,
    direction: f64,
    max_range: f64,
    scene: &Scene,
    humans: &[Circle],
) -> RayHit {
    let dir = Point2::from_angle(direction);
    let mut best = RayHit { distance: max_range, label: HitLabel::None };

    let static_edges = scene
        .obstacles()
        .iter()
        .flat_map(|p| p.edges())
        .chain(scene.bounds().edges());
    for (a, b) in static_edges {
        if let Some(t) = ray_segment(origin, dir, a, b) {
            if t <= best.distance && (t < best.distance || best.label == HitLabel::None) {
                best = RayHit { distance: t, label: HitLabel::Static };
            }
        }
    }
    for h in humans {
        if let Some(t) = ray_circle(origin, dir, h) {
            if t < best.distance || (t == best.distance && best.label == HitLabel::None) {
                best = RayHit { distance: t, label: HitLabel::Human };
            }
        }
    }
    best
}
