//! 2D geometric kernel: primitives, overlap tests, depth rays and geodesics.

mod collision;
mod primitives;
mod raycast;
mod visibility;

use thiserror::Error;

pub use collision::{
    circle_polygon_overlap, closest_point_on_segment, point_boundary_distance, point_in_polygon,
    point_polygon_distance, point_segment_distance, segment_polygon_distance,
    segment_segment_distance, segments_intersect,
};
pub use primitives::{
    angle_difference, exact_degrees, normalize_angle, Aabb, Circle, Point2, PolygonObstacle, Pose2,
};
pub use raycast::{cast_ray, ray_circle, ray_segment, HitLabel, RayHit};
pub use visibility::{
    geodesic_distance, polyline_length, shortest_path_waypoints, static_clearance, NavGraph,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    DegeneratePolygon(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is self-intersecting")]
    SelfIntersecting,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("circle radius must be positive and finite, got {0}")]
    InvalidCircle(f64),
    #[error("point ({}, {}) is in collision at the requested clearance", point.x, point.y)]
    InCollision { point: Point2 },
    #[error("no collision-free path exists")]
    Unreachable,
}
