//! Looping patrol motion for humans. Humans are kinematic: they follow their
//! route at constant speed and never react to the robot.

use thiserror::Error;

use crate::episode::HumanConfig;
use crate::geometry::{shortest_path_waypoints, GeometryError, Point2, Pose2};
use crate::scene::Scene;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("human {human:?}: patrol leg {leg} from ({}, {}) to ({}, {}) is not walkable: {source}", from.x, from.y, to.x, to.y)]
pub struct PatrolError {
    pub human: String,
    pub leg: usize,
    pub from: Point2,
    pub to: Point2,
    pub source: GeometryError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatrolState {
    pub human_id: String,
    /// Closed ring of route vertices; segment `i` runs to vertex `(i + 1) % n`.
    route: Vec<Point2>,
    /// Arc length at the start of each segment.
    segment_starts: Vec<f64>,
    route_length: f64,
    arc_position: f64,
    speed: f64,
    spawn: Pose2,
}

/// Expands spawn -> waypoints -> spawn into a closed walkable ring.
pub fn build_patrol(h: &HumanConfig, scene: &Scene) -> Result<PatrolState, PatrolError> {
    let mut ring = vec![h.spawn.position];
    let targets = h.waypoints.iter().copied().chain(std::iter::once(h.spawn.position));
    let mut from = h.spawn.position;
    for (leg, to) in targets.enumerate() {
        let path = shortest_path_waypoints(from, to, scene, h.footprint_radius).map_err(|source| {
            PatrolError { human: h.id.clone(), leg, from, to, source }
        })?;
        for p in path.into_iter().skip(1) {
            if ring.last() != Some(&p) {
                ring.push(p);
            }
        }
        from = to;
    }
    // the ring closes back on the spawn point
    if ring.len() > 1 && ring.last() == ring.first() {
        ring.pop();
    }
    Ok(PatrolState::from_ring(h.id.clone(), ring, h.speed, h.spawn))
}

impl PatrolState {
    fn from_ring(human_id: String, route: Vec<Point2>, speed: f64, spawn: Pose2) -> Self {
        let n = route.len();
        let mut segment_starts = Vec::with_capacity(n);
        let mut total = 0.0;
        if n > 1 {
            for i in 0..n {
                segment_starts.push(total);
                total += route[i].distance(route[(i + 1) % n]);
            }
        }
        Self {
            human_id,
            route,
            segment_starts,
            route_length: total,
            arc_position: 0.0,
            speed,
            spawn,
        }
    }

    pub fn route(&self) -> &[Point2] {
        &self.route
    }

    pub fn route_length(&self) -> f64 {
        self.route_length
    }

    pub fn arc_position(&self) -> f64 {
        self.arc_position
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn is_stationary(&self) -> bool {
        self.route_length == 0.0
    }

    /// Time to walk the whole loop once; `None` for stationary patrols.
    pub fn period(&self) -> Option<f64> {
        (!self.is_stationary()).then(|| self.route_length / self.speed)
    }

    pub fn set_arc_position(&mut self, s: f64) {
        if !self.is_stationary() {
            self.arc_position = s.rem_euclid(self.route_length);
            if self.arc_position >= self.route_length {
                self.arc_position = 0.0;
            }
        }
    }

    /// Moves `speed * dt` further along the loop.
    pub fn advance(&mut self, dt: f64) {
        self.set_arc_position(self.arc_position + self.speed * dt);
    }

    /// Places the human where it is `t` seconds after spawning. Unlike
    /// repeated `advance` calls this does not accumulate rounding.
    pub fn set_elapsed(&mut self, t: f64) {
        self.set_arc_position(self.speed * t);
    }

    pub fn pose(&self) -> Pose2 {
        if self.is_stationary() {
            return self.spawn;
        }
        let i = self.segment_starts.partition_point(|&s| s <= self.arc_position) - 1;
        let a = self.route[i];
        let b = self.route[(i + 1) % self.route.len()];
        let len = a.distance(b);
        let t = ((self.arc_position - self.segment_starts[i]) / len).clamp(0.0, 1.0);
        Pose2::new(a.lerp(b, t), (b - a).angle())
    }
}

/// Advances every patrol by `dt` and returns the new poses.
pub fn advance_humans(states: &mut [PatrolState], dt: f64) -> Vec<Pose2> {
    states
        .iter_mut()
        .map(|s| {
            s.advance(dt);
            s.pose()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, PolygonObstacle};

    fn open() -> Scene {
        Scene::new("o", Aabb::new(Point2::new(0.0, 0.0), Point2::new(10.0, 10.0)), vec![]).unwrap()
    }

    fn human(spawn: Point2, waypoints: Vec<Point2>) -> HumanConfig {
        HumanConfig {
            id: "h".into(),
            spawn: Pose2::new(spawn, 0.3),
            waypoints,
            speed: 1.0,
            footprint_radius: 0.3,
        }
    }

    #[test]
    fn single_waypoint_at_spawn_is_stationary() {
        let p = Point2::new(2.0, 2.0);
        let mut s = build_patrol(&human(p, vec![p]), &open()).unwrap();
        assert!(s.is_stationary());
        assert_eq!(s.route_length(), 0.0);
        s.advance(5.0);
        assert_eq!(s.pose(), Pose2::new(p, 0.3));
    }

    #[test]
    fn out_and_back_loop() {
        let a = Point2::new(2.0, 2.0);
        let b = Point2::new(5.0, 2.0);
        let mut s = build_patrol(&human(a, vec![a, b]), &open()).unwrap();
        assert_eq!(s.route_length(), 6.0);
        assert_eq!(s.period(), Some(6.0));
        let start = s.pose();
        s.advance(6.0);
        assert_eq!(s.arc_position(), 0.0);
        assert_eq!(s.pose(), start);
    }

    #[test]
    fn zero_dt_is_identity() {
        let a = Point2::new(2.0, 2.0);
        let mut s = build_patrol(&human(a, vec![Point2::new(5.0, 2.0)]), &open()).unwrap();
        s.advance(1.3);
        let before = s.clone();
        s.advance(0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn wraps_across_the_seam() {
        let a = Point2::new(2.0, 2.0);
        let b = Point2::new(5.0, 2.0);
        let mut s = build_patrol(&human(a, vec![b]), &open()).unwrap();
        s.set_arc_position(5.9);
        let before = s.pose();
        assert!(before.position.distance(Point2::new(2.1, 2.0)) < 1e-12);
        s.advance(0.2);
        assert!((s.arc_position() - 0.1).abs() < 1e-12);
        let after = s.pose();
        assert!(after.position.distance(Point2::new(2.1, 2.0)) < 1e-12);
        assert!((after.heading - 0.0).abs() < 1e-12);
        assert!((before.heading.abs() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn route_goes_around_obstacles() {
        let block = PolygonObstacle::rectangle(Point2::new(4.0, 1.0), Point2::new(5.0, 6.0)).unwrap();
        let scene =
            Scene::new("b", Aabb::new(Point2::new(0.0, 0.0), Point2::new(10.0, 10.0)), vec![block])
                .unwrap();
        let a = Point2::new(2.0, 3.0);
        let b = Point2::new(7.0, 3.0);
        let s = build_patrol(&human(a, vec![b]), &scene).unwrap();
        let leg = crate::geometry::geodesic_distance(a, b, &scene, 0.3).unwrap();
        let back = crate::geometry::geodesic_distance(b, a, &scene, 0.3).unwrap();
        assert!((s.route_length() - (leg + back)).abs() < 1e-9);
        assert!(s.route().len() > 2);
    }

    #[test]
    fn unreachable_leg_is_named() {
        let wall = PolygonObstacle::rectangle(Point2::new(4.0, 0.0), Point2::new(5.0, 10.0)).unwrap();
        let scene =
            Scene::new("w", Aabb::new(Point2::new(0.0, 0.0), Point2::new(10.0, 10.0)), vec![wall])
                .unwrap();
        let err = build_patrol(&human(Point2::new(2.0, 3.0), vec![Point2::new(2.0, 5.0), Point2::new(7.0, 3.0)]), &scene)
            .unwrap_err();
        assert_eq!(err.leg, 1);
        assert_eq!(err.source, GeometryError::Unreachable);
    }
}
