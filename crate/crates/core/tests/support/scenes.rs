use adavln_core::geometry::{Aabb, Point2, PolygonObstacle};
use adavln_core::Scene;
use rand::Rng;

use super::grid::oracle_clearance;

/// Open box of `size` x `size` meters with up to five axis-aligned rectangles.
pub fn random_rect_scene<R: Rng>(rng: &mut R, id: &str, size: f64) -> Scene {
    let n = rng.gen_range(1..=5);
    let obstacles = (0..n)
        .map(|_| {
            let w = rng.gen_range(0.2..size * 0.4);
            let h = rng.gen_range(0.2..size * 0.4);
            let x = rng.gen_range(0.0..size - w);
            let y = rng.gen_range(0.0..size - h);
            PolygonObstacle::rectangle(Point2::new(x, y), Point2::new(x + w, y + h)).unwrap()
        })
        .collect();
    Scene::new(id, Aabb::new(Point2::new(0.0, 0.0), Point2::new(size, size)), obstacles).unwrap()
}

/// A point with at least `clearance + margin` of free space around it.
pub fn random_free_point<R: Rng>(rng: &mut R, scene: &Scene, clearance: f64, margin: f64) -> Point2 {
    let b = scene.bounds();
    loop {
        let p = Point2::new(rng.gen_range(b.min.x..b.max.x), rng.gen_range(b.min.y..b.max.y));
        if oracle_clearance(scene, p) >= clearance + margin {
            return p;
        }
    }
}
