//! Brute-force geodesic oracle: Dijkstra over a uniform grid.
//!
//! Free space is sampled at cell centres with its own point/polygon distance
//! code so that it shares nothing with the visibility graph. Moves use every
//! primitive offset with components in [-4, 4], which bounds the direction
//! error of a straight line to well under one percent.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use adavln_core::geometry::Point2;
use adavln_core::Scene;

fn seg_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.x + t * abx - p.x, a.y + t * aby - p.y);
    (cx * cx + cy * cy).sqrt()
}

fn inside(p: Point2, ring: &[Point2]) -> bool {
    let mut c = false;
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            c = !c;
        }
    }
    c
}

pub fn oracle_clearance(scene: &Scene, p: Point2) -> f64 {
    let b = scene.bounds();
    let mut d = (p.x - b.min.x).min(b.max.x - p.x).min(p.y - b.min.y).min(b.max.y - p.y);
    for poly in scene.obstacles() {
        let ring = poly.vertices();
        if inside(p, ring) {
            return 0.0;
        }
        let n = ring.len();
        for i in 0..n {
            d = d.min(seg_dist(p, ring[i], ring[(i + 1) % n]));
        }
    }
    d
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

pub struct Grid {
    origin: Point2,
    h: f64,
    nx: usize,
    ny: usize,
    free: Vec<bool>,
}

impl Grid {
    pub fn new(scene: &Scene, clearance: f64, h: f64) -> Self {
        let b = scene.bounds();
        let nx = ((b.max.x - b.min.x) / h).floor() as usize;
        let ny = ((b.max.y - b.min.y) / h).floor() as usize;
        let origin = Point2::new(b.min.x + h / 2.0, b.min.y + h / 2.0);
        let mut free = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let p = Point2::new(origin.x + i as f64 * h, origin.y + j as f64 * h);
                free[j * nx + i] = oracle_clearance(scene, p) >= clearance;
            }
        }
        Self { origin, h, nx, ny, free }
    }

    fn cell(&self, p: Point2) -> (i64, i64) {
        (((p.x - self.origin.x) / self.h).round() as i64, ((p.y - self.origin.y) / self.h).round() as i64)
    }

    fn is_free(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny && self.free[j as usize * self.nx + i as usize]
    }

    fn centre(&self, i: i64, j: i64) -> Point2 {
        Point2::new(self.origin.x + i as f64 * self.h, self.origin.y + j as f64 * self.h)
    }

    /// Grid shortest path length from `a` to `b`, or `None` if the grid
    /// cells are disconnected.
    pub fn distance(&self, a: Point2, b: Point2) -> Option<f64> {
        let moves: Vec<(i64, i64, f64)> = (-4i64..=4)
            .flat_map(|dx| (-4i64..=4).map(move |dy| (dx, dy)))
            .filter(|&(dx, dy)| (dx, dy) != (0, 0) && gcd(dx, dy) == 1)
            .map(|(dx, dy)| (dx, dy, ((dx * dx + dy * dy) as f64).sqrt() * self.h))
            .collect();
        let (si, sj) = self.cell(a);
        let (ti, tj) = self.cell(b);
        if !self.is_free(si, sj) || !self.is_free(ti, tj) {
            return None;
        }
        let idx = |i: i64, j: i64| j as usize * self.nx + i as usize;
        let mut dist = vec![f64::INFINITY; self.nx * self.ny];
        let mut heap = BinaryHeap::new();
        dist[idx(si, sj)] = 0.0;
        // non-negative f64 bit patterns order like the values
        heap.push(Reverse((0f64.to_bits(), si, sj)));
        while let Some(Reverse((bits, i, j))) = heap.pop() {
            let d = f64::from_bits(bits);
            if d > dist[idx(i, j)] {
                continue;
            }
            if (i, j) == (ti, tj) {
                return Some(d + a.distance(self.centre(si, sj)) + b.distance(self.centre(ti, tj)));
            }
            for &(dx, dy, len) in &moves {
                let (ni, nj) = (i + dx, j + dy);
                if !self.is_free(ni, nj) {
                    continue;
                }
                let steps = dx.abs().max(dy.abs());
                let clear = (1..steps).all(|k| {
                    let t = k as f64 / steps as f64;
                    self.is_free(i + (dx as f64 * t).round() as i64, j + (dy as f64 * t).round() as i64)
                });
                if !clear {
                    continue;
                }
                let nd = d + len;
                if nd < dist[idx(ni, nj)] {
                    dist[idx(ni, nj)] = nd;
                    heap.push(Reverse((nd.to_bits(), ni, nj)));
                }
            }
        }
        None
    }
}
