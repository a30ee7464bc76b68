//! Clearance-aware visibility graph and geodesic queries.
//!
//! Obstacles are grown by the disc radius with straight facets that are
//! tangent to the true rounded offset, so every facet corner lies slightly
//! outside the disc's configuration-space obstacle. A corner spanning more
//! than 45 degrees of turn is split into several facets. Graph edges are
//! accepted when the segment keeps the full clearance from every polygon and
//! from the scene bounds, which is an exact test rather than a test against
//! the grown polygons.

use std::f64::consts::FRAC_PI_4;

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};

use super::collision::{point_polygon_distance, segment_polygon_distance};
use super::{GeometryError, Point2};
use crate::scene::Scene;

/// Slack on clearance comparisons; corner nodes are placed this far beyond it.
const CLEARANCE_SLACK: f64 = 1e-9;

/// Visibility graph over clearance-grown obstacle corners.
#[derive(Debug, Clone)]
pub struct NavGraph<'a> {
    scene: &'a Scene,
    clearance: f64,
    nodes: Vec<Point2>,
    edges: Vec<(usize, usize, f64)>,
}

impl<'a> NavGraph<'a> {
    pub fn build(scene: &'a Scene, clearance: f64) -> Self {
        let mut graph = NavGraph { scene, clearance, nodes: Vec::new(), edges: Vec::new() };
        let offset = clearance + 2.0 * CLEARANCE_SLACK;
        let candidates: Vec<Point2> = scene
            .obstacles()
            .iter()
            .flat_map(|p| corner_facets(p.vertices(), offset))
            .collect();
        graph.nodes = candidates.into_iter().filter(|&p| graph.is_free(p)).collect();
        for i in 0..graph.nodes.len() {
            for j in (i + 1)..graph.nodes.len() {
                let (a, b) = (graph.nodes[i], graph.nodes[j]);
                if graph.segment_is_free(a, b) {
                    graph.edges.push((i, j, a.distance(b)));
                }
            }
        }
        graph
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    /// Free distance from `p` to the nearest static geometry (bounds included).
    pub fn static_clearance(&self, p: Point2) -> f64 {
        static_clearance(self.scene, p)
    }

    pub fn is_free(&self, p: Point2) -> bool {
        p.is_finite() && self.static_clearance(p) >= self.clearance - CLEARANCE_SLACK
    }

    /// Whether a disc of the graph's clearance can sweep from `a` to `b`.
    pub fn segment_is_free(&self, a: Point2, b: Point2) -> bool {
        let inner = self.scene.bounds().shrunk(self.clearance - CLEARANCE_SLACK);
        // the shrunk bounds are convex, so endpoint containment suffices
        if !inner.contains(a) || !inner.contains(b) {
            return false;
        }
        let limit = self.clearance - CLEARANCE_SLACK;
        self.scene.obstacles().iter().all(|poly| {
            let bb = poly.bounding_box();
            let far = a.x.max(b.x) < bb.min.x - limit
                || a.x.min(b.x) > bb.max.x + limit
                || a.y.max(b.y) < bb.min.y - limit
                || a.y.min(b.y) > bb.max.y + limit;
            far || segment_polygon_distance(a, b, poly) >= limit
        })
    }

    /// Shortest clearance-free polyline from `a` to `b`.
    pub fn shortest_path(&self, a: Point2, b: Point2) -> Result<Vec<Point2>, GeometryError> {
        if !self.is_free(a) {
            return Err(GeometryError::InCollision { point: a });
        }
        if !self.is_free(b) {
            return Err(GeometryError::InCollision { point: b });
        }
        if a == b {
            return Ok(vec![a]);
        }
        if self.segment_is_free(a, b) {
            return Ok(vec![a, b]);
        }

        let mut graph: UnGraph<Point2, f64> = UnGraph::with_capacity(self.nodes.len() + 2, 0);
        for &n in &self.nodes {
            graph.add_node(n);
        }
        for &(i, j, w) in &self.edges {
            graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), w);
        }
        let start = graph.add_node(a);
        let goal = graph.add_node(b);
        for (i, &n) in self.nodes.iter().enumerate() {
            if self.segment_is_free(a, n) {
                graph.add_edge(start, NodeIndex::new(i), a.distance(n));
            }
            if self.segment_is_free(n, b) {
                graph.add_edge(NodeIndex::new(i), goal, n.distance(b));
            }
        }
        let (_, route) = astar(
            &graph,
            start,
            |n| n == goal,
            |e| *e.weight(),
            |n| graph[n].distance(b),
        )
        .ok_or(GeometryError::Unreachable)?;
        Ok(route.into_iter().map(|n| graph[n]).collect())
    }

    pub fn distance(&self, a: Point2, b: Point2) -> Result<f64, GeometryError> {
        self.shortest_path(a, b).map(|p| polyline_length(&p))
    }
}

/// Free distance from `p` to the nearest obstacle or bounds side.
pub fn static_clearance(scene: &Scene, p: Point2) -> f64 {
    scene
        .obstacles()
        .iter()
        .map(|poly| point_polygon_distance(p, poly))
        .fold(scene.bounds().inner_clearance(p), f64::min)
}

/// Length of the shortest path for a disc of radius `clearance`.
pub fn geodesic_distance(
    a: Point2,
    b: Point2,
    scene: &Scene,
    clearance: f64,
) -> Result<f64, GeometryError> {
    NavGraph::build(scene, clearance).distance(a, b)
}

/// Vertices of the shortest path for a disc of radius `clearance`.
pub fn shortest_path_waypoints(
    a: Point2,
    b: Point2,
    scene: &Scene,
    clearance: f64,
) -> Result<Vec<Point2>, GeometryError> {
    NavGraph::build(scene, clearance).shortest_path(a, b)
}

pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Facet corners of the outward offset at each convex vertex of a
/// counter-clockwise ring. Reflex vertices contribute nothing: shortest
/// paths only bend around convex corners.
fn corner_facets(ring: &[Point2], offset: f64) -> Vec<Point2> {
    let n = ring.len();
    let mut out = Vec::new();
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let v = ring[i];
        let next = ring[(i + 1) % n];
        let e_in = v - prev;
        let e_out = next - v;
        if e_in.cross(e_out) <= 0.0 {
            continue;
        }
        // outward normals of a CCW ring point to the right of each edge
        let n_in = Point2::new(e_in.y, -e_in.x).normalized();
        let n_out = Point2::new(e_out.y, -e_out.x).normalized();
        let turn = n_in.cross(n_out).atan2(n_in.dot(n_out));
        let facets = (turn / FRAC_PI_4).ceil().max(1.0) as usize;
        let half = turn / (2.0 * facets as f64);
        let reach = offset / half.cos();
        let base = n_in.angle();
        for j in 0..facets {
            let angle = base + (2 * j + 1) as f64 * half;
            out.push(v + Point2::from_angle(angle) * reach);
        }
    }
    out
}
