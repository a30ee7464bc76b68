use serde::{Deserialize, Serialize};

use super::SimState;
use crate::config::SimConfig;
use crate::geometry::{cast_ray, Circle, HitLabel};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CollisionFlags {
    #[serde(rename = "static")]
    pub static_collision: bool,
    #[serde(rename = "human")]
    pub human_collision: bool,
}

/// Egocentric depth fan with per-ray semantic labels. Rays are ordered from
/// the left edge of the field of view to the right edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub step_index: u32,
    pub depth: Vec<f64>,
    pub semantics: Vec<HitLabel>,
    pub collision_flags: CollisionFlags,
}

impl Observation {
    /// Ray angles relative to the heading, left to right, in radians.
    pub fn ray_offsets(cfg: &SimConfig) -> Vec<f64> {
        let half = cfg.fov.to_radians() / 2.0;
        match cfg.num_rays {
            0 => Vec::new(),
            1 => vec![0.0],
            n => {
                let step = cfg.fov.to_radians() / (n - 1) as f64;
                (0..n).map(|i| half - i as f64 * step).collect()
            }
        }
    }
}

pub fn render_observation(state: &SimState, scene: &Scene, cfg: &SimConfig) -> Observation {
    let humans: Vec<Circle> = state
        .humans
        .iter()
        .map(|h| Circle { center: h.pose.position, radius: h.config.footprint_radius })
        .collect();
    let origin = state.robot.position;
    let (depth, semantics) = Observation::ray_offsets(cfg)
        .into_iter()
        .map(|offset| {
            let hit = cast_ray(origin, state.robot.heading + offset, cfg.max_depth_range, scene, &humans);
            (hit.distance, hit.label)
        })
        .unzip();
    Observation {
        step_index: state.step_count,
        depth,
        semantics,
        collision_flags: CollisionFlags {
            static_collision: state.in_static_collision,
            human_collision: state.in_human_collision,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_spans_the_field_of_view_left_to_right() {
        let cfg = SimConfig::default();
        let offsets = Observation::ray_offsets(&cfg);
        assert_eq!(offsets.len(), 115);
        assert!((offsets[0] - 57.5f64.to_radians()).abs() < 1e-12);
        assert!((offsets[114] + 57.5f64.to_radians()).abs() < 1e-12);
        assert!(offsets[57].abs() < 1e-12);
        assert!(offsets.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn single_ray_looks_straight_ahead() {
        let cfg = SimConfig { num_rays: 1, ..Default::default() };
        assert_eq!(Observation::ray_offsets(&cfg), vec![0.0]);
    }
}
