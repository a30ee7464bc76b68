//! Navigation episodes and the episode dataset file.
//!
//! ```json
//! { "episodes": [ {
//!     "id": "ep01", "scene_id": "corridor_a",
//!     "instruction": "Walk down the corridor and stop by the plant.",
//!     "start": { "pos": [1.0, 1.0], "heading_deg": 0.0 },
//!     "goal": [6.0, 1.0], "success_radius": 1.0, "max_steps": 50,
//!     "humans": [ { "id": "h1", "spawn": { "pos": [3, 0.5], "heading_deg": 90 },
//!                   "waypoints": [[3, 0.5], [3, 4.0]], "speed": 1.0, "radius": 0.3 } ],
//!     "reference_path": [[1, 1], [6, 1]]
//! } ] }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimConfig;
use crate::geometry::{
    segment_segment_distance, static_clearance, GeometryError, NavGraph, Point2, Pose2,
};
use crate::patrol::{build_patrol, PatrolError};
use crate::scene::{Scene, SceneError, SceneLibrary};

pub const DEFAULT_MAX_STEPS: u32 = 50;
pub const DEFAULT_SUCCESS_RADIUS: f64 = 1.0;
pub const DEFAULT_HUMAN_RADIUS: f64 = 0.30;
pub const DEFAULT_HUMAN_SPEED: f64 = 1.0;
pub const MAX_HUMAN_SPEED: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanConfig {
    pub id: String,
    #[serde(with = "file_pose")]
    pub spawn: Pose2,
    pub waypoints: Vec<Point2>,
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(rename = "radius", default = "default_human_radius")]
    pub footprint_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: String,
    pub scene_id: String,
    pub instruction: String,
    #[serde(with = "file_pose")]
    pub start: Pose2,
    pub goal: Point2,
    #[serde(default = "default_success_radius")]
    pub success_radius: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u32,
    #[serde(default)]
    pub humans: Vec<HumanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_path: Option<Vec<Point2>>,
}

impl Episode {
    /// Episodes without humans serve as static controls.
    pub fn is_static_control(&self) -> bool {
        self.humans.is_empty()
    }
}

fn default_speed() -> f64 {
    DEFAULT_HUMAN_SPEED
}
fn default_human_radius() -> f64 {
    DEFAULT_HUMAN_RADIUS
}
fn default_success_radius() -> f64 {
    DEFAULT_SUCCESS_RADIUS
}
fn default_max_steps() -> u32 {
    DEFAULT_MAX_STEPS
}

/// `{ "pos": [x, y], "heading_deg": d }` on disk, radians in memory.
mod file_pose {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geometry::{exact_degrees, Point2, Pose2};

    #[derive(Serialize, Deserialize)]
    struct FilePose {
        pos: Point2,
        heading_deg: f64,
    }

    pub fn serialize<S: Serializer>(pose: &Pose2, s: S) -> Result<S::Ok, S::Error> {
        FilePose { pos: pose.position, heading_deg: exact_degrees(pose.heading) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Pose2, D::Error> {
        let f = FilePose::deserialize(d)?;
        Ok(Pose2::new(f.pos, f.heading_deg.to_radians()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EpisodeFile {
    episodes: Vec<Episode>,
}

#[derive(Debug, Error)]
pub enum EpisodeProblem {
    #[error("start is in collision at robot clearance")]
    StartInCollision,
    #[error("goal is in collision at robot clearance")]
    GoalInCollision,
    #[error("goal is unreachable from start")]
    GoalUnreachable,
    #[error("max_steps must be positive")]
    NoSteps,
    #[error("success_radius must be positive and finite, got {0}")]
    BadSuccessRadius(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("human {human:?}: speed must be in (0, {MAX_HUMAN_SPEED}], got {speed}")]
    BadHumanSpeed { human: String, speed: f64 },
    #[error("human {human:?}: radius must be positive, got {radius}")]
    BadHumanRadius { human: String, radius: f64 },
    #[error("human {0:?} has no waypoints")]
    NoWaypoints(String),
    #[error("human {0:?} spawns in collision")]
    HumanSpawnInCollision(String),
    #[error("duplicate human id {0:?}")]
    DuplicateHuman(String),
    #[error(transparent)]
    Patrol(#[from] PatrolError),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("episode file contains no episodes")]
    Empty,
    #[error("duplicate episode id {0:?}")]
    DuplicateEpisode(String),
    #[error("episode {episode:?}: {source}")]
    Scene { episode: String, source: SceneError },
    #[error("episode {episode:?}: {problem}")]
    Invalid { episode: String, problem: EpisodeProblem },
}

/// Checks an episode against its scene at the robot clearance in `cfg`.
pub fn validate_episode(ep: &Episode, scene: &Scene, cfg: &SimConfig) -> Result<(), EpisodeProblem> {
    let finite = ep.start.position.is_finite()
        && ep.start.heading.is_finite()
        && ep.goal.is_finite()
        && ep.humans.iter().all(|h| {
            h.spawn.position.is_finite() && h.waypoints.iter().all(|w| w.is_finite())
        });
    if !finite {
        return Err(EpisodeProblem::NonFinite);
    }
    if ep.max_steps == 0 {
        return Err(EpisodeProblem::NoSteps);
    }
    if !(ep.success_radius > 0.0 && ep.success_radius.is_finite()) {
        return Err(EpisodeProblem::BadSuccessRadius(ep.success_radius));
    }
    let graph = NavGraph::build(scene, cfg.robot_footprint_radius);
    match graph.distance(ep.start.position, ep.goal) {
        Ok(_) => {}
        Err(GeometryError::InCollision { point }) if point == ep.start.position => {
            return Err(EpisodeProblem::StartInCollision)
        }
        Err(GeometryError::InCollision { .. }) => return Err(EpisodeProblem::GoalInCollision),
        Err(_) => return Err(EpisodeProblem::GoalUnreachable),
    }
    let mut seen = std::collections::BTreeSet::new();
    for h in &ep.humans {
        if !seen.insert(h.id.as_str()) {
            return Err(EpisodeProblem::DuplicateHuman(h.id.clone()));
        }
        if !(h.speed > 0.0 && h.speed <= MAX_HUMAN_SPEED) {
            return Err(EpisodeProblem::BadHumanSpeed { human: h.id.clone(), speed: h.speed });
        }
        if !(h.footprint_radius > 0.0 && h.footprint_radius.is_finite()) {
            return Err(EpisodeProblem::BadHumanRadius {
                human: h.id.clone(),
                radius: h.footprint_radius,
            });
        }
        if h.waypoints.is_empty() {
            return Err(EpisodeProblem::NoWaypoints(h.id.clone()));
        }
        if static_clearance(scene, h.spawn.position) < h.footprint_radius - 1e-9 {
            return Err(EpisodeProblem::HumanSpawnInCollision(h.id.clone()));
        }
        build_patrol(h, scene)?;
    }
    Ok(())
}

pub fn parse_episodes(text: &str, path: &Path) -> Result<Vec<Episode>, DatasetError> {
    let file: EpisodeFile = serde_json::from_str(text)
        .map_err(|source| DatasetError::Parse { path: path.to_owned(), source })?;
    Ok(file.episodes)
}

/// Loads and validates an episode file against a scene library.
pub fn load_episodes(
    path: impl AsRef<Path>,
    scenes: &SceneLibrary,
    cfg: &SimConfig,
) -> Result<Vec<Episode>, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.to_owned(), source })?;
    let episodes = parse_episodes(&text, path)?;
    if episodes.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut ids = std::collections::BTreeSet::new();
    for ep in &episodes {
        if !ids.insert(ep.id.as_str()) {
            return Err(DatasetError::DuplicateEpisode(ep.id.clone()));
        }
        let scene = scenes
            .get(&ep.scene_id)
            .map_err(|source| DatasetError::Scene { episode: ep.id.clone(), source })?;
        validate_episode(ep, scene, cfg)
            .map_err(|problem| DatasetError::Invalid { episode: ep.id.clone(), problem })?;
    }
    Ok(episodes)
}

pub fn episodes_to_json(episodes: &[Episode]) -> String {
    serde_json::to_string_pretty(&EpisodeFile { episodes: episodes.to_vec() })
        .expect("episodes serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HumanInterference {
    pub human_id: String,
    pub interferes: bool,
    /// Closest approach between the patrol loop and the robot's start-goal geodesic.
    pub min_distance: f64,
}

/// For each human, whether its patrol corridor (route grown by the human and
/// robot radii) crosses the robot's shortest start-goal path.
pub fn validate_interference(
    ep: &Episode,
    scene: &Scene,
    cfg: &SimConfig,
) -> Result<Vec<HumanInterference>, EpisodeProblem> {
    if ep.humans.is_empty() {
        return Ok(Vec::new());
    }
    let path = NavGraph::build(scene, cfg.robot_footprint_radius)
        .shortest_path(ep.start.position, ep.goal)
        .map_err(|_| EpisodeProblem::GoalUnreachable)?;
    let path_segments: Vec<(Point2, Point2)> = if path.len() == 1 {
        vec![(path[0], path[0])]
    } else {
        path.windows(2).map(|w| (w[0], w[1])).collect()
    };
    ep.humans
        .iter()
        .map(|h| {
            let patrol = build_patrol(h, scene)?;
            let ring = patrol.route();
            let n = ring.len();
            let patrol_segments: Vec<(Point2, Point2)> = if n == 1 {
                vec![(ring[0], ring[0])]
            } else {
                (0..n).map(|i| (ring[i], ring[(i + 1) % n])).collect()
            };
            let min_distance = patrol_segments
                .iter()
                .flat_map(|&(a, b)| {
                    path_segments.iter().map(move |&(c, d)| segment_segment_distance(a, b, c, d))
                })
                .fold(f64::INFINITY, f64::min);
            Ok(HumanInterference {
                human_id: h.id.clone(),
                interferes: min_distance <= h.footprint_radius + cfg.robot_footprint_radius,
                min_distance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, PolygonObstacle};

    fn corridor() -> Scene {
        // two rooms joined by a 1 m gap in a wall at x = 5
        let lower = PolygonObstacle::rectangle(Point2::new(4.9, 0.0), Point2::new(5.1, 2.0)).unwrap();
        let upper = PolygonObstacle::rectangle(Point2::new(4.9, 3.0), Point2::new(5.1, 6.0)).unwrap();
        Scene::new("c", Aabb::new(Point2::new(0.0, 0.0), Point2::new(10.0, 6.0)), vec![lower, upper])
            .unwrap()
    }

    fn episode(goal: Point2, humans: Vec<HumanConfig>) -> Episode {
        Episode {
            id: "e".into(),
            scene_id: "c".into(),
            instruction: "go".into(),
            start: Pose2::new(Point2::new(1.0, 2.5), 0.0),
            goal,
            success_radius: 1.0,
            max_steps: 50,
            humans,
            reference_path: None,
        }
    }

    fn patroller(a: Point2, b: Point2) -> HumanConfig {
        HumanConfig {
            id: "h".into(),
            spawn: Pose2::new(a, 0.0),
            waypoints: vec![b],
            speed: 1.0,
            footprint_radius: 0.3,
        }
    }

    #[test]
    fn goal_inside_wall_is_rejected() {
        let ep = episode(Point2::new(5.0, 1.0), vec![]);
        let err = validate_episode(&ep, &corridor(), &SimConfig::default()).unwrap_err();
        assert!(matches!(err, EpisodeProblem::GoalInCollision));
    }

    #[test]
    fn zero_humans_is_a_valid_static_control() {
        let ep = episode(Point2::new(8.0, 2.5), vec![]);
        validate_episode(&ep, &corridor(), &SimConfig::default()).unwrap();
        assert!(ep.is_static_control());
        assert!(validate_interference(&ep, &corridor(), &SimConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn patrol_across_the_doorway_interferes() {
        // the robot's path passes through the gap around (5, 2.5)
        let h = patroller(Point2::new(6.0, 0.5), Point2::new(6.0, 5.5));
        let ep = episode(Point2::new(8.0, 2.5), vec![h]);
        let report = validate_interference(&ep, &corridor(), &SimConfig::default()).unwrap();
        assert_eq!(report.len(), 1);
        assert!(report[0].interferes);
        assert_eq!(report[0].min_distance, 0.0);
    }

    #[test]
    fn patrol_in_another_room_does_not_interfere() {
        let h = patroller(Point2::new(8.0, 5.0), Point2::new(9.5, 5.0));
        let ep = episode(Point2::new(3.0, 2.5), vec![h]);
        let report = validate_interference(&ep, &corridor(), &SimConfig::default()).unwrap();
        assert!(!report[0].interferes);
        // closest approach is from (8, 5) to the goal (3, 2.5)
        let expected = Point2::new(8.0, 5.0).distance(Point2::new(3.0, 2.5));
        assert!((report[0].min_distance - expected).abs() < 1e-12);
    }

    #[test]
    fn bad_speed_is_rejected() {
        let mut h = patroller(Point2::new(8.0, 5.0), Point2::new(9.5, 5.0));
        h.speed = 3.5;
        let ep = episode(Point2::new(3.0, 2.5), vec![h]);
        let err = validate_episode(&ep, &corridor(), &SimConfig::default()).unwrap_err();
        assert!(matches!(err, EpisodeProblem::BadHumanSpeed { .. }));
    }

    #[test]
    fn unreachable_goal_is_rejected() {
        let wall = PolygonObstacle::rectangle(Point2::new(4.9, 0.0), Point2::new(5.1, 6.0)).unwrap();
        let scene =
            Scene::new("c", Aabb::new(Point2::new(0.0, 0.0), Point2::new(10.0, 6.0)), vec![wall]).unwrap();
        let ep = episode(Point2::new(8.0, 2.5), vec![]);
        let err = validate_episode(&ep, &scene, &SimConfig::default()).unwrap_err();
        assert!(matches!(err, EpisodeProblem::GoalUnreachable));
    }

    #[test]
    fn file_defaults_apply() {
        let eps = parse_episodes(
            r#"{"episodes":[{"id":"a","scene_id":"c","instruction":"x",
                "start":{"pos":[1,2.5],"heading_deg":90},"goal":[8,2.5]}]}"#,
            Path::new("mem"),
        )
        .unwrap();
        assert_eq!(eps[0].max_steps, 50);
        assert_eq!(eps[0].success_radius, 1.0);
        assert!((eps[0].start.heading - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
