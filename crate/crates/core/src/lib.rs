//! Deterministic top-down simulator for instruction-following navigation
//! among patrolling humans.
//!
//! A differential-drive robot executes four discrete actions (turn left,
//! turn right, forward, stop) in a 2D polygon world. Humans loop along
//! patrol routes. Runs are scored by the fraction of time spent in collision
//! and by the usual goal-reaching metrics.

pub mod config;
pub mod episode;
pub mod geometry;
pub mod kinematics;
pub mod metrics;
pub mod patrol;
pub mod scene;
pub mod sim;

pub use config::SimConfig;
pub use episode::{load_episodes, validate_interference, Episode, HumanConfig};
pub use geometry::{Point2, Pose2};
pub use kinematics::Action;
pub use metrics::{aggregate, compute_report, EpisodeReport, Summary};
pub use scene::{load_scene, Scene, SceneLibrary};
pub use sim::{EndReason, Observation, SimState, Simulator, TrajectoryLog};
