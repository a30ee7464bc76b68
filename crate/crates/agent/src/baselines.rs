//! Built-in agents.
//!
//! [`RandomAgent`] and [`ReactiveAvoider`] only see what a remote client
//! would see: the observation and the remaining step budget.
//! [`OraclePathFollower`] reads the simulator directly.

use std::str::FromStr;

use adavln_core::geometry::{angle_difference, point_segment_distance, NavGraph, Point2};
use adavln_core::metrics::compute_report;
use adavln_core::sim::SimError;
use adavln_core::{Action, Episode, EpisodeReport, Observation, Scene, SimConfig, Simulator, TrajectoryLog};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Random,
    ReactiveAvoider,
    OraclePathFollower,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown baseline {0:?}; expected random, avoider or oracle")]
pub struct UnknownBaseline(pub String);

impl FromStr for BaselineKind {
    type Err = UnknownBaseline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Self::Random),
            "avoider" | "reactive_avoider" => Ok(Self::ReactiveAvoider),
            "oracle" | "oracle_path_follower" => Ok(Self::OraclePathFollower),
            other => Err(UnknownBaseline(other.to_owned())),
        }
    }
}

/// An agent that decides from the same information a protocol client gets.
pub trait ObservationAgent {
    fn act(&mut self, obs: &Observation, steps_remaining: u32) -> Action;
}

pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl ObservationAgent for RandomAgent {
    fn act(&mut self, _obs: &Observation, steps_remaining: u32) -> Action {
        if steps_remaining <= 1 {
            return Action::Stop;
        }
        *Action::MOTIONS.choose(&mut self.rng).expect("non-empty")
    }
}

/// Walks forward while the central rays are clear, otherwise turns towards
/// the more open side. Never stops on its own.
#[derive(Debug, Clone)]
pub struct ReactiveAvoider {
    offsets: Vec<f64>,
    pub clear_distance: f64,
    pub cone_half_width: f64,
}

impl ReactiveAvoider {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            offsets: Observation::ray_offsets(cfg),
            clear_distance: 0.5,
            cone_half_width: 15f64.to_radians(),
        }
    }
}

impl ObservationAgent for ReactiveAvoider {
    fn act(&mut self, obs: &Observation, _steps_remaining: u32) -> Action {
        let eps = 1e-9;
        let blocked = self
            .offsets
            .iter()
            .zip(&obs.depth)
            .any(|(&o, &d)| o.abs() <= self.cone_half_width + eps && d <= self.clear_distance);
        if !blocked {
            return Action::Forward;
        }
        let mean = |side: f64| {
            let ds: Vec<f64> = self
                .offsets
                .iter()
                .zip(&obs.depth)
                .filter(|(&o, _)| o * side > eps)
                .map(|(_, &d)| d)
                .collect();
            if ds.is_empty() { 0.0 } else { ds.iter().sum::<f64>() / ds.len() as f64 }
        };
        if mean(1.0) >= mean(-1.0) { Action::TurnLeft } else { Action::TurnRight }
    }
}

/// Privileged planner that follows the robot-clearance shortest path.
pub struct OraclePathFollower<'a> {
    graph: NavGraph<'a>,
    fallback: NavGraph<'a>,
    pub heading_tolerance: f64,
    pub human_keepout: f64,
    pause_left_next: bool,
    turning: bool,
}

/// Extra clearance the oracle keeps from walls on top of the footprint.
pub const ORACLE_MARGIN: f64 = 0.06;

impl<'a> OraclePathFollower<'a> {
    pub fn new(scene: &'a Scene, cfg: &SimConfig) -> Self {
        Self {
            graph: NavGraph::build(scene, cfg.robot_footprint_radius + ORACLE_MARGIN),
            fallback: NavGraph::build(scene, cfg.robot_footprint_radius),
            heading_tolerance: 7.5f64.to_radians(),
            human_keepout: 0.8,
            pause_left_next: true,
            turning: true,
        }
    }

    fn plan(&self, from: Point2, goal: Point2) -> Vec<Point2> {
        self.graph
            .shortest_path(from, goal)
            .or_else(|_| self.fallback.shortest_path(from, goal))
            .unwrap_or_else(|_| vec![from, goal])
    }

    pub fn act(&mut self, sim: &Simulator) -> Action {
        let cfg = sim.config();
        let ep = sim.episode();
        let robot = sim.state().robot;
        let pos = robot.position;
        let step = cfg.forward_step;
        let to_goal = pos.distance(ep.goal);
        let within = to_goal <= ep.success_radius;
        if within && (to_goal <= step / 2.0 || sim.steps_remaining() <= 1) {
            return Action::Stop;
        }

        let path = self.plan(pos, ep.goal);
        let target = path
            .iter()
            .skip(1)
            .find(|p| p.distance(pos) > step / 2.0)
            .copied()
            .unwrap_or(ep.goal);
        if target.distance(pos) <= step / 2.0 {
            // nothing left to walk towards
            return Action::Stop;
        }
        let error = angle_difference((target - pos).angle(), robot.heading);
        let ahead = pos + robot.direction() * step;
        // once moving, small drift past the tolerance is tolerated while the
        // step stays inside the planner margin, which avoids a turn per step
        let drifting = !self.turning
            && error.abs() <= 2.0 * self.heading_tolerance + 1e-9
            && self.graph.segment_is_free(pos, ahead);
        if error.abs() > self.heading_tolerance + 1e-9 && !drifting {
            self.turning = true;
            self.pause_left_next = true;
            return if error > 0.0 { Action::TurnLeft } else { Action::TurnRight };
        }
        self.turning = false;

        let human_near = sim
            .state()
            .humans
            .iter()
            .any(|h| point_segment_distance(h.pose.position, pos, ahead) <= self.human_keepout);
        if human_near {
            let a = if self.pause_left_next { Action::TurnLeft } else { Action::TurnRight };
            self.pause_left_next = !self.pause_left_next;
            self.turning = true;
            return a;
        }
        self.pause_left_next = true;
        Action::Forward
    }
}

#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub report: EpisodeReport,
    pub log: TrajectoryLog,
    pub actions: Vec<Action>,
}

/// Runs one episode in-process with a built-in agent.
pub fn run_baseline(
    kind: BaselineKind,
    ep: &Episode,
    scene: &Scene,
    cfg: &SimConfig,
    seed: u64,
) -> Result<BaselineRun, SimError> {
    let (mut sim, mut obs) = Simulator::reset(ep, scene, cfg)?;
    let mut actions = Vec::new();
    let mut random = RandomAgent::new(seed);
    let mut avoider = ReactiveAvoider::new(cfg);
    let mut oracle = (kind == BaselineKind::OraclePathFollower).then(|| OraclePathFollower::new(scene, cfg));
    while !sim.state().episode_over {
        let remaining = sim.steps_remaining();
        let action = match kind {
            BaselineKind::Random => random.act(&obs, remaining),
            BaselineKind::ReactiveAvoider => avoider.act(&obs, remaining),
            BaselineKind::OraclePathFollower => oracle.as_mut().expect("built above").act(&sim),
        };
        actions.push(action);
        obs = sim.execute(action)?;
    }
    let log = sim.trajectory_log();
    let report = compute_report(&log, ep, scene).expect("log matches its own scene");
    Ok(BaselineRun { report, log, actions })
}
