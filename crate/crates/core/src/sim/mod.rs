//! The episode engine.
//!
//! Time advances in fixed ticks of `1 / tick_rate`. Each tick moves the
//! humans to their patrol position for the new time, attempts the robot's
//! motion for that tick, recomputes collision flags and appends a
//! [`TrajectoryRecord`].
//!
//! Forward motion that would make the footprint touch a wall or a human is
//! cut at the last free point of the tick (bisection to [`CONTACT_SEARCH_TOL`])
//! and the rest of the action is spent in place. There is no sliding along
//! the contact. Turns always succeed because the footprint is a disc.
//!
//! With freeze-time on, the world only moves inside [`Simulator::execute`].
//! With it off, [`Simulator::idle`] replays the agent's thinking time as
//! extra ticks in which only the humans move.

mod observation;
mod trajectory;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use observation::{render_observation, CollisionFlags, Observation};
pub use trajectory::{LogEnd, LogError, LogHeader, TrajectoryLog, TrajectoryRecord, LOG_FORMAT};

use crate::config::{ConfigError, SimConfig};
use crate::episode::{validate_episode, Episode, EpisodeProblem, HumanConfig};
use crate::geometry::{static_clearance, Point2, Pose2};
use crate::kinematics::{action_to_wheels, integrate_pose, Action, WheelCommand};
use crate::patrol::{build_patrol, PatrolState};
use crate::scene::Scene;

/// Resolution of the contact bisection along a blocked forward substep, meters.
pub const CONTACT_SEARCH_TOL: f64 = 1e-4;
/// A blocked forward push within this gap of a wall counts as static collision.
pub const CONTACT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    #[default]
    None,
    Stopped,
    StepLimit,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("episode is over")]
    EpisodeOver,
    #[error("episode {0:?} targets scene {1:?} but scene {2:?} was given")]
    SceneMismatch(String, String, String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Episode(#[from] EpisodeProblem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HumanState {
    pub config: HumanConfig,
    pub patrol: PatrolState,
    pub pose: Pose2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub sim_time: f64,
    pub tick_index: u64,
    pub robot: Pose2,
    pub humans: Vec<HumanState>,
    /// Actions issued so far, `Stop` included.
    pub step_count: u32,
    pub in_static_collision: bool,
    pub in_human_collision: bool,
    pub episode_over: bool,
    pub end_reason: EndReason,
}

#[derive(Debug, Clone)]
pub struct Simulator {
    scene: Scene,
    episode: Episode,
    cfg: SimConfig,
    state: SimState,
    records: Vec<TrajectoryRecord>,
    idle_seconds: f64,
    idle_ticks: u64,
}

impl Simulator {
    /// Spawns the robot and humans for `episode` and renders the first observation.
    pub fn reset(
        episode: &Episode,
        scene: &Scene,
        cfg: &SimConfig,
    ) -> Result<(Self, Observation), SimError> {
        cfg.validate()?;
        if episode.scene_id != scene.id() {
            return Err(SimError::SceneMismatch(
                episode.id.clone(),
                episode.scene_id.clone(),
                scene.id().to_owned(),
            ));
        }
        validate_episode(episode, scene, cfg)?;
        let humans = episode
            .humans
            .iter()
            .map(|h| {
                let patrol = build_patrol(h, scene).map_err(EpisodeProblem::from)?;
                let pose = patrol.pose();
                Ok(HumanState { config: h.clone(), patrol, pose })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        let mut sim = Simulator {
            scene: scene.clone(),
            episode: episode.clone(),
            cfg: cfg.clone(),
            state: SimState {
                sim_time: 0.0,
                tick_index: 0,
                robot: episode.start,
                humans,
                step_count: 0,
                in_static_collision: false,
                in_human_collision: false,
                episode_over: false,
                end_reason: EndReason::None,
            },
            records: Vec::new(),
            idle_seconds: 0.0,
            idle_ticks: 0,
        };
        let (s, h) = sim.collision_flags(false);
        sim.state.in_static_collision = s;
        sim.state.in_human_collision = h;
        let obs = sim.observe();
        Ok((sim, obs))
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn records(&self) -> &[TrajectoryRecord] {
        &self.records
    }

    pub fn steps_remaining(&self) -> u32 {
        self.episode.max_steps.saturating_sub(self.state.step_count)
    }

    pub fn observe(&self) -> Observation {
        render_observation(&self.state, &self.scene, &self.cfg)
    }

    /// Runs one action to completion and returns the observation after it.
    pub fn execute(&mut self, action: Action) -> Result<Observation, SimError> {
        if self.state.episode_over {
            return Err(SimError::EpisodeOver);
        }
        match action_to_wheels(action, &self.cfg) {
            Err(_) => {
                self.state.episode_over = true;
                self.state.end_reason = EndReason::Stopped;
            }
            Ok(cmd) => self.run_motion(action, &cmd),
        }
        self.state.step_count += 1;
        if !self.state.episode_over && self.state.step_count >= self.episode.max_steps {
            self.state.episode_over = true;
            self.state.end_reason = EndReason::StepLimit;
        }
        Ok(self.observe())
    }

    /// Accounts for wall-clock time spent waiting on the agent. A no-op with
    /// freeze-time on; otherwise whole ticks of elapsed time are simulated
    /// with the robot holding still, and the remainder carries over.
    pub fn idle(&mut self, elapsed: Duration) {
        if self.cfg.freeze_time || self.state.episode_over {
            return;
        }
        self.idle_seconds += elapsed.as_secs_f64();
        let due = (self.idle_seconds * self.cfg.tick_rate + 1e-9).floor() as u64;
        while self.idle_ticks < due {
            self.idle_ticks += 1;
            self.begin_tick();
            let (s, h) = self.collision_flags(false);
            self.finish_tick(s, h, false, None);
        }
    }

    /// Packs the run so far into a log. Meaningful once the episode is over,
    /// but usable mid-episode for inspection.
    pub fn trajectory_log(&self) -> TrajectoryLog {
        TrajectoryLog {
            header: LogHeader {
                format: LOG_FORMAT.to_owned(),
                scene_id: self.scene.id().to_owned(),
                episode: self.episode.clone(),
                config: self.cfg.clone(),
            },
            records: self.records.clone(),
            end: LogEnd {
                end_reason: self.state.end_reason,
                steps_used: self.state.step_count,
                ticks: self.state.tick_index,
                sim_time: self.state.sim_time,
            },
        }
    }

    fn run_motion(&mut self, action: Action, cmd: &WheelCommand) {
        let dt = self.cfg.tick_duration();
        let ticks = (cmd.duration * self.cfg.tick_rate - 1e-9).ceil().max(1.0) as u64;
        let forward = action == Action::Forward;
        let mut blocked = false;
        let mut elapsed = 0.0;
        for k in 0..ticks {
            self.begin_tick();
            // the last tick only covers what is left of the action
            let motion_dt = if k + 1 == ticks { cmd.duration - elapsed } else { dt };
            elapsed += dt;
            if forward {
                if !blocked {
                    blocked = self.try_forward(cmd, motion_dt);
                }
            } else if motion_dt > 0.0 {
                self.state.robot = integrate_pose(self.state.robot, cmd, motion_dt, &self.cfg);
            }
            let (s, h) = self.collision_flags(forward && blocked);
            self.finish_tick(s, h, forward && blocked, Some(action));
        }
    }

    /// Moves forward for `dt`, stopping short of contact. Returns true if blocked.
    fn try_forward(&mut self, cmd: &WheelCommand, dt: f64) -> bool {
        let start = self.state.robot;
        if dt <= 0.0 {
            return false;
        }
        let target = integrate_pose(start, cmd, dt, &self.cfg);
        if !self.footprint_touches(target.position) {
            self.state.robot = target;
            return false;
        }
        if self.footprint_touches(start.position) {
            return true;
        }
        let speed = cmd.linear_velocity(&self.cfg).abs();
        let (mut lo, mut hi) = (0.0, dt);
        while (hi - lo) * speed > CONTACT_SEARCH_TOL {
            let mid = 0.5 * (lo + hi);
            if self.footprint_touches(integrate_pose(start, cmd, mid, &self.cfg).position) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if lo > 0.0 {
            self.state.robot = integrate_pose(start, cmd, lo, &self.cfg);
        }
        true
    }

    fn footprint_touches(&self, p: Point2) -> bool {
        let r = self.cfg.robot_footprint_radius;
        static_clearance(&self.scene, p) <= r
            || self.state.humans.iter().any(|h| {
                p.distance(h.pose.position) <= r + h.config.footprint_radius
            })
    }

    /// (static, human) collision flags at the current robot pose.
    fn collision_flags(&self, pushing_blocked: bool) -> (bool, bool) {
        let r = self.cfg.robot_footprint_radius;
        let p = self.state.robot.position;
        let gap = static_clearance(&self.scene, p);
        let static_hit = gap <= r || (pushing_blocked && gap <= r + CONTACT_EPSILON);
        let human_hit = self
            .state
            .humans
            .iter()
            .any(|h| p.distance(h.pose.position) <= r + h.config.footprint_radius);
        (static_hit, human_hit)
    }

    fn begin_tick(&mut self) {
        self.state.tick_index += 1;
        self.state.sim_time = self.state.tick_index as f64 / self.cfg.tick_rate;
        let t = self.state.sim_time;
        for h in &mut self.state.humans {
            h.patrol.set_elapsed(t);
            h.pose = h.patrol.pose();
        }
    }

    fn finish_tick(&mut self, static_hit: bool, human_hit: bool, blocked: bool, action: Option<Action>) {
        self.state.in_static_collision = static_hit;
        self.state.in_human_collision = human_hit;
        self.records.push(TrajectoryRecord {
            tick: self.state.tick_index,
            time: self.state.sim_time,
            robot: self.state.robot,
            humans: self.state.humans.iter().map(|h| h.pose).collect(),
            static_collision: static_hit,
            human_collision: human_hit,
            blocked,
            action,
        });
    }
}
