//! Differential-drive model for the four discrete actions.
//!
//! Wheel angular speeds map to body velocities through
//! `v = r (w_l + w_r) / 2` and `w = r (w_r - w_l) / b`, with wheel radius `r`
//! and wheel base `b`. Poses are integrated in closed form along the arc of
//! constant curvature, so splitting an interval into substeps gives the same
//! result up to rounding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimConfig;
use crate::geometry::{normalize_angle, Point2, Pose2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    TurnLeft,
    TurnRight,
    Forward,
    Stop,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::TurnLeft, Action::TurnRight, Action::Forward, Action::Stop];
    pub const MOTIONS: [Action; 3] = [Action::TurnLeft, Action::TurnRight, Action::Forward];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::TurnLeft => "turn_left",
            Action::TurnRight => "turn_right",
            Action::Forward => "forward",
            Action::Stop => "stop",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown action {0:?}")]
pub struct UnknownAction(pub String);

impl FromStr for Action {
    type Err = UnknownAction;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownAction(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stop has no wheel command")]
pub struct StopHasNoMotion;

/// Constant wheel speeds held for `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelCommand {
    /// rad/s
    pub left_angular_speed: f64,
    /// rad/s
    pub right_angular_speed: f64,
    pub duration: f64,
}

impl WheelCommand {
    pub fn linear_velocity(&self, cfg: &SimConfig) -> f64 {
        cfg.wheel_radius * (self.left_angular_speed + self.right_angular_speed) / 2.0
    }

    pub fn angular_velocity(&self, cfg: &SimConfig) -> f64 {
        cfg.wheel_radius * (self.right_angular_speed - self.left_angular_speed) / cfg.wheel_base
    }
}

pub fn action_to_wheels(action: Action, cfg: &SimConfig) -> Result<WheelCommand, StopHasNoMotion> {
    match action {
        Action::Forward => {
            let w = cfg.forward_speed / cfg.wheel_radius;
            Ok(WheelCommand {
                left_angular_speed: w,
                right_angular_speed: w,
                duration: cfg.forward_duration(),
            })
        }
        Action::TurnLeft | Action::TurnRight => {
            let body_rate = cfg.turn_speed.to_radians();
            let w = body_rate * cfg.wheel_base / (2.0 * cfg.wheel_radius);
            let sign = if action == Action::TurnLeft { 1.0 } else { -1.0 };
            Ok(WheelCommand {
                left_angular_speed: -sign * w,
                right_angular_speed: sign * w,
                duration: cfg.turn_duration(),
            })
        }
        Action::Stop => Err(StopHasNoMotion),
    }
}

/// Advances `pose` by `dt` seconds of `cmd`, following the exact arc.
pub fn integrate_pose(pose: Pose2, cmd: &WheelCommand, dt: f64, cfg: &SimConfig) -> Pose2 {
    debug_assert!(dt >= 0.0);
    let v = cmd.linear_velocity(cfg);
    let w = cmd.angular_velocity(cfg);
    let theta = pose.heading;
    let p = pose.position;
    if w == 0.0 {
        let d = Point2::from_angle(theta) * (v * dt);
        return Pose2 { position: p + d, heading: theta };
    }
    let theta_end = theta + w * dt;
    let position = if v == 0.0 {
        p
    } else {
        let radius = v / w;
        Point2::new(
            p.x + radius * (theta_end.sin() - theta.sin()),
            p.y - radius * (theta_end.cos() - theta.cos()),
        )
    };
    Pose2 { position, heading: normalize_angle(theta_end) }
}
