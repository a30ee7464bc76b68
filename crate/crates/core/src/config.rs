use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config field `{field}` must be positive and finite, got {value}")]
pub struct ConfigError {
    pub field: &'static str,
    pub value: f64,
}

/// Physical and sensing constants for a run. Angles are in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Simulation ticks per second.
    pub tick_rate: f64,
    pub robot_footprint_radius: f64,
    pub wheel_radius: f64,
    /// Distance between the two drive wheels.
    pub wheel_base: f64,
    /// Linear speed during a forward action, m/s.
    pub forward_speed: f64,
    /// Body yaw rate during a turn action, deg/s.
    pub turn_speed: f64,
    /// Distance covered by one forward action.
    pub forward_step: f64,
    /// Heading change of one turn action.
    pub turn_step: f64,
    /// Horizontal field of view of the depth fan.
    pub fov: f64,
    pub num_rays: usize,
    pub max_depth_range: f64,
    /// Pause the world while the agent is deciding.
    pub freeze_time: bool,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tick_rate: 60.0,
            robot_footprint_radius: 0.12,
            wheel_radius: 0.035,
            wheel_base: 0.1,
            forward_speed: 0.5,
            turn_speed: 30.0,
            forward_step: 0.25,
            turn_step: 15.0,
            fov: 115.0,
            num_rays: 115,
            max_depth_range: 10.0,
            freeze_time: true,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("tick_rate", self.tick_rate),
            ("robot_footprint_radius", self.robot_footprint_radius),
            ("wheel_radius", self.wheel_radius),
            ("wheel_base", self.wheel_base),
            ("forward_speed", self.forward_speed),
            ("turn_speed", self.turn_speed),
            ("forward_step", self.forward_step),
            ("turn_step", self.turn_step),
            ("fov", self.fov),
            ("num_rays", self.num_rays as f64),
            ("max_depth_range", self.max_depth_range),
        ];
        for (field, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError { field, value });
            }
        }
        Ok(())
    }

    pub fn tick_duration(&self) -> f64 {
        1.0 / self.tick_rate
    }

    pub fn forward_duration(&self) -> f64 {
        self.forward_step / self.forward_speed
    }

    pub fn turn_duration(&self) -> f64 {
        self.turn_step / self.turn_speed
    }
}
