use adavln_core::geometry::{Aabb, Point2, Pose2};
use adavln_core::sim::{EndReason, LogEnd, LogHeader, TrajectoryLog, TrajectoryRecord, LOG_FORMAT};
use adavln_core::{Episode, Scene, SimConfig};

/// Collision tick counts for the nine rows of the reference collision table, as
/// (static only, human only, both) out of 100 ticks.
pub const TABLE_ROWS: [(usize, usize, usize); 9] = [
    (77, 1, 0),
    (69, 1, 0),
    (90, 0, 1),
    (93, 0, 0),
    (86, 0, 0),
    (76, 0, 0),
    (0, 0, 0),
    (70, 7, 1),
    (0, 0, 0),
];

pub fn open_scene() -> Scene {
    Scene::new("synthetic", Aabb::new(Point2::new(-5.0, -5.0), Point2::new(5.0, 5.0)), vec![]).unwrap()
}

pub fn still_episode(id: &str) -> Episode {
    Episode {
        id: id.into(),
        scene_id: "synthetic".into(),
        instruction: "stay".into(),
        start: Pose2::default(),
        goal: Point2::new(2.0, 0.0),
        success_radius: 1.0,
        max_steps: 50,
        humans: vec![],
        reference_path: None,
    }
}

/// A log of `total` ticks where the first `static_only` ticks carry only the
/// static flag, the next `human_only` only the human flag and the next
/// `both` carry both.
pub fn synthetic_log(ep: &Episode, static_only: usize, human_only: usize, both: usize, total: usize) -> TrajectoryLog {
    let cfg = SimConfig::default();
    let records = (0..total)
        .map(|i| {
            let (s, h) = if i < static_only {
                (true, false)
            } else if i < static_only + human_only {
                (false, true)
            } else if i < static_only + human_only + both {
                (true, true)
            } else {
                (false, false)
            };
            TrajectoryRecord {
                tick: i as u64 + 1,
                time: (i + 1) as f64 / cfg.tick_rate,
                robot: ep.start,
                humans: vec![],
                static_collision: s,
                human_collision: h,
                blocked: s,
                action: None,
            }
        })
        .collect();
    TrajectoryLog {
        header: LogHeader {
            format: LOG_FORMAT.into(),
            scene_id: ep.scene_id.clone(),
            episode: ep.clone(),
            config: cfg.clone(),
        },
        records,
        end: LogEnd {
            end_reason: EndReason::StepLimit,
            steps_used: 50,
            ticks: total as u64,
            sim_time: total as f64 / cfg.tick_rate,
        },
    }
}
