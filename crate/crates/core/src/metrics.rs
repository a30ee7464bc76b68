//! Per-episode and aggregate navigation metrics.
//!
//! Collision ratios are tick counts over the total number of ticks:
//! ENC counts ticks in contact with static geometry, HNC ticks in contact
//! with a human, CNC ticks with either (a tick with both counts once).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::episode::Episode;
use crate::geometry::{NavGraph, Point2};
use crate::scene::Scene;
use crate::sim::{EndReason, LogError, TrajectoryLog};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("log belongs to scene {log:?}, not {given:?}")]
    SceneMismatch { log: String, given: String },
    #[error("cannot aggregate an empty report list")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub episode_id: String,
    pub enc: f64,
    pub hnc: f64,
    pub cnc: f64,
    pub success: bool,
    pub nav_error: f64,
    pub spl: f64,
    pub path_length: f64,
    pub sim_duration: f64,
    pub steps_used: u32,
    pub end_reason: EndReason,
    /// False when the episode was cut short by an agent or protocol failure.
    #[serde(default = "yes")]
    pub complete: bool,
}

fn yes() -> bool {
    true
}

/// Shortest-path distance for the robot footprint, falling back to the
/// straight line when the point cannot be routed (e.g. it is wedged closer
/// to a wall than the planner's clearance).
fn robot_distance(graph: &NavGraph<'_>, a: Point2, b: Point2) -> f64 {
    graph.distance(a, b).unwrap_or_else(|_| a.distance(b))
}

pub fn compute_report(
    log: &TrajectoryLog,
    ep: &Episode,
    scene: &Scene,
) -> Result<EpisodeReport, MetricsError> {
    if log.header.scene_id != scene.id() {
        return Err(MetricsError::SceneMismatch {
            log: log.header.scene_id.clone(),
            given: scene.id().to_owned(),
        });
    }
    let ticks = log.records.len();
    let (mut env, mut hum, mut any) = (0usize, 0usize, 0usize);
    for r in &log.records {
        env += r.static_collision as usize;
        hum += r.human_collision as usize;
        any += (r.static_collision || r.human_collision) as usize;
    }
    let ratio = |n: usize| if ticks == 0 { 0.0 } else { n as f64 / ticks as f64 };

    let mut path_length = 0.0;
    let mut prev = ep.start.position;
    for r in &log.records {
        path_length += prev.distance(r.robot.position);
        prev = r.robot.position;
    }
    let final_position = prev;

    let graph = NavGraph::build(scene, log.header.config.robot_footprint_radius);
    let nav_error = robot_distance(&graph, final_position, ep.goal);
    let success = nav_error <= ep.success_radius && log.end.end_reason == EndReason::Stopped;
    let optimal = robot_distance(&graph, ep.start.position, ep.goal);
    let spl = if !success {
        0.0
    } else if optimal >= path_length {
        1.0
    } else {
        optimal / path_length
    };

    Ok(EpisodeReport {
        episode_id: ep.id.clone(),
        enc: ratio(env),
        hnc: ratio(hum),
        cnc: ratio(any),
        success,
        nav_error,
        spl,
        path_length,
        sim_duration: log.end.sim_time,
        steps_used: log.end.steps_used,
        end_reason: log.end.end_reason,
        complete: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub episodes: usize,
    pub enc: f64,
    pub hnc: f64,
    pub cnc: f64,
    pub success_rate: f64,
    pub nav_error: f64,
    pub spl: f64,
    pub path_length: f64,
}

/// Unweighted means over the reports.
pub fn aggregate(reports: &[EpisodeReport]) -> Result<Summary, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&EpisodeReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Ok(Summary {
        episodes: reports.len(),
        enc: mean(|r| r.enc),
        hnc: mean(|r| r.hnc),
        cnc: mean(|r| r.cnc),
        success_rate: mean(|r| r.success as u8 as f64),
        nav_error: mean(|r| r.nav_error),
        spl: mean(|r| r.spl),
        path_length: mean(|r| r.path_length),
    })
}

/// Two-decimal display with ties rounded away from zero.
pub fn round2(x: f64) -> String {
    let scaled = (x.abs() * 100.0 + 0.5).floor() / 100.0;
    let v = if x < 0.0 && scaled != 0.0 { -scaled } else { scaled };
    format!("{v:.2}")
}

pub const TABLE_COLUMNS: [&str; 8] =
    ["Episode", "ENC", "HNC", "CNC", "Success", "NavErr", "SPL", "PathLen"];

fn row_cells(r: &EpisodeReport) -> [String; 8] {
    [
        r.episode_id.clone(),
        round2(r.enc),
        round2(r.hnc),
        round2(r.cnc),
        if r.success { "yes".into() } else { "no".into() },
        round2(r.nav_error),
        round2(r.spl),
        round2(r.path_length),
    ]
}

fn summary_cells(s: &Summary) -> [String; 8] {
    [
        "Average".into(),
        round2(s.enc),
        round2(s.hnc),
        round2(s.cnc),
        round2(s.success_rate),
        round2(s.nav_error),
        round2(s.spl),
        round2(s.path_length),
    ]
}

/// Fixed-width text table with an `Average` footer row.
pub fn format_table(reports: &[EpisodeReport], summary: &Summary) -> String {
    let mut rows: Vec<[String; 8]> = vec![TABLE_COLUMNS.map(String::from)];
    rows.extend(reports.iter().map(row_cells));
    rows.push(summary_cells(summary));
    let widths: Vec<usize> =
        (0..8).map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i == rows.len() - 1 || i == 1 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "{}", rule.join("  "));
        }
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| if c == 0 { format!("{v:<w$}", w = widths[c]) } else { format!("{v:>w$}", w = widths[c]) })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn format_csv(reports: &[EpisodeReport], summary: &Summary) -> String {
    let mut out = TABLE_COLUMNS.join(",");
    out.push('\n');
    for cells in reports.iter().map(row_cells).chain(std::iter::once(summary_cells(summary))) {
        let line: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
