//! Line-delimited trajectory log.
//!
//! Every line is one JSON object tagged by `"type"`:
//!
//! 1. `header`: format tag, the full episode, scene id and the run config;
//! 2. `tick`: one per simulation tick, in tick order starting at 1;
//! 3. `end`: how the episode ended.
//!
//! Field order within each line is fixed. A log without its `end` line is
//! treated as truncated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::EndReason;
use crate::config::SimConfig;
use crate::episode::Episode;
use crate::geometry::Pose2;
use crate::kinematics::Action;

pub const LOG_FORMAT: &str = "adavln-trajectory/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub tick: u64,
    pub time: f64,
    pub robot: Pose2,
    pub humans: Vec<Pose2>,
    pub static_collision: bool,
    pub human_collision: bool,
    /// A forward motion was stopped by contact during the current action.
    pub blocked: bool,
    /// `None` while the robot idles between actions.
    pub action: Option<Action>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub scene_id: String,
    pub episode: Episode,
    pub config: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEnd {
    pub end_reason: EndReason,
    pub steps_used: u32,
    pub ticks: u64,
    pub sim_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LogLine {
    Header(LogHeader),
    Tick(TrajectoryRecord),
    End(LogEnd),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("log is truncated; {}", match last_tick {
        Some(t) => format!("last valid tick is {t}"),
        None => "no tick records".to_owned(),
    })]
    Truncated { last_tick: Option<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub header: LogHeader,
    pub records: Vec<TrajectoryRecord>,
    pub end: LogEnd,
}

impl TrajectoryLog {
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &LogLine| {
            out.push_str(&serde_json::to_string(line).expect("log line serializes"));
            out.push('\n');
        };
        push(&LogLine::Header(self.header.clone()));
        for r in &self.records {
            push(&LogLine::Tick(r.clone()));
        }
        push(&LogLine::End(self.end.clone()));
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, LogError> {
        let mut header = None;
        let mut records: Vec<TrajectoryRecord> = Vec::new();
        let mut end = None;
        let last_line = text.lines().count();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| LogError::Malformed { line, message };
            if end.is_some() {
                return Err(malformed("content after end record".into()));
            }
            let parsed: LogLine = match serde_json::from_str(raw) {
                Ok(l) => l,
                // a cut-off final line is a truncation, not corruption
                Err(e) if e.is_eof() && line == last_line => {
                    return Err(LogError::Truncated { last_tick: records.last().map(|r| r.tick) })
                }
                Err(e) => return Err(malformed(e.to_string())),
            };
            match parsed {
                LogLine::Header(h) => {
                    if header.is_some() || line != 1 {
                        return Err(malformed("header must be the first line".into()));
                    }
                    if h.format != LOG_FORMAT {
                        return Err(malformed(format!("unsupported log format {:?}", h.format)));
                    }
                    header = Some(h);
                }
                LogLine::Tick(r) => {
                    if header.is_none() {
                        return Err(malformed("tick before header".into()));
                    }
                    let expected = records.last().map_or(1, |p| p.tick + 1);
                    if r.tick != expected {
                        return Err(malformed(format!("expected tick {expected}, found {}", r.tick)));
                    }
                    records.push(r);
                }
                LogLine::End(e) => {
                    if header.is_none() {
                        return Err(malformed("end before header".into()));
                    }
                    if e.ticks != records.len() as u64 {
                        return Err(malformed(format!(
                            "end record counts {} ticks, log has {}",
                            e.ticks,
                            records.len()
                        )));
                    }
                    end = Some(e);
                }
            }
        }
        let header = header.ok_or(LogError::Truncated { last_tick: None })?;
        let end = end.ok_or(LogError::Truncated { last_tick: records.last().map(|r| r.tick) })?;
        Ok(Self { header, records, end })
    }
}
