//! The `adavln/1` wire protocol.
//!
//! Every message is a single JSON object on its own line, tagged by `kind`.
//! The server speaks first (`hello`, then `episode_start`) and then
//! alternates `observation` / `action_command` until it sends
//! `episode_end`. A client may send its own `hello` before its first
//! command; the server checks the protocol string and otherwise ignores it.

use adavln_core::{Action, EpisodeReport, Observation, SimConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PROTOCOL_VERSION: &str = "adavln/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Message {
    Hello {
        protocol: String,
        #[serde(default)]
        software: String,
    },
    EpisodeStart {
        episode_id: String,
        scene_id: String,
        instruction: String,
        max_steps: u32,
        config: SimConfig,
    },
    Observation {
        observation: Observation,
        steps_remaining: u32,
    },
    ActionCommand {
        action: Action,
    },
    EpisodeEnd {
        report: EpisodeReport,
    },
    Error {
        message: String,
    },
}

impl Message {
    pub fn hello() -> Self {
        Message::Hello {
            protocol: PROTOCOL_VERSION.to_owned(),
            software: concat!("adavln ", env!("CARGO_PKG_VERSION")).to_owned(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Message::Hello { .. } => "hello",
            Message::EpisodeStart { .. } => "episode_start",
            Message::Observation { .. } => "observation",
            Message::ActionCommand { .. } => "action_command",
            Message::EpisodeEnd { .. } => "episode_end",
            Message::Error { .. } => "error",
        }
    }

    /// One line of JSON, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("protocol messages always serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, DecodeError> {
        let line = line.trim_end_matches(['\r', '\n']);
        if line.contains('\n') {
            return Err(DecodeError("message spans several lines".into()));
        }
        serde_json::from_str(line).map_err(|e| DecodeError(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed message: {0}")]
pub struct DecodeError(pub String);
