//! Agent side of the simulator: the `adavln/1` wire protocol, a lockstep
//! episode server for external agents and the built-in baseline agents.

pub mod baselines;
pub mod protocol;
pub mod server;
pub mod telemetry;

pub use baselines::{run_baseline, BaselineKind, BaselineRun, OraclePathFollower};
pub use protocol::{Message, PROTOCOL_VERSION};
pub use server::{run_session, serve_episode, ServeOptions, SessionOutcome, Transport};
