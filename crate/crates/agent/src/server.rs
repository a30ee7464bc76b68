//! Lockstep episode server.
//!
//! One agent connection drives one episode. The server sends `hello` and
//! `episode_start`, then an `observation`, and waits for exactly one
//! `action_command` before executing it and sending the next observation.
//! The wait is timed with an injectable [`Clock`]; with freeze-time off the
//! measured wait is replayed in the simulator as idle time.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use adavln_core::metrics::compute_report;
use adavln_core::sim::SimError;
use adavln_core::{Episode, EpisodeReport, Scene, SimConfig, Simulator, TrajectoryLog};
use thiserror::Error;
use tungstenite::{Message as WsMessage, WebSocket};

use crate::protocol::{Message, PROTOCOL_VERSION};
use crate::telemetry::{Telemetry, TelemetrySink};

pub trait Clock: Send + Sync {
    /// Monotonic time since an arbitrary origin.
    fn now(&self) -> Duration;
}

#[derive(Debug)]
pub struct SystemClock(Instant);

impl Default for SystemClock {
    fn default() -> Self {
        Self(Instant::now())
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

/// A clock that only moves when told to.
#[derive(Debug, Clone, Default)]
pub struct ManualClock(Arc<Mutex<Duration>>);

impl ManualClock {
    pub fn advance(&self, by: Duration) {
        *self.0.lock().expect("clock lock") += by;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        *self.0.lock().expect("clock lock")
    }
}

#[derive(Debug, Error)]
pub enum RecvError {
    #[error("timed out")]
    Timeout,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A bidirectional, message-framed connection to one agent.
pub trait Transport {
    fn send(&mut self, msg: &Message) -> io::Result<()>;
    /// Next raw message text; `Ok(None)` once the peer has closed.
    fn recv(&mut self, timeout: Option<Duration>) -> Result<Option<String>, RecvError>;
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}

/// Newline-delimited JSON over TCP.
pub struct LineTransport {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl LineTransport {
    pub fn new(stream: TcpStream) -> io::Result<Self> {
        stream.set_nodelay(true)?;
        Ok(Self { reader: BufReader::new(stream.try_clone()?), writer: stream })
    }
}

impl Transport for LineTransport {
    fn send(&mut self, msg: &Message) -> io::Result<()> {
        let mut line = msg.to_line();
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()
    }

    fn recv(&mut self, timeout: Option<Duration>) -> Result<Option<String>, RecvError> {
        self.reader.get_ref().set_read_timeout(timeout)?;
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => Ok(None),
            Ok(_) => Ok(Some(line)),
            Err(e) if is_timeout(&e) => Err(RecvError::Timeout),
            Err(e) => Err(e.into()),
        }
    }
}

/// One JSON message per WebSocket text frame, for browser clients.
pub struct WsTransport {
    socket: WebSocket<TcpStream>,
}

impl WsTransport {
    pub fn accept(stream: TcpStream) -> io::Result<Self> {
        let socket = tungstenite::accept(stream)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        Ok(Self { socket })
    }
}

fn ws_io(e: tungstenite::Error) -> RecvError {
    match e {
        tungstenite::Error::Io(e) if is_timeout(&e) => RecvError::Timeout,
        tungstenite::Error::Io(e) => RecvError::Io(e),
        other => RecvError::Io(io::Error::new(io::ErrorKind::Other, other.to_string())),
    }
}

impl Transport for WsTransport {
    fn send(&mut self, msg: &Message) -> io::Result<()> {
        self.socket.send(WsMessage::text(msg.to_line())).map_err(|e| match ws_io(e) {
            RecvError::Io(e) => e,
            RecvError::Timeout => io::Error::from(io::ErrorKind::TimedOut),
        })
    }

    fn recv(&mut self, timeout: Option<Duration>) -> Result<Option<String>, RecvError> {
        self.socket.get_ref().set_read_timeout(timeout)?;
        loop {
            match self.socket.read() {
                Ok(WsMessage::Text(t)) => return Ok(Some(t.to_string())),
                Ok(WsMessage::Binary(b)) => return Ok(Some(String::from_utf8_lossy(&b).into_owned())),
                Ok(WsMessage::Close(_)) => return Ok(None),
                Ok(_) => continue,
                Err(tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed) => return Ok(None),
                Err(e) => return Err(ws_io(e)),
            }
        }
    }
}

pub struct ServeOptions {
    /// Longest wait for an `action_command`; `None` waits forever.
    pub command_timeout: Option<Duration>,
    pub clock: Arc<dyn Clock>,
    pub telemetry: Option<Box<dyn TelemetrySink>>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self { command_timeout: None, clock: Arc::new(SystemClock::default()), telemetry: None }
    }
}

#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub report: EpisodeReport,
    pub log: TrajectoryLog,
    /// Why the episode was cut short, if it was.
    pub aborted: Option<String>,
    pub observations_sent: usize,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("network error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

enum Wait {
    Act(adavln_core::Action),
    Abort(String),
}

/// Runs one episode against the agent on the other end of `transport`.
pub fn run_session(
    transport: &mut dyn Transport,
    ep: &Episode,
    scene: &Scene,
    cfg: &SimConfig,
    opts: &mut ServeOptions,
) -> Result<SessionOutcome, ServeError> {
    let (mut sim, mut obs) = match Simulator::reset(ep, scene, cfg) {
        Ok(v) => v,
        Err(e) => {
            let _ = transport.send(&Message::Error { message: e.to_string() });
            return Err(e.into());
        }
    };
    transport.send(&Message::hello())?;
    transport.send(&Message::EpisodeStart {
        episode_id: ep.id.clone(),
        scene_id: ep.scene_id.clone(),
        instruction: ep.instruction.clone(),
        max_steps: ep.max_steps,
        config: cfg.clone(),
    })?;
    if let Some(t) = opts.telemetry.as_mut() {
        t.publish(&Telemetry::scene(&sim));
        t.publish(&Telemetry::initial_frame(&sim));
    }

    let mut observations_sent = 0;
    let mut aborted = None;
    while !sim.state().episode_over {
        let steps_remaining = sim.steps_remaining();
        if let Err(e) = transport.send(&Message::Observation { observation: obs.clone(), steps_remaining }) {
            aborted = Some(format!("agent connection lost: {e}"));
            break;
        }
        observations_sent += 1;
        let waiting_since = opts.clock.now();
        let action = match wait_for_action(transport, opts.command_timeout) {
            Wait::Act(a) => a,
            Wait::Abort(reason) => {
                aborted = Some(reason);
                break;
            }
        };
        sim.idle(opts.clock.now().saturating_sub(waiting_since));
        let published = sim.records().len();
        let before = sim.state().step_count;
        obs = sim.execute(action)?;
        if let Some(t) = opts.telemetry.as_mut() {
            for r in &sim.records()[published..] {
                let step = if r.action.is_some() { before + 1 } else { before };
                t.publish(&Telemetry::frame(step, r));
            }
        }
    }

    let log = sim.trajectory_log();
    let mut report = compute_report(&log, ep, scene).expect("log matches its own scene");
    report.complete = aborted.is_none();
    if aborted.is_none() {
        transport.send(&Message::EpisodeEnd { report: report.clone() })?;
    }
    if let Some(t) = opts.telemetry.as_mut() {
        t.publish(&Telemetry::End { report: report.clone() });
    }
    Ok(SessionOutcome { report, log, aborted, observations_sent })
}

fn wait_for_action(transport: &mut dyn Transport, timeout: Option<Duration>) -> Wait {
    loop {
        let line = match transport.recv(timeout) {
            Ok(Some(line)) => line,
            Ok(None) => return Wait::Abort("agent disconnected".into()),
            Err(RecvError::Timeout) => {
                let message = "timed out waiting for action_command".to_owned();
                let _ = transport.send(&Message::Error { message: message.clone() });
                return Wait::Abort(message);
            }
            Err(RecvError::Io(e)) => return Wait::Abort(format!("agent connection lost: {e}")),
        };
        if line.trim().is_empty() {
            continue;
        }
        let reject = |transport: &mut dyn Transport, message: String| {
            let _ = transport.send(&Message::Error { message: message.clone() });
            Wait::Abort(message)
        };
        match Message::from_line(&line) {
            Ok(Message::ActionCommand { action }) => return Wait::Act(action),
            Ok(Message::Hello { protocol, .. }) if protocol == PROTOCOL_VERSION => continue,
            Ok(Message::Hello { protocol, .. }) => {
                return reject(transport, format!("unsupported protocol {protocol:?}; server speaks {PROTOCOL_VERSION}"))
            }
            Ok(other) => return reject(transport, format!("unexpected {} message from agent", other.kind())),
            Err(e) => return reject(transport, e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wire {
    /// Newline-delimited JSON.
    Lines,
    WebSocket,
}

/// Accepts a single agent on `listener` and runs the episode with it.
pub fn serve_on(
    listener: &TcpListener,
    wire: Wire,
    ep: &Episode,
    scene: &Scene,
    cfg: &SimConfig,
    opts: &mut ServeOptions,
) -> Result<SessionOutcome, ServeError> {
    let (stream, _) = listener.accept()?;
    match wire {
        Wire::Lines => run_session(&mut LineTransport::new(stream)?, ep, scene, cfg, opts),
        Wire::WebSocket => run_session(&mut WsTransport::accept(stream)?, ep, scene, cfg, opts),
    }
}

/// Binds `endpoint` (`host:port`), serves one episode over line-delimited
/// JSON and releases the port.
pub fn serve_episode(
    ep: &Episode,
    scene: &Scene,
    cfg: &SimConfig,
    endpoint: &str,
    opts: &mut ServeOptions,
) -> Result<SessionOutcome, ServeError> {
    let listener = TcpListener::bind(endpoint)?;
    serve_on(&listener, Wire::Lines, ep, scene, cfg, opts)
}
