//! Read-only telemetry for live viewers.
//!
//! Viewers get a `scene` message first (the scene file, start, goal and
//! the expanded patrol loops), then one `frame` per simulation tick and a
//! final `end` with the report. Nothing sent here can affect the episode.

use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::Sender;
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use adavln_core::geometry::{Point2, Pose2};
use adavln_core::sim::TrajectoryRecord;
use adavln_core::{EpisodeReport, Simulator};
use serde::{Deserialize, Serialize};
use tungstenite::{Message as WsMessage, WebSocket};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Telemetry {
    Scene {
        episode_id: String,
        instruction: String,
        scene: serde_json::Value,
        start: Pose2,
        goal: Point2,
        success_radius: f64,
        robot_radius: f64,
        human_radii: Vec<f64>,
        human_routes: Vec<Vec<Point2>>,
    },
    Frame {
        step: u32,
        tick: u64,
        time: f64,
        robot: Pose2,
        humans: Vec<Pose2>,
        static_collision: bool,
        human_collision: bool,
    },
    End {
        report: EpisodeReport,
    },
}

impl Telemetry {
    pub fn scene(sim: &Simulator) -> Self {
        let ep = sim.episode();
        let scene = serde_json::from_str(&sim.scene().to_json()).expect("scene json is valid");
        Telemetry::Scene {
            episode_id: ep.id.clone(),
            instruction: ep.instruction.clone(),
            scene,
            start: ep.start,
            goal: ep.goal,
            success_radius: ep.success_radius,
            robot_radius: sim.config().robot_footprint_radius,
            human_radii: sim.state().humans.iter().map(|h| h.config.footprint_radius).collect(),
            human_routes: sim.state().humans.iter().map(|h| h.patrol.route().to_vec()).collect(),
        }
    }

    pub fn initial_frame(sim: &Simulator) -> Self {
        let s = sim.state();
        Telemetry::Frame {
            step: s.step_count,
            tick: s.tick_index,
            time: s.sim_time,
            robot: s.robot,
            humans: s.humans.iter().map(|h| h.pose).collect(),
            static_collision: s.in_static_collision,
            human_collision: s.in_human_collision,
        }
    }

    pub fn frame(step: u32, r: &TrajectoryRecord) -> Self {
        Telemetry::Frame {
            step,
            tick: r.tick,
            time: r.time,
            robot: r.robot,
            humans: r.humans.clone(),
            static_collision: r.static_collision,
            human_collision: r.human_collision,
        }
    }
}

pub trait TelemetrySink: Send {
    fn publish(&mut self, msg: &Telemetry);
}

impl TelemetrySink for Sender<Telemetry> {
    fn publish(&mut self, msg: &Telemetry) {
        let _ = self.send(msg.clone());
    }
}

struct Viewers {
    sockets: Vec<WebSocket<TcpStream>>,
    scene: Option<String>,
}

/// Broadcasts telemetry to any number of WebSocket viewers. Viewers that
/// connect late receive the scene message before live frames.
pub struct WsTelemetryServer {
    addr: SocketAddr,
    viewers: Arc<Mutex<Viewers>>,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
}

impl WsTelemetryServer {
    pub fn bind(addr: &str) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        listener.set_nonblocking(true)?;
        let addr = listener.local_addr()?;
        let viewers = Arc::new(Mutex::new(Viewers { sockets: Vec::new(), scene: None }));
        let stop = Arc::new(AtomicBool::new(false));
        let accept_thread = {
            let viewers = Arc::clone(&viewers);
            let stop = Arc::clone(&stop);
            thread::spawn(move || accept_loop(listener, viewers, stop))
        };
        Ok(Self { addr, viewers, stop, accept_thread: Some(accept_thread) })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }
}

fn accept_loop(listener: TcpListener, viewers: Arc<Mutex<Viewers>>, stop: Arc<AtomicBool>) {
    while !stop.load(Ordering::Relaxed) {
        match listener.accept() {
            Ok((stream, _)) => {
                if stream.set_nonblocking(false).is_err() {
                    continue;
                }
                let Ok(mut ws) = tungstenite::accept(stream) else { continue };
                let mut v = viewers.lock().expect("viewer lock");
                if let Some(scene) = &v.scene {
                    if ws.send(WsMessage::text(scene.clone())).is_err() {
                        continue;
                    }
                }
                v.sockets.push(ws);
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(Duration::from_millis(20)),
            Err(_) => thread::sleep(Duration::from_millis(20)),
        }
    }
}

impl TelemetrySink for WsTelemetryServer {
    fn publish(&mut self, msg: &Telemetry) {
        let text = serde_json::to_string(msg).expect("telemetry serializes");
        let mut v = self.viewers.lock().expect("viewer lock");
        if matches!(msg, Telemetry::Scene { .. }) {
            v.scene = Some(text.clone());
        }
        v.sockets.retain_mut(|ws| ws.send(WsMessage::text(text.clone())).is_ok());
    }
}

impl Drop for WsTelemetryServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(t) = self.accept_thread.take() {
            let _ = t.join();
        }
        if let Ok(mut v) = self.viewers.lock() {
            for ws in &mut v.sockets {
                let _ = ws.close(None);
                let _ = ws.flush();
            }
        }
    }
}
