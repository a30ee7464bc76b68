use std::collections::VecDeque;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use adavln_agent::server::{serve_on, ManualClock, RecvError, Wire};
use adavln_agent::telemetry::Telemetry;
use adavln_agent::{run_session, Message, ServeOptions, Transport, PROTOCOL_VERSION};
use adavln_core::episode::HumanConfig;
use adavln_core::geometry::{Aabb, Point2, Pose2};
use adavln_core::{Action, EndReason, Episode, Scene, SimConfig, Simulator};
use proptest::prelude::*;

fn scene() -> Scene {
    Scene::new("open", Aabb::new(Point2::new(-10.0, -10.0), Point2::new(10.0, 10.0)), vec![]).unwrap()
}

fn walker() -> HumanConfig {
    HumanConfig {
        id: "w".into(),
        spawn: Pose2::from_degrees(2.0, 2.0, 0.0),
        waypoints: vec![Point2::new(3.5, 2.0), Point2::new(3.5, 3.5), Point2::new(2.0, 3.5)],
        speed: 1.0,
        footprint_radius: 0.3,
    }
}

fn episode() -> Episode {
    Episode {
        id: "walk".into(),
        scene_id: "open".into(),
        instruction: "Walk to the end of the hall and stop.".into(),
        start: Pose2::default(),
        goal: Point2::new(3.0, 0.0),
        success_radius: 1.0,
        max_steps: 50,
        humans: vec![walker()],
        reference_path: None,
    }
}

/// Connects to `addr`, answers every observation with the next scripted
/// line and returns every message received.
fn scripted_client(addr: std::net::SocketAddr, script: Vec<String>, delays: Vec<Duration>) -> Vec<Message> {
    let stream = TcpStream::connect(addr).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut writer = stream;
    let mut script: VecDeque<String> = script.into();
    let mut delays: VecDeque<Duration> = delays.into();
    let mut seen = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return seen;
        }
        let msg = Message::from_line(&line).unwrap();
        let is_obs = matches!(msg, Message::Observation { .. });
        seen.push(msg);
        if is_obs {
            if let Some(d) = delays.pop_front() {
                thread::sleep(d);
            }
            match script.pop_front() {
                Some(s) => {
                    // the server may already have hung up; keep reading what it sent
                    let _ = writer.write_all(format!("{s}\n").as_bytes());
                }
                None => return seen,
            }
        }
    }
}

fn command(a: Action) -> String {
    Message::ActionCommand { action: a }.to_line()
}

fn serve_with_client(
    script: Vec<String>,
    delays: Vec<Duration>,
    mut opts: ServeOptions,
) -> (adavln_agent::SessionOutcome, Vec<Message>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let client = thread::spawn(move || scripted_client(addr, script, delays));
    let outcome = serve_on(&listener, Wire::Lines, &episode(), &scene(), &SimConfig::default(), &mut opts).unwrap();
    (outcome, client.join().unwrap())
}

fn kinds(msgs: &[Message]) -> Vec<&'static str> {
    msgs.iter().map(Message::kind).collect()
}

#[test]
fn forward_then_stop_walkthrough() {
    let (outcome, msgs) = serve_with_client(vec![command(Action::Forward), command(Action::Stop)], vec![], ServeOptions::default());
    assert_eq!(kinds(&msgs), ["hello", "episode_start", "observation", "observation", "episode_end"]);
    match &msgs[0] {
        Message::Hello { protocol, .. } => assert_eq!(protocol, PROTOCOL_VERSION),
        m => panic!("{m:?}"),
    }
    match &msgs[1] {
        Message::EpisodeStart { instruction, max_steps, .. } => {
            assert_eq!(instruction, "Walk to the end of the hall and stop.");
            assert_eq!(*max_steps, 50);
        }
        m => panic!("{m:?}"),
    }
    match &msgs[3] {
        Message::Observation { steps_remaining, observation } => {
            assert_eq!(*steps_remaining, 49);
            assert_eq!(observation.step_index, 1);
        }
        m => panic!("{m:?}"),
    }
    match &msgs[4] {
        Message::EpisodeEnd { report } => {
            assert_eq!(report.steps_used, 2);
            assert_eq!(report.end_reason, EndReason::Stopped);
            assert_eq!(report, &outcome.report);
        }
        m => panic!("{m:?}"),
    }
    assert!(outcome.aborted.is_none());
    assert!(outcome.report.complete);
    assert_eq!(outcome.observations_sent, 2);
}

#[test]
fn unknown_action_gets_an_error_and_aborts() {
    let script = vec![r#"{"kind":"action_command","action":"jump"}"#.to_owned()];
    let (outcome, msgs) = serve_with_client(script, vec![], ServeOptions::default());
    assert_eq!(kinds(&msgs), ["hello", "episode_start", "observation", "error"]);
    assert!(outcome.aborted.is_some());
    assert!(!outcome.report.complete);
    assert_eq!(outcome.report.end_reason, EndReason::None);
}

#[test]
fn garbage_and_wrong_kind_are_rejected() {
    let (o, msgs) = serve_with_client(vec!["not json".into()], vec![], ServeOptions::default());
    assert_eq!(msgs.last().map(Message::kind), Some("error"));
    assert!(!o.report.complete);
    let wrong = Message::Error { message: "x".into() }.to_line();
    let (o, msgs) = serve_with_client(vec![wrong], vec![], ServeOptions::default());
    assert_eq!(msgs.last().map(Message::kind), Some("error"));
    assert!(o.aborted.unwrap().contains("unexpected error"));
}

#[test]
fn wrong_protocol_version_is_rejected() {
    let hello = r#"{"kind":"hello","protocol":"adavln/0"}"#.to_owned();
    let (o, msgs) = serve_with_client(vec![hello], vec![], ServeOptions::default());
    match msgs.last().unwrap() {
        Message::Error { message } => assert!(message.contains("adavln/1"), "{message}"),
        m => panic!("{m:?}"),
    }
    assert!(!o.report.complete);
}

#[test]
fn fifty_forwards_hit_the_step_limit() {
    let (outcome, msgs) = serve_with_client(vec![command(Action::Forward); 50], vec![], ServeOptions::default());
    assert_eq!(msgs.iter().filter(|m| m.kind() == "observation").count(), 50);
    match msgs.last().unwrap() {
        Message::EpisodeEnd { report } => {
            assert_eq!(report.end_reason, EndReason::StepLimit);
            assert_eq!(report.steps_used, 50);
        }
        m => panic!("{m:?}"),
    }
    assert!(outcome.report.complete);
}

#[test]
fn disconnect_marks_the_report_incomplete() {
    let (outcome, _) = serve_with_client(vec![command(Action::Forward)], vec![], ServeOptions::default());
    assert_eq!(outcome.aborted.as_deref(), Some("agent disconnected"));
    assert!(!outcome.report.complete);
    assert_eq!(outcome.report.steps_used, 1);
}

#[test]
fn command_timeout_aborts() {
    let opts = ServeOptions { command_timeout: Some(Duration::from_millis(50)), ..Default::default() };
    let (outcome, msgs) = serve_with_client(
        vec![command(Action::Forward), command(Action::Forward)],
        vec![Duration::ZERO, Duration::from_millis(400)],
        opts,
    );
    assert!(outcome.aborted.unwrap().contains("timed out"));
    assert_eq!(msgs.iter().filter(|m| m.kind() == "observation").count(), 2);
}

#[test]
fn telemetry_mirrors_every_tick() {
    let (tx, rx) = mpsc::channel();
    let opts = ServeOptions { telemetry: Some(Box::new(tx)), ..Default::default() };
    let (outcome, _) = serve_with_client(vec![command(Action::Forward), command(Action::TurnLeft), command(Action::Stop)], vec![], opts);
    let all: Vec<Telemetry> = rx.try_iter().collect();
    assert!(matches!(all[0], Telemetry::Scene { .. }));
    assert!(matches!(all.last(), Some(Telemetry::End { .. })));
    let frames: Vec<&Telemetry> = all.iter().filter(|t| matches!(t, Telemetry::Frame { .. })).collect();
    assert_eq!(frames.len(), outcome.log.records.len() + 1);
    match frames.last().unwrap() {
        Telemetry::Frame { robot, step, .. } => {
            assert_eq!(*robot, outcome.log.records.last().unwrap().robot);
            assert_eq!(*step, 2);
        }
        _ => unreachable!(),
    }
}

/// In-memory agent that advances a manual clock before each reply.
struct DelayedScript {
    clock: ManualClock,
    delay: Duration,
    script: VecDeque<Action>,
    sent: Vec<Message>,
}

impl Transport for DelayedScript {
    fn send(&mut self, msg: &Message) -> io::Result<()> {
        self.sent.push(msg.clone());
        Ok(())
    }

    fn recv(&mut self, _timeout: Option<Duration>) -> Result<Option<String>, RecvError> {
        self.clock.advance(self.delay);
        Ok(self.script.pop_front().map(command))
    }
}

fn session_with_delay(cfg: &SimConfig, delay: Duration, actions: &[Action]) -> adavln_agent::SessionOutcome {
    let clock = ManualClock::default();
    let mut t = DelayedScript { clock: clock.clone(), delay, script: actions.iter().copied().collect(), sent: vec![] };
    let mut opts = ServeOptions { clock: Arc::new(clock), ..Default::default() };
    run_session(&mut t, &episode(), &scene(), cfg, &mut opts).unwrap()
}

#[test]
fn injected_delay_is_ignored_with_freeze_time() {
    let actions = [Action::Forward, Action::TurnLeft, Action::Forward, Action::Stop];
    let cfg = SimConfig::default();
    let a = session_with_delay(&cfg, Duration::ZERO, &actions);
    let b = session_with_delay(&cfg, Duration::from_secs(10), &actions);
    assert_eq!(a.log.to_jsonl(), b.log.to_jsonl());
}

#[test]
fn injected_delay_is_replayed_without_freeze_time() {
    let cfg = SimConfig { freeze_time: false, ..Default::default() };
    let a = session_with_delay(&cfg, Duration::from_secs(6), &[Action::Forward, Action::Stop]);
    // two waits of 6 s plus one forward action
    assert_eq!(a.log.records.len(), 360 + 30 + 360);
    let idle = &a.log.records[..360];
    assert!(idle.iter().all(|r| r.action.is_none()));
    let spawn = walker().spawn.position;
    assert!(idle.last().unwrap().humans[0].position.distance(spawn) < 1e-9);
    assert!(a.report.complete);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn real_network_latency_does_not_change_the_log(delays in proptest::collection::vec(0u64..15, 6)) {
        let actions = [Action::Forward, Action::Forward, Action::TurnRight, Action::Forward, Action::TurnLeft, Action::Stop];
        let (outcome, _) = serve_with_client(
            actions.iter().map(|&a| command(a)).collect(),
            delays.into_iter().map(Duration::from_millis).collect(),
            ServeOptions::default(),
        );
        let (mut sim, _) = Simulator::reset(&episode(), &scene(), &SimConfig::default()).unwrap();
        for a in actions {
            sim.execute(a).unwrap();
        }
        prop_assert_eq!(outcome.log.to_jsonl(), sim.trajectory_log().to_jsonl());
    }
}

#[test]
fn websocket_clients_get_the_same_protocol() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let client = thread::spawn(move || {
        let (mut ws, _) = tungstenite::connect(format!("ws://{addr}")).unwrap();
        let mut script: VecDeque<Action> = [Action::Forward, Action::Stop].into();
        let mut seen = Vec::new();
        loop {
            let text = match ws.read() {
                Ok(tungstenite::Message::Text(t)) => t.to_string(),
                Ok(tungstenite::Message::Close(_)) | Err(_) => return seen,
                Ok(_) => continue,
            };
            let msg = Message::from_line(&text).unwrap();
            let done = matches!(msg, Message::EpisodeEnd { .. });
            if matches!(msg, Message::Observation { .. }) {
                let a = script.pop_front().unwrap();
                ws.send(tungstenite::Message::text(command(a))).unwrap();
            }
            seen.push(msg);
            if done {
                let _ = ws.close(None);
                return seen;
            }
        }
    });
    let outcome = serve_on(&listener, Wire::WebSocket, &episode(), &scene(), &SimConfig::default(), &mut ServeOptions::default()).unwrap();
    let msgs = client.join().unwrap();
    assert_eq!(kinds(&msgs), ["hello", "episode_start", "observation", "observation", "episode_end"]);
    assert_eq!(outcome.report.steps_used, 2);
}
