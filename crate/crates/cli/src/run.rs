use std::collections::BTreeSet;
use std::fs;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::time::Duration;

use adavln_agent::server::{serve_on, ServeOptions, Wire};
use adavln_agent::telemetry::{TelemetrySink, WsTelemetryServer};
use adavln_agent::{run_baseline, BaselineKind};
use adavln_core::episode::{parse_episodes, validate_episode};
use adavln_core::metrics::{format_csv, format_table};
use adavln_core::{aggregate, Episode, EpisodeReport, Scene, SceneLibrary, SimConfig, TrajectoryLog};
use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::plot::render_svg;
use crate::settings::{apply_overrides, episode_seed, file_stem, sim_config};
use crate::{AgentChoice, RunArgs};

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    Aborted,
    Error,
}

#[derive(Debug, Serialize)]
struct EpisodeEntry {
    episode_id: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    artifacts: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<EpisodeReport>,
}

struct Finished {
    report: EpisodeReport,
    log: TrajectoryLog,
    aborted: Option<String>,
}

pub fn cmd_run(args: &RunArgs) -> Result<bool> {
    let cfg = sim_config(&args.sim)?;
    let scenes = SceneLibrary::load_dir(&args.scenes)
        .with_context(|| format!("loading scenes from {}", args.scenes.display()))?;
    let text = fs::read_to_string(&args.episodes)
        .with_context(|| format!("reading {}", args.episodes.display()))?;
    let mut episodes = parse_episodes(&text, &args.episodes)?;
    if episodes.is_empty() {
        bail!("{} contains no episodes", args.episodes.display());
    }
    apply_overrides(&mut episodes, &args.sim);
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let setups: Vec<Result<&Scene, String>> = setup_checks(&episodes, &scenes, &cfg);
    let dirs = episode_dirs(&args.out, &episodes);

    let results: Vec<Result<Finished, String>> = match args.agent {
        AgentChoice::Random | AgentChoice::Avoider | AgentChoice::Oracle => {
            let kind = match args.agent {
                AgentChoice::Random => BaselineKind::Random,
                AgentChoice::Avoider => BaselineKind::ReactiveAvoider,
                _ => BaselineKind::OraclePathFollower,
            };
            let work = || {
                episodes
                    .par_iter()
                    .zip(setups.par_iter())
                    .enumerate()
                    .map(|(i, (ep, setup))| {
                        let scene = setup.clone()?;
                        let run = run_baseline(kind, ep, scene, &cfg, episode_seed(args.seed, i))
                            .map_err(|e| e.to_string())?;
                        Ok(Finished { report: run.report, log: run.log, aborted: None })
                    })
                    .collect()
            };
            rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?.install(work)
        }
        AgentChoice::Remote | AgentChoice::Ui => serve_all(args, &cfg, &episodes, &setups)?,
    };

    let mut entries = Vec::new();
    let mut reports = Vec::new();
    let mut all_ok = true;
    for ((ep, dir), result) in episodes.iter().zip(&dirs).zip(results) {
        match result {
            Ok(done) => {
                let scene = scenes.get(&ep.scene_id)?;
                write_artifacts(dir, scene, &done)?;
                let rel = dir.strip_prefix(&args.out).unwrap_or(dir).display().to_string();
                all_ok &= done.aborted.is_none();
                entries.push(EpisodeEntry {
                    episode_id: ep.id.clone(),
                    status: if done.aborted.is_some() { Status::Aborted } else { Status::Ok },
                    error: done.aborted,
                    artifacts: Some(rel),
                    report: Some(done.report.clone()),
                });
                reports.push(done.report);
            }
            Err(message) => {
                all_ok = false;
                entries.push(EpisodeEntry {
                    episode_id: ep.id.clone(),
                    status: Status::Error,
                    error: Some(message),
                    artifacts: None,
                    report: None,
                });
            }
        }
    }
    write_summary(&args.out, &reports, &entries)?;
    Ok(all_ok)
}

fn setup_checks<'s>(episodes: &[Episode], scenes: &'s SceneLibrary, cfg: &SimConfig) -> Vec<Result<&'s Scene, String>> {
    let mut seen = BTreeSet::new();
    episodes
        .iter()
        .map(|ep| {
            if !seen.insert(ep.id.as_str()) {
                return Err(format!("duplicate episode id {:?}", ep.id));
            }
            let scene = scenes.get(&ep.scene_id).map_err(|e| e.to_string())?;
            validate_episode(ep, scene, cfg).map_err(|e| e.to_string())?;
            Ok(scene)
        })
        .collect()
}

fn episode_dirs(out: &Path, episodes: &[Episode]) -> Vec<PathBuf> {
    let mut used = BTreeSet::new();
    episodes
        .iter()
        .enumerate()
        .map(|(i, ep)| {
            let mut stem = file_stem(&ep.id);
            if !used.insert(stem.clone()) {
                stem = format!("{stem}-{i}");
                used.insert(stem.clone());
            }
            out.join("episodes").join(stem)
        })
        .collect()
}

fn serve_all(
    args: &RunArgs,
    cfg: &SimConfig,
    episodes: &[Episode],
    setups: &[Result<&Scene, String>],
) -> Result<Vec<Result<Finished, String>>> {
    let wire = if args.agent == AgentChoice::Ui { Wire::WebSocket } else { Wire::Lines };
    let listener = TcpListener::bind(&args.endpoint).with_context(|| format!("binding {}", args.endpoint))?;
    let mut telemetry: Option<Box<dyn TelemetrySink>> = None;
    if wire == Wire::WebSocket {
        let addr = listener.local_addr()?;
        let side = format!("{}:{}", addr.ip(), addr.port() + 1);
        let server = WsTelemetryServer::bind(&side).with_context(|| format!("binding telemetry on {side}"))?;
        eprintln!("telemetry on ws://{}", server.local_addr());
        telemetry = Some(Box::new(server));
    }
    let scheme = if wire == Wire::WebSocket { "ws://" } else { "" };
    let mut results = Vec::new();
    for (ep, setup) in episodes.iter().zip(setups) {
        let scene = match setup {
            Ok(s) => *s,
            Err(e) => {
                results.push(Err(e.clone()));
                continue;
            }
        };
        eprintln!("episode {}: waiting for an agent on {scheme}{}", ep.id, listener.local_addr()?);
        let mut opts = ServeOptions {
            command_timeout: args.command_timeout.map(Duration::from_secs_f64),
            telemetry: telemetry.take(),
            ..Default::default()
        };
        let outcome = serve_on(&listener, wire, ep, scene, cfg, &mut opts);
        telemetry = opts.telemetry.take();
        results.push(
            outcome
                .map(|o| Finished { report: o.report, log: o.log, aborted: o.aborted })
                .map_err(|e| e.to_string()),
        );
    }
    Ok(results)
}

fn write_artifacts(dir: &Path, scene: &Scene, done: &Finished) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("trajectory.jsonl"), done.log.to_jsonl())?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&done.report)? + "\n")?;
    fs::write(dir.join("plot.svg"), render_svg(scene, &done.log))?;
    Ok(())
}

fn write_summary(out: &Path, reports: &[EpisodeReport], entries: &[EpisodeEntry]) -> Result<()> {
    let summary = aggregate(reports).ok();
    let mut text = match &summary {
        Some(s) => format_table(reports, s),
        None => "no episode produced a report\n".to_owned(),
    };
    let failed: Vec<&EpisodeEntry> = entries.iter().filter(|e| e.error.is_some()).collect();
    if !failed.is_empty() {
        text.push_str("\nEpisodes with errors:\n");
        for e in failed {
            text.push_str(&format!("  {}: {}\n", e.episode_id, e.error.as_deref().unwrap_or_default()));
        }
    }
    print!("{text}");
    fs::write(out.join("summary.txt"), &text)?;
    if let Some(s) = &summary {
        fs::write(out.join("summary.csv"), format_csv(reports, s))?;
    }
    let json = serde_json::json!({ "summary": summary, "episodes": entries });
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&json)? + "\n")
        .map_err(|e| anyhow!("writing summary: {e}"))
}
