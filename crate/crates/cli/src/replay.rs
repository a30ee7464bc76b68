use std::fs;
use std::path::PathBuf;

use adavln_core::{compute_report, load_scene, Scene, SceneLibrary, TrajectoryLog};
use anyhow::{bail, Context, Result};

use crate::plot::render_svg;
use crate::ReplayArgs;

pub fn cmd_replay(args: &ReplayArgs) -> Result<()> {
    let text = fs::read_to_string(&args.log).with_context(|| format!("reading {}", args.log.display()))?;
    let log = TrajectoryLog::parse_jsonl(&text).with_context(|| format!("parsing {}", args.log.display()))?;
    let scene: Scene = match (&args.scene, &args.scenes) {
        (Some(path), _) => load_scene(path)?,
        (None, dir) => {
            let dir = dir.clone().unwrap_or_else(|| PathBuf::from("data/scenes"));
            SceneLibrary::load_dir(&dir)
                .with_context(|| format!("loading scenes from {}", dir.display()))?
                .get(&log.header.scene_id)?
                .clone()
        }
    };
    if scene.id() != log.header.scene_id {
        bail!("log was recorded in scene {:?} but scene {:?} was given", log.header.scene_id, scene.id());
    }

    let out = match &args.out {
        Some(dir) => dir.clone(),
        None => args.log.parent().map(PathBuf::from).unwrap_or_default(),
    };
    if !out.as_os_str().is_empty() {
        fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    }
    let plot = out.join("plot.svg");
    fs::write(&plot, render_svg(&scene, &log)).with_context(|| format!("writing {}", plot.display()))?;
    eprintln!("wrote {}", plot.display());
    if !args.plot_only {
        let report = compute_report(&log, &log.header.episode, &scene)?;
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}
