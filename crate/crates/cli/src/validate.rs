use std::collections::BTreeSet;
use std::fs;

use adavln_core::episode::{parse_episodes, validate_episode};
use adavln_core::{validate_interference, SceneLibrary};
use anyhow::{bail, Context, Result};

use crate::settings::{apply_overrides, sim_config};
use crate::ValidateArgs;

pub fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let cfg = sim_config(&args.sim)?;
    let scenes = SceneLibrary::load_dir(&args.scenes)
        .with_context(|| format!("loading scenes from {}", args.scenes.display()))?;
    let text = fs::read_to_string(&args.dataset)
        .with_context(|| format!("reading {}", args.dataset.display()))?;
    let mut episodes = parse_episodes(&text, &args.dataset)?;
    if episodes.is_empty() {
        bail!("{} contains no episodes", args.dataset.display());
    }
    apply_overrides(&mut episodes, &args.sim);

    let mut ids = BTreeSet::new();
    let mut invalid = 0;
    for ep in &episodes {
        let problem = if !ids.insert(ep.id.as_str()) {
            Some("duplicate episode id".to_owned())
        } else {
            match scenes.get(&ep.scene_id) {
                Err(e) => Some(e.to_string()),
                Ok(scene) => validate_episode(ep, scene, &cfg).err().map(|e| e.to_string()),
            }
        };
        if let Some(p) = problem {
            invalid += 1;
            println!("{:<20} INVALID  {p}", ep.id);
            continue;
        }
        if ep.is_static_control() {
            println!("{:<20} ok       static control", ep.id);
            continue;
        }
        let scene = scenes.get(&ep.scene_id)?;
        let checks = validate_interference(ep, scene, &cfg)?;
        let crossing: Vec<String> = checks
            .iter()
            .filter(|h| h.interferes)
            .map(|h| format!("{} ({:.2} m)", h.human_id, h.min_distance))
            .collect();
        if crossing.is_empty() {
            println!("{:<20} ok       warning: no patrol comes near the robot's path", ep.id);
        } else {
            println!("{:<20} ok       interfering: {}", ep.id, crossing.join(", "));
        }
    }
    println!("{} episodes, {} invalid", episodes.len(), invalid);
    Ok(invalid == 0)
}
