use std::fs;

use adavln_core::{Episode, SimConfig};
use anyhow::{Context, Result};

use crate::{OnOff, SimArgs};

pub fn sim_config(args: &SimArgs) -> Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SimConfig::default(),
    };
    if let Some(f) = args.freeze_time {
        cfg.freeze_time = f == OnOff::On;
    }
    if let Some(rate) = args.tick_rate {
        cfg.tick_rate = rate;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn apply_overrides(episodes: &mut [Episode], args: &SimArgs) {
    if let Some(n) = args.max_steps {
        for ep in episodes {
            ep.max_steps = n;
        }
    }
}

/// Directory-safe form of an episode id.
pub fn file_stem(id: &str) -> String {
    let s: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if s.is_empty() || s.chars().all(|c| c == '.') {
        format!("_{s}")
    } else {
        s
    }
}

/// Per-episode seed derived from the run seed (splitmix64 finalizer).
pub fn episode_seed(run_seed: u64, index: usize) -> u64 {
    let mut z = run_seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
