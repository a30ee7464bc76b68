//! Static world geometry and the scene file format.
//!
//! A scene file is JSON:
//!
//! ```json
//! {
//!   "id": "corridor_a",
//!   "bounds": { "min": [0, 0], "max": [8, 6] },
//!   "obstacles": [ { "vertices": [[1, 1], [2, 1], [2, 2]] } ],
//!   "spawn_markers": { "door": [0.5, 3.0] }
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Aabb, GeometryError, Point2, PolygonObstacle};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("scene bounds are empty or non-finite")]
    InvalidBounds,
    #[error("obstacle {index}: {source}")]
    InvalidObstacle { index: usize, source: GeometryError },
    #[error("obstacle {index} lies outside the scene bounds")]
    ObstacleOutOfBounds { index: usize },
    #[error("spawn marker {0:?} lies outside the scene bounds")]
    MarkerOutOfBounds(String),
    #[error("scene id {0:?} defined twice")]
    DuplicateScene(String),
    #[error("unknown scene id {0:?}")]
    UnknownScene(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    id: String,
    bounds: Aabb,
    obstacles: Vec<PolygonObstacle>,
    spawn_markers: BTreeMap<String, Point2>,
}

impl Scene {
    pub fn new(
        id: impl Into<String>,
        bounds: Aabb,
        obstacles: Vec<PolygonObstacle>,
    ) -> Result<Self, SceneError> {
        Self::with_markers(id, bounds, obstacles, BTreeMap::new())
    }

    pub fn with_markers(
        id: impl Into<String>,
        bounds: Aabb,
        obstacles: Vec<PolygonObstacle>,
        spawn_markers: BTreeMap<String, Point2>,
    ) -> Result<Self, SceneError> {
        if !(bounds.min.is_finite() && bounds.max.is_finite())
            || bounds.width() <= 0.0
            || bounds.height() <= 0.0
        {
            return Err(SceneError::InvalidBounds);
        }
        for (index, poly) in obstacles.iter().enumerate() {
            if !poly.vertices().iter().all(|&v| bounds.contains(v)) {
                return Err(SceneError::ObstacleOutOfBounds { index });
            }
        }
        for (name, &p) in &spawn_markers {
            if !bounds.contains(p) {
                return Err(SceneError::MarkerOutOfBounds(name.clone()));
            }
        }
        Ok(Self { id: id.into(), bounds, obstacles, spawn_markers })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn obstacles(&self) -> &[PolygonObstacle] {
        &self.obstacles
    }

    pub fn spawn_markers(&self) -> &BTreeMap<String, Point2> {
        &self.spawn_markers
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SceneFile::from(self)).expect("scene serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let file: SceneFile = serde_json::from_str(text)
            .map_err(|source| SceneError::Parse { path: PathBuf::from("<memory>"), source })?;
        file.into_scene()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneFile {
    id: String,
    bounds: Aabb,
    #[serde(default)]
    obstacles: Vec<ObstacleFile>,
    #[serde(default)]
    spawn_markers: BTreeMap<String, Point2>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObstacleFile {
    vertices: Vec<Point2>,
}

impl SceneFile {
    fn into_scene(self) -> Result<Scene, SceneError> {
        let obstacles = self
            .obstacles
            .into_iter()
            .enumerate()
            .map(|(index, o)| {
                PolygonObstacle::new(o.vertices)
                    .map_err(|source| SceneError::InvalidObstacle { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Scene::with_markers(self.id, self.bounds, obstacles, self.spawn_markers)
    }
}

impl From<&Scene> for SceneFile {
    fn from(s: &Scene) -> Self {
        SceneFile {
            id: s.id.clone(),
            bounds: s.bounds,
            obstacles: s
                .obstacles
                .iter()
                .map(|p| ObstacleFile { vertices: p.vertices().to_vec() })
                .collect(),
            spawn_markers: s.spawn_markers.clone(),
        }
    }
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene, SceneError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| SceneError::Io { path: path.to_owned(), source })?;
    let file: SceneFile = serde_json::from_str(&text)
        .map_err(|source| SceneError::Parse { path: path.to_owned(), source })?;
    file.into_scene()
}

/// Scenes indexed by id.
#[derive(Debug, Clone, Default)]
pub struct SceneLibrary {
    scenes: BTreeMap<String, Scene>,
}

impl SceneLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, scene: Scene) -> Result<(), SceneError> {
        if self.scenes.contains_key(scene.id()) {
            return Err(SceneError::DuplicateScene(scene.id().to_owned()));
        }
        self.scenes.insert(scene.id().to_owned(), scene);
        Ok(())
    }

    /// Loads every `*.json` file in `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, SceneError> {
        let dir = dir.as_ref();
        let entries =
            fs::read_dir(dir).map_err(|source| SceneError::Io { path: dir.to_owned(), source })?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| SceneError::Io { path: dir.to_owned(), source })?;
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "json") {
                paths.push(p);
            }
        }
        paths.sort();
        let mut lib = Self::new();
        for p in paths {
            lib.insert(load_scene(&p)?)?;
        }
        Ok(lib)
    }

    pub fn get(&self, id: &str) -> Result<&Scene, SceneError> {
        self.scenes.get(id).ok_or_else(|| SceneError::UnknownScene(id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.scenes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Scene> {
        self.scenes.values()
    }
}
