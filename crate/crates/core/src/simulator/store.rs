//! Scenario directories: `map.json`, `truth.csv`, `slam.csv`, `scenario.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DriftModel, Scenario, ScenarioKind, ScenarioOptions};
use crate::error::{Error, Result};
use crate::geometry::{InitialConditions, Trajectory};
use crate::io::{read_json, read_trajectory, write_json, write_trajectory};
use crate::worldmap::{io as map_io, PolylineMap};

pub const SCENARIO_VERSION: u32 = 1;

/// Contents of `scenario.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioManifest {
    pub version: u32,
    pub name: String,
    pub kind: ScenarioKind,
    pub length: f64,
    pub step: f64,
    pub options: ScenarioOptions,
    pub drift: DriftModel,
    pub init: InitialConditions,
}

/// A scenario read back from disk.
#[derive(Debug, Clone)]
pub struct StoredScenario {
    pub manifest: ScenarioManifest,
    pub map: PolylineMap,
    pub truth: Trajectory,
    pub slam: Trajectory,
}

pub fn save_scenario(dir: impl AsRef<Path>, scenario: &Scenario) -> Result<Trajectory> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let slam = scenario.slam()?;
    let manifest = ScenarioManifest {
        version: SCENARIO_VERSION,
        name: scenario.name.clone(),
        kind: scenario.kind,
        length: scenario.length,
        step: scenario.step,
        options: scenario.options,
        drift: scenario.drift,
        init: scenario.init()?,
    };
    map_io::write_map(dir.join("map.json"), &scenario.map)?;
    write_trajectory(dir.join("truth.csv"), &scenario.truth)?;
    write_trajectory(dir.join("slam.csv"), &slam)?;
    write_json(&dir.join("scenario.json"), &manifest)?;
    Ok(slam)
}

pub fn load_scenario(dir: impl AsRef<Path>) -> Result<StoredScenario> {
    let dir = dir.as_ref();
    let path = dir.join("scenario.json");
    let manifest: ScenarioManifest = read_json(&path)?;
    if manifest.version != SCENARIO_VERSION {
        return Err(Error::UnsupportedVersion {
            path,
            found: manifest.version,
            expected: SCENARIO_VERSION,
        });
    }
    Ok(StoredScenario {
        manifest,
        map: map_io::read_map(dir.join("map.json"))?,
        truth: read_trajectory(dir.join("truth.csv"))?,
        slam: read_trajectory(dir.join("slam.csv"))?,
    })
}
