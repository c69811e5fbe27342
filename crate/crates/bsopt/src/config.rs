//! JSON inputs: scenario files, scenario-generation configs and hardware
//! component parameters.

use std::fs;
use std::path::Path;

use bsopt_core::{ComponentParams, Scenario, ScenarioConfig};
use serde::de::DeserializeOwned;

use crate::error::{HarnessError, Result};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.into(),
        source,
    })
}

/// A flat scenario document (`m`, `n`, `k`, `p_max`, `betas`, `noise_powers`, `rates`).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let s: Scenario = read_json(path)?;
    s.validate()?;
    Ok(s)
}

pub fn load_scenario_config(path: &Path) -> Result<ScenarioConfig> {
    let c: ScenarioConfig = read_json(path)?;
    c.validate()?;
    Ok(c)
}

pub fn load_components(path: &Path) -> Result<ComponentParams> {
    let c: ComponentParams = read_json(path)?;
    c.validate()?;
    Ok(c)
}
