use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dae::{Scheme, Tolerances};
use crate::problems::ProblemRecipe;

/// Flat JSON run configuration: recipe parameters and run settings share
/// one object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Informational; the command is taken from the command line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(flatten)]
    pub recipe: ProblemRecipe,
    pub dt: f64,
    pub scheme: Scheme,
    /// Mesh sizes of the spatial convergence study.
    pub k_list: Vec<usize>,
    /// Spatial studies use `dt = dt_factor · h²`.
    pub dt_factor: f64,
    /// Mesh of the temporal convergence study.
    pub temporal_k: usize,
    /// Step counts of the temporal convergence study (successive doublings).
    pub temporal_steps: Vec<usize>,
    pub out: PathBuf,
    pub tolerances: Tolerances,
    /// Also write `full_state.csv` with every coefficient.
    pub full_state: bool,
    /// Also write the assembled system as MatrixMarket files plus manifest.
    pub export_system: bool,
    /// Also write the mesh as plain-text node, element and tag files.
    pub export_mesh: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            recipe: ProblemRecipe::default(),
            dt: 1.0 / 32.0,
            scheme: Scheme::BackwardEuler,
            k_list: vec![4, 8, 16],
            dt_factor: 0.25,
            temporal_k: 16,
            temporal_steps: vec![8, 16, 32, 64],
            out: PathBuf::from("out"),
            tolerances: Tolerances::default(),
            full_state: false,
            export_system: false,
            export_mesh: false,
        }
    }
}

impl RunConfig {
    /// Parses a config, rejecting keys that no field accepts.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
        let object = value.as_object().ok_or("config must be a JSON object")?;
        let known = known_keys();
        let unknown: Vec<&str> = object
            .keys()
            .map(String::as_str)
            .filter(|k| !known.contains(*k))
            .collect();
        if !unknown.is_empty() {
            return Err(format!("unknown config keys: {}", unknown.join(", ")));
        }
        serde_json::from_value(value).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.dt_factor > 0.0 && self.dt_factor.is_finite()) {
            return Err(format!("dt_factor must be positive, got {}", self.dt_factor));
        }
        if self.k_list.iter().any(|&k| k < 2) || self.k_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err("k_list entries must be at least 2 and strictly increasing".into());
        }
        if self.temporal_steps.windows(2).any(|w| w[1] != 2 * w[0]) || self.temporal_steps.contains(&0) {
            return Err("temporal_steps must be positive and successively doubled".into());
        }
        self.recipe.validate()
    }
}

fn known_keys() -> BTreeSet<String> {
    let mut keys = BTreeSet::from(["command".to_string(), "t_final".to_string()]);
    if let serde_json::Value::Object(map) = serde_json::to_value(RunConfig::default()).expect("config serializes") {
        keys.extend(map.into_iter().map(|(k, _)| k));
    }
    keys
}
