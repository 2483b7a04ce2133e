use std::path::Path;

use gaussys_core::interval::Interval;
use gaussys_core::processes::TimePoint;
use gaussys_core::sampler::Strategy;
use gaussys_core::verify::{Design, Query};
use gaussys_core::PairSpec;
use serde::{Deserialize, Deserializer};

/// Contents of the `--input` file. Every field is optional at parse time;
/// each subcommand checks for the ones it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub pair: Option<PairSpec>,
    pub pair_b: Option<PairSpec>,
    /// One query object or a list of them.
    #[serde(default, deserialize_with = "one_or_many")]
    pub query: Vec<Query>,
    pub design: Option<Design>,
    pub replicates: Option<u64>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
    /// Sampler used by the Monte Carlo estimators.
    pub strategy: Option<Strategy>,
    pub simulation: Option<SimulationSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub times: Vec<TimePoint>,
    pub boxes: Vec<Vec<Interval>>,
    #[serde(default)]
    pub strategy: Strategy,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Query>, D::Error> {
    let v = serde_json::Value::deserialize(d)?;
    let parsed = if v.is_array() {
        serde_json::from_value::<Vec<Query>>(v)
    } else {
        serde_json::from_value::<Query>(v).map(|q| vec![q])
    };
    parsed.map_err(serde::de::Error::custom)
}

/// Reading or parsing failure, rendered with the file name and, for
/// malformed JSON, the line and column.
#[derive(Debug)]
pub struct ConfigError(pub String);

pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        ConfigError(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })
}
