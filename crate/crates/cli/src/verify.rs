use serde::{Deserialize, Serialize};

use kspace_core::{is_complete_on, is_model_on, is_sound, is_zero};

use crate::config::SessionConfig;
use crate::error::CliResult;
use crate::instance::Instance;
use crate::wire::Triple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub structure: String,
    pub window: u64,
    pub state: Vec<Triple>,
    pub sound: bool,
    pub complete: bool,
    pub model: bool,
    pub zero: bool,
}

pub fn verify(config: &SessionConfig, triples: &[Triple]) -> CliResult<VerifyReport> {
    let instance = Instance::build(config)?;
    let state = instance.parse_state(triples)?;
    let s = &*instance.structure;
    Ok(VerifyReport {
        structure: s.name(),
        window: config.window,
        state: instance.sorted_state(&state).iter().map(|a| a.triple()).collect(),
        sound: is_sound(s, &state)?,
        complete: is_complete_on(s, &state, &instance.window)?,
        model: is_model_on(s, &state, &instance.window)?,
        zero: is_zero(&instance.realizer, &state)?,
    })
}

/// Parses a state given as a JSON list of triples.
pub fn parse_triples(text: &str) -> CliResult<Vec<Triple>> {
    serde_json::from_str(text).map_err(|e| crate::error::CliError::Config(format!("state: {e}")))
}
