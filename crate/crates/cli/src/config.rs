//! JSON config files, layered under explicit command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn load(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(e.to_string()).context(path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(e.to_string()).context(path.display()))?;
    if !value.is_object() {
        return Err(CliError::validation("config must be a JSON object").context(path.display()));
    }
    Ok(value)
}

/// Fills every flag left unset on the command line from `config`.
///
/// Keys are flag names in snake_case; keys that do not belong to the command are ignored.
pub fn merge<T: Serialize + DeserializeOwned>(
    explicit: &T,
    config: Option<&Value>,
) -> CliResult<T> {
    let Some(Value::Object(base)) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(explicit)?)?);
    };
    let Value::Object(flags) = serde_json::to_value(explicit)? else {
        unreachable!("argument structs serialize to objects");
    };
    let mut merged = base.clone();
    for (k, v) in flags {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::validation(format!("config: {e}")))
}
