use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Values from a JSON config file. Keys are flag names with `-` replaced
/// by `_`; a flag given on the command line takes precedence.
#[derive(Debug, Default)]
pub struct Settings {
    values: Map<String, Value>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => Ok(Settings { values }),
            Ok(_) => Err(CliError::Input(format!(
                "{}: config must be a JSON object",
                path.display()
            ))),
            Err(e) => Err(CliError::Input(format!("{}: {e}", path.display()))),
        }
    }

    /// The flag value if given, else the config value, if any.
    pub fn pick<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
    }

    pub fn raw<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Input(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn or<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let s = Settings {
            values: serde_json::from_str(r#"{"seed": 4, "depth": 12}"#).unwrap(),
        };
        assert_eq!(s.or(Some(9u64), "seed", 0).unwrap(), 9);
        assert_eq!(s.or(None::<u64>, "seed", 0).unwrap(), 4);
        assert_eq!(s.or(None::<u32>, "queries", 150).unwrap(), 150);
        assert!(s.pick(None::<String>, "depth").is_err());
    }
}
