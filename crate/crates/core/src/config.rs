//! Configuration files in TOML or JSON.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Environment variable naming a configuration file.
pub const CONFIG_ENV: &str = "LATFLUX_CONFIG";

/// Parses `text` as JSON if it looks like a JSON object, else as TOML.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// The explicit path wins over the environment variable.
pub fn config_path(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

/// Loads the selected configuration file, or the default when none is given.
pub fn resolve_config<T: DeserializeOwned + Default>(explicit: Option<&Path>) -> Result<T> {
    match config_path(explicit) {
        Some(p) => load_config(&p),
        None => Ok(T::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::PipelineConfig;

    #[test]
    fn toml_and_json_agree() {
        let a: PipelineConfig = parse_config("seed = 7\n[forces]\nw_rep = 2.0\n").unwrap();
        let b: PipelineConfig = parse_config(r#"{"seed": 7, "forces": {"w_rep": 2.0}}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 7);
        assert_eq!(a.forces.w_rep, 2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_config::<PipelineConfig>("colour = 1\n").is_err());
    }

    #[test]
    fn flag_wins_over_environment() {
        let p = Path::new("/explicit.toml");
        assert_eq!(config_path(Some(p)), Some(p.to_path_buf()));
    }
}
