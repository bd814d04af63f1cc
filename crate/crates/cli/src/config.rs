//! Defaults: flags override `CARTIER_LAB_CONFIG` (a JSON file), which
//! overrides the built-ins.

use std::path::Path;

use serde_json::Value;

pub const CONFIG_ENV: &str = "CARTIER_LAB_CONFIG";

const KEYS: &[&str] = &["ring", "trunc", "k", "vbound", "seed", "max_n", "universal_ceiling", "json", "timing"];

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub ring: Option<String>,
    pub trunc: Option<u32>,
    pub k: Option<usize>,
    pub vbound: Option<usize>,
    pub seed: Option<u64>,
    pub max_n: Option<u64>,
    pub universal_ceiling: Option<usize>,
    pub json: Option<bool>,
    pub timing: Option<bool>,
}

impl Config {
    /// Reads the file named by the environment variable, if set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => Self::load(Path::new(&path)),
            None => Ok(Config::default()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{CONFIG_ENV}: cannot read {}: {e}", path.display()))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| format!("{CONFIG_ENV}: {}: {e}", path.display()))?;
        Self::from_json(&v).map_err(|e| format!("{CONFIG_ENV}: {}: {e}", path.display()))
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or("config must be a JSON object")?;
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(format!("unknown key `{k}`; expected one of {}", KEYS.join(", ")));
        }
        let uint = |key: &str| -> Result<Option<u64>, String> {
            match obj.get(key) {
                None => Ok(None),
                Some(x) => x.as_u64().map(Some).ok_or_else(|| format!("`{key}` must be a non-negative integer")),
            }
        };
        let boolean = |key: &str| -> Result<Option<bool>, String> {
            match obj.get(key) {
                None => Ok(None),
                Some(x) => x.as_bool().map(Some).ok_or_else(|| format!("`{key}` must be true or false")),
            }
        };
        let ring = match obj.get("ring") {
            None => None,
            Some(x) => Some(x.as_str().ok_or("`ring` must be a string")?.to_string()),
        };
        Ok(Config {
            ring,
            trunc: uint("trunc")?.map(|x| x as u32),
            k: uint("k")?.map(|x| x as usize),
            vbound: uint("vbound")?.map(|x| x as usize),
            seed: uint("seed")?,
            max_n: uint("max_n")?,
            universal_ceiling: uint("universal_ceiling")?.map(|x| x as usize),
            json: boolean("json")?,
            timing: boolean("timing")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_known_keys() {
        let c = Config::from_json(&json!({"ring": "Z/7", "trunc": 5, "json": true})).unwrap();
        assert_eq!(c.ring.as_deref(), Some("Z/7"));
        assert_eq!(c.trunc, Some(5));
        assert_eq!(c.json, Some(true));
        assert_eq!(c.k, None);
    }

    #[test]
    fn rejects_unknown_and_mistyped_keys() {
        assert!(Config::from_json(&json!({"rings": "Z"})).is_err());
        assert!(Config::from_json(&json!({"trunc": "5"})).is_err());
        assert!(Config::from_json(&json!([1])).is_err());
    }
}
