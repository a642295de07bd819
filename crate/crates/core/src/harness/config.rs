use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ArrayGeometry;
use crate::error::{Error, Result};
use crate::estimators::DEFAULT_GAMMA;

/// Monte Carlo experiment settings. Every field is optional in the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Antenna count.
    #[serde(rename = "M", alias = "m", alias = "antennas")]
    pub antennas: usize,
    /// Propagation paths per channel.
    #[serde(rename = "L", alias = "l", alias = "paths")]
    pub paths: usize,
    /// True noise power (linear).
    #[serde(rename = "N0", alias = "n0")]
    pub n0: f64,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub seed: u64,
    pub outputs: PathBuf,
}

/// `−10, −8, …, 20` dB.
pub fn default_snr_grid_db() -> Vec<f64> {
    (0..16).map(|i| -10.0 + 2.0 * i as f64).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            antennas: 64,
            paths: 3,
            n0: 1.0,
            snr_grid_db: default_snr_grid_db(),
            trials: 10_000,
            gamma: DEFAULT_GAMMA,
            lambda: 3.0,
            seed: 1,
            outputs: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas < 2 {
            return Err(Error::invalid("M", self.antennas, "need at least 2 antennas"));
        }
        if self.paths < 1 {
            return Err(Error::invalid("L", self.paths, "need at least one path"));
        }
        if !(self.n0.is_finite() && self.n0 > 0.0) {
            return Err(Error::invalid("N0", self.n0, "must be positive and finite"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::invalid("snr_grid_db", "[]", "must be nonempty"));
        }
        if let Some(s) = self.snr_grid_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::invalid("snr_grid_db", s, "entries must be finite"));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials", self.trials, "must be at least 1"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid("gamma", self.gamma, "must be positive and finite"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid("lambda", self.lambda, "must be nonnegative and finite"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::ula(self.antennas)
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(linear)`.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::default();
        assert_eq!(c.antennas, 64);
        assert_eq!(c.n0, 1.0);
        assert_eq!(c.trials, 10_000);
        assert_eq!(c.lambda, 3.0);
        assert_eq!(c.snr_grid_db.len(), 16);
        assert_eq!(c.snr_grid_db[0], -10.0);
        assert_eq!(c.snr_grid_db[15], 20.0);
        c.validate().unwrap();
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let c = ExperimentConfig::from_json_str(r#"{"M": 32, "trials": 5, "snr_grid_db": [0, 3]}"#).unwrap();
        assert_eq!(c.antennas, 32);
        assert_eq!(c.trials, 5);
        assert_eq!(c.snr_grid_db, vec![0.0, 3.0]);
        assert_eq!(c.paths, 3);
        let c = ExperimentConfig::from_json_str(r#"{"m": 16, "n0": 2.0, "L": 1}"#).unwrap();
        assert_eq!((c.antennas, c.n0, c.paths), (16, 2.0, 1));
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig { seed: 99, gamma: 1.5, ..Default::default() };
        assert_eq!(ExperimentConfig::from_json_str(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ExperimentConfig::from_json_str(r#"{"trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"snr_grid_db": []}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"N0": -1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"gamma": 0}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"M": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str(r#"{"bogus": 1}"#).is_err());
        assert!(ExperimentConfig::from_json_str("not json").is_err());
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }
}
