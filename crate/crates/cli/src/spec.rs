//! Domain spec files.

use std::collections::BTreeMap;
use std::path::Path;

use schottky_lab::{CircleDomainConfig, Complex, Disk};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SPEC_VERSION: u32 = 1;

/// How a spec was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBlock {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// On-disk description of a circle domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub version: u32,
    pub outer_radius: f64,
    #[serde(default)]
    pub disks: Vec<[f64; 3]>,
    pub basepoint: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorBlock>,
}

impl DomainSpec {
    pub fn from_config(config: &CircleDomainConfig, generator: Option<GeneratorBlock>) -> Self {
        Self {
            version: SPEC_VERSION,
            outer_radius: config.outer_radius,
            disks: config.disks.iter().map(|d| [d.center.re, d.center.im, d.radius]).collect(),
            basepoint: [config.basepoint.re, config.basepoint.im],
            generator,
        }
    }

    /// The configuration without validation.
    pub fn to_config_unchecked(&self) -> CircleDomainConfig {
        CircleDomainConfig {
            outer_radius: self.outer_radius,
            disks: self
                .disks
                .iter()
                .map(|d| Disk { center: Complex::new(d[0], d[1]), radius: d[2] })
                .collect(),
            basepoint: Complex::new(self.basepoint[0], self.basepoint[1]),
        }
    }

    /// The validated configuration.
    pub fn to_config(&self) -> Result<CircleDomainConfig, CliError> {
        let config = self.to_config_unchecked();
        config.ensure_valid().map_err(CliError::from)?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: DomainSpec =
            serde_json::from_str(text).map_err(|e| CliError::Unreadable(format!("spec does not parse: {e}")))?;
        if spec.version != SPEC_VERSION {
            return Err(CliError::Unreadable(format!("unsupported spec version {}", spec.version)));
        }
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Unreadable(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("spec serializes")
    }
}
