//! Result documents.

use serde::Serialize;
use serde_json::{Map, Value};

pub const RESULT_VERSION: u32 = 1;

/// One command's output: echoed inputs, resolution parameters,
/// measurements, truncation residuals and empirical constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResultDocument {
    pub version: u32,
    pub command: String,
    pub inputs: Map<String, Value>,
    pub parameters: Map<String, Value>,
    pub measurements: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub empirical_constants: Map<String, Value>,
}

impl ResultDocument {
    pub fn new(command: &str) -> Self {
        Self { version: RESULT_VERSION, command: command.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub fn measure(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.measurements.insert(key.to_string(), v.into());
        self
    }

    pub fn residual(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.residuals.insert(key.to_string(), v.into());
        self
    }

    pub fn constant(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.empirical_constants.insert(key.to_string(), v.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

/// A finite number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: schottky_lab::Complex) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}
