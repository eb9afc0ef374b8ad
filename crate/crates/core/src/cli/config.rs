//! Coupled-system configuration document (TOML).
//!
//! ```toml
//! k = 0.05
//! port_impedance = 50.0          # optional, default 50
//! temperatures = [20.0, 30.0]
//! prominence_db = 1.0            # optional
//!
//! [reader]
//! inductance = 8.35e-6
//! resistance = 2.0
//! self_capacitance = 0.0         # optional
//! series_capacitance = 66e-12    # exactly one of series_capacitance / f_target
//!
//! [sensor]
//! inductance = 8.35e-6
//! resistance = 2.0
//!
//! [sensor.capacitor]
//! kind = "fixed"                 # or "model"
//! capacitance = 66e-12
//! esr = 0.0
//! # kind = "model": `path` to a model JSON (relative to this file) or an
//! # inline `model` table; optional `frequency_tag` must match the model's.
//!
//! [grid]
//! start = 1e6
//! stop = 30e6
//! points = 2901
//! ```
//!
//! Unknown keys are rejected; errors carry the offending key path.

use std::path::Path;

use serde::Deserialize;

use crate::composite::CompositeResponseModel;
use crate::coupled::{solve_tuning_capacitor, CoilParams, CoupledSystem, SensorCapacitor};
use crate::readout::DEFAULT_PROMINENCE_DB;
use crate::rfnet::{FrequencyGrid, DEFAULT_Z0};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    k: f64,
    #[serde(default = "default_z0")]
    port_impedance: f64,
    temperatures: Vec<f64>,
    #[serde(default = "default_prominence")]
    prominence_db: f64,
    reader: RawReader,
    sensor: RawSensor,
    grid: RawGrid,
}

fn default_z0() -> f64 {
    DEFAULT_Z0
}

fn default_prominence() -> f64 {
    DEFAULT_PROMINENCE_DB
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReader {
    inductance: f64,
    resistance: f64,
    #[serde(default)]
    self_capacitance: f64,
    series_capacitance: Option<f64>,
    f_target: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensor {
    inductance: f64,
    resistance: f64,
    #[serde(default)]
    self_capacitance: f64,
    capacitor: RawCapacitor,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawCapacitor {
    Fixed {
        capacitance: f64,
        #[serde(default)]
        esr: f64,
    },
    Model {
        path: Option<String>,
        model: Option<CompositeResponseModel>,
        frequency_tag: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    points: usize,
}

/// A model file is either a bare model or the output of `lcsense fit`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ModelFile {
    Fit { model: CompositeResponseModel },
    Bare(CompositeResponseModel),
}

pub fn load_model_json(text: &str) -> Result<CompositeResponseModel, String> {
    let parsed: ModelFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let model = match parsed {
        ModelFile::Fit { model } | ModelFile::Bare(model) => model,
    };
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub system: CoupledSystem,
    pub grid: FrequencyGrid,
    pub temperatures: Vec<f64>,
    pub prominence_db: f64,
}

impl SystemConfig {
    /// Parses and validates a configuration. `base_dir` resolves relative
    /// model paths.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            err(&path, inner.message().trim().to_string())
        })?;

        let reader_capacitance = match (raw.reader.series_capacitance, raw.reader.f_target) {
            (Some(c), None) => c,
            (None, Some(f)) => solve_tuning_capacitor(raw.reader.inductance, f)
                .map_err(|e| err("reader.f_target", e.to_string()))?,
            _ => {
                return Err(err(
                    "reader",
                    "exactly one of `series_capacitance` or `f_target` is required",
                ))
            }
        };

        let sensor_capacitor = match raw.sensor.capacitor {
            RawCapacitor::Fixed { capacitance, esr } => SensorCapacitor::Fixed { capacitance, esr },
            RawCapacitor::Model {
                path,
                model,
                frequency_tag,
            } => {
                let model = match (path, model) {
                    (Some(p), None) => {
                        let full = base_dir.join(&p);
                        let text = std::fs::read_to_string(&full).map_err(|e| {
                            err("sensor.capacitor.path", format!("{}: {e}", full.display()))
                        })?;
                        load_model_json(&text).map_err(|e| err("sensor.capacitor.path", e))?
                    }
                    (None, Some(m)) => {
                        m.validate()
                            .map_err(|e| err("sensor.capacitor.model", e.to_string()))?;
                        m
                    }
                    _ => {
                        return Err(err(
                            "sensor.capacitor",
                            "a model capacitor needs exactly one of `path` or `model`",
                        ))
                    }
                };
                if let Some(tag) = frequency_tag {
                    match model.frequency_tag {
                        Some(own) if own != tag => {
                            return Err(err(
                                "sensor.capacitor.frequency_tag",
                                format!("model is tagged {own} Hz, config asks for {tag} Hz"),
                            ))
                        }
                        _ => {}
                    }
                }
                let model = match frequency_tag {
                    Some(tag) => model
                        .with_frequency_tag(tag)
                        .map_err(|e| err("sensor.capacitor.frequency_tag", e.to_string()))?,
                    None => model,
                };
                SensorCapacitor::Model(model)
            }
        };

        let system = CoupledSystem {
            reader: CoilParams {
                inductance: raw.reader.inductance,
                resistance: raw.reader.resistance,
                self_capacitance: raw.reader.self_capacitance,
            },
            reader_capacitance,
            sensor: CoilParams {
                inductance: raw.sensor.inductance,
                resistance: raw.sensor.resistance,
                self_capacitance: raw.sensor.self_capacitance,
            },
            sensor_capacitor,
            k: raw.k,
            port_impedance: raw.port_impedance,
        };
        system
            .validate()
            .map_err(|e| err("system", e.to_string()))?;

        let grid = FrequencyGrid::linspace(raw.grid.start, raw.grid.stop, raw.grid.points)
            .map_err(|e| err("grid", e.to_string()))?;
        if raw.temperatures.is_empty() {
            return Err(err("temperatures", "at least one temperature is required"));
        }
        if let Some(i) = raw.temperatures.iter().position(|t| !t.is_finite()) {
            return Err(err(
                &format!("temperatures[{i}]"),
                "temperature must be finite",
            ));
        }
        if !(raw.prominence_db > 0.0) {
            return Err(err("prominence_db", "must be positive"));
        }
        Ok(Self {
            system,
            grid,
            temperatures: raw.temperatures,
            prominence_db: raw.prominence_db,
        })
    }
}
