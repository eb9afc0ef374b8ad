//! Reader/sensor resonator pair: two series RLC loops linked by a mutual
//! inductance, each terminated in the port impedance.
//!
//! Per frequency the mesh impedance matrix is
//!
//! ```text
//! Z11 = R_r + jwL_r + 1/(jwC_r)
//! Z22 = R_s + jwL_s + ESR(T) + 1/(jwC(T))
//! Z12 = Z21 = jwM,  M = k sqrt(L_r L_s)
//! ```
//!
//! When a coil carries a parallel self-capacitance it is placed across the
//! coil terminals, i.e. across the coupled R-L pair, before the series
//! capacitors are added.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composite::{CompositeError, CompositeResponseModel};
use crate::rfnet::{z_to_s_matrix, FrequencyGrid, Mat2, RfError, TwoPortSweep};

/// Relative half-width of the "critical" band around k_crit.
pub const CRITICAL_DEAD_BAND: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoupledError {
    #[error("{0} must be positive and finite")]
    Domain(&'static str),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("sensor capacitor is temperature dependent; a temperature is required")]
    MissingTemperature,
    #[error("loop {0} has zero total resistance (infinite Q)")]
    InfiniteQ(&'static str),
    #[error(transparent)]
    Model(#[from] CompositeError),
    #[error(transparent)]
    Network(#[from] RfError),
}

/// f = 1 / (2 pi sqrt(L C)).
pub fn resonant_frequency(l: f64, c: f64) -> Result<f64, CoupledError> {
    if !(l.is_finite() && l > 0.0) {
        return Err(CoupledError::Domain("inductance"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(CoupledError::Domain("capacitance"));
    }
    Ok(1.0 / (2.0 * PI * (l * c).sqrt()))
}

/// Series capacitance that tunes inductance `l` to `f_target`.
pub fn solve_tuning_capacitor(l: f64, f_target: f64) -> Result<f64, CoupledError> {
    if !(l.is_finite() && l > 0.0) {
        return Err(CoupledError::Domain("inductance"));
    }
    if !(f_target.is_finite() && f_target > 0.0) {
        return Err(CoupledError::Domain("target frequency"));
    }
    let w = 2.0 * PI * f_target;
    Ok(1.0 / (w * w * l))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoilParams {
    pub inductance: f64,
    pub resistance: f64,
    #[serde(default)]
    pub self_capacitance: f64,
}

impl CoilParams {
    pub fn new(inductance: f64, resistance: f64) -> Self {
        Self {
            inductance,
            resistance,
            self_capacitance: 0.0,
        }
    }

    fn validate(&self, name: &str) -> Result<(), CoupledError> {
        let ok = self.inductance.is_finite()
            && self.inductance > 0.0
            && self.resistance.is_finite()
            && self.resistance >= 0.0
            && self.self_capacitance.is_finite()
            && self.self_capacitance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(CoupledError::InvalidSystem(format!(
                "{name} coil needs L > 0, R >= 0 and self-capacitance >= 0"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SensorCapacitor {
    Fixed { capacitance: f64, esr: f64 },
    Model(CompositeResponseModel),
}

impl SensorCapacitor {
    /// Capacitance and loss terms at temperature `t`.
    fn resolve(&self, t: Option<f64>) -> Result<ResolvedCapacitor, CoupledError> {
        match self {
            SensorCapacitor::Fixed { capacitance, esr } => Ok(ResolvedCapacitor {
                capacitance: *capacitance,
                fixed_esr: *esr,
                tan_delta: 0.0,
            }),
            SensorCapacitor::Model(model) => {
                let t = t.ok_or(CoupledError::MissingTemperature)?;
                let r = model.evaluate(t)?;
                Ok(ResolvedCapacitor {
                    capacitance: r.capacitance,
                    fixed_esr: 0.0,
                    tan_delta: r.tan_delta,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedCapacitor {
    capacitance: f64,
    fixed_esr: f64,
    tan_delta: f64,
}

impl ResolvedCapacitor {
    fn esr(&self, w: f64) -> f64 {
        self.fixed_esr + self.tan_delta / (w * self.capacitance)
    }

    fn impedance(&self, w: f64) -> Complex64 {
        Complex64::new(self.esr(w), -1.0 / (w * self.capacitance))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSystem {
    pub reader: CoilParams,
    /// Reader series tuning capacitor, F.
    pub reader_capacitance: f64,
    pub sensor: CoilParams,
    pub sensor_capacitor: SensorCapacitor,
    /// Coupling coefficient in [0, 1).
    pub k: f64,
    pub port_impedance: f64,
}

impl CoupledSystem {
    pub fn validate(&self) -> Result<(), CoupledError> {
        self.reader.validate("reader")?;
        self.sensor.validate("sensor")?;
        if !(self.reader_capacitance.is_finite() && self.reader_capacitance > 0.0) {
            return Err(CoupledError::InvalidSystem(
                "reader capacitance must be positive".into(),
            ));
        }
        match &self.sensor_capacitor {
            SensorCapacitor::Fixed { capacitance, esr } => {
                if !(capacitance.is_finite()
                    && *capacitance > 0.0
                    && esr.is_finite()
                    && *esr >= 0.0)
                {
                    return Err(CoupledError::InvalidSystem(
                        "sensor capacitor needs C > 0 and ESR >= 0".into(),
                    ));
                }
            }
            SensorCapacitor::Model(m) => m.validate()?,
        }
        if !(self.k >= 0.0 && self.k < 1.0) {
            return Err(CoupledError::InvalidSystem(format!(
                "coupling coefficient {} outside [0, 1)",
                self.k
            )));
        }
        if !(self.port_impedance.is_finite() && self.port_impedance > 0.0) {
            return Err(CoupledError::InvalidSystem(
                "port impedance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn mutual_inductance(&self) -> f64 {
        self.k * (self.reader.inductance * self.sensor.inductance).sqrt()
    }

    /// Sensor series capacitance at temperature `t` (or the fixed value).
    pub fn sensor_capacitance(&self, t: Option<f64>) -> Result<f64, CoupledError> {
        Ok(self.sensor_capacitor.resolve(t)?.capacitance)
    }

    fn impedance_matrix(&self, f: f64, sensor_cap: &ResolvedCapacitor) -> Mat2 {
        let w = 2.0 * PI * f;
        let j = Complex64::new(0.0, 1.0);
        let zm = j * (w * self.mutual_inductance());
        let coils = Mat2::new(
            Complex64::new(self.reader.resistance, w * self.reader.inductance),
            zm,
            zm,
            Complex64::new(self.sensor.resistance, w * self.sensor.inductance),
        );
        let coils = if self.reader.self_capacitance > 0.0 || self.sensor.self_capacitance > 0.0 {
            let shunt = Mat2::diag(
                j * (w * self.reader.self_capacitance),
                j * (w * self.sensor.self_capacitance),
            );
            coils
                .inverse()
                .and_then(|y| (y + shunt).inverse())
                .unwrap_or_else(Mat2::nan)
        } else {
            coils
        };
        let reader_cap = Complex64::new(0.0, -1.0 / (w * self.reader_capacitance));
        coils + Mat2::diag(reader_cap, sensor_cap.impedance(w))
    }

    /// Loaded quality factors of the reader and sensor loops at their own
    /// series resonances, counting coil, port and capacitor losses.
    pub fn loaded_q(&self, t: Option<f64>) -> Result<(f64, f64), CoupledError> {
        let cap = self.sensor_capacitor.resolve(t)?;
        let f_r = resonant_frequency(self.reader.inductance, self.reader_capacitance)?;
        let f_s = resonant_frequency(self.sensor.inductance, cap.capacitance)?;
        let w_r = 2.0 * PI * f_r;
        let w_s = 2.0 * PI * f_s;
        let r_reader = self.reader.resistance + self.port_impedance;
        let r_sensor = self.sensor.resistance + self.port_impedance + cap.esr(w_s);
        if r_reader <= 0.0 {
            return Err(CoupledError::InfiniteQ("reader"));
        }
        if r_sensor <= 0.0 {
            return Err(CoupledError::InfiniteQ("sensor"));
        }
        Ok((
            w_r * self.reader.inductance / r_reader,
            w_s * self.sensor.inductance / r_sensor,
        ))
    }
}

/// Simulated sweep; points whose conversion failed hold NaN and are listed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSweep {
    pub sweep: TwoPortSweep,
    pub point_errors: Vec<RfError>,
}

pub fn sweep(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    t: Option<f64>,
) -> Result<SimulatedSweep, CoupledError> {
    system.validate()?;
    let cap = system.sensor_capacitor.resolve(t)?;
    let z0 = system.port_impedance;
    let mut point_errors = Vec::new();
    let s = grid
        .points()
        .iter()
        .enumerate()
        .map(|(index, &f)| {
            let z = system.impedance_matrix(f, &cap);
            match z_to_s_matrix(&z, z0).filter(Mat2::is_finite) {
                Some(s) => s,
                None => {
                    point_errors.push(RfError::Singular {
                        index,
                        frequency: f,
                    });
                    Mat2::nan()
                }
            }
        })
        .collect();
    Ok(SimulatedSweep {
        sweep: TwoPortSweep::new(grid.clone(), s, z0)?,
        point_errors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Under,
    Critical,
    Over,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingAnalysis {
    pub regime: Regime,
    pub k_crit: f64,
    pub q_reader: f64,
    pub q_sensor: f64,
}

/// Classifies k against k_crit = 1/sqrt(Q1 Q2); within the dead band
/// (boundaries included) the system is critical.
pub fn coupling_regime(
    system: &CoupledSystem,
    t: Option<f64>,
) -> Result<CouplingAnalysis, CoupledError> {
    system.validate()?;
    let (q_reader, q_sensor) = system.loaded_q(t)?;
    let k_crit = 1.0 / (q_reader * q_sensor).sqrt();
    let k = system.k;
    let regime = if (k - k_crit).abs() <= CRITICAL_DEAD_BAND * k_crit {
        Regime::Critical
    } else if k < k_crit {
        Regime::Under
    } else {
        Regime::Over
    };
    Ok(CouplingAnalysis {
        regime,
        k_crit,
        q_reader,
        q_sensor,
    })
}

/// One sweep per temperature, in input order.
pub fn temperature_sweep(
    system: &CoupledSystem,
    grid: &FrequencyGrid,
    temperatures: &[f64],
) -> Result<Vec<(f64, SimulatedSweep)>, CoupledError> {
    if !matches!(system.sensor_capacitor, SensorCapacitor::Model(_)) {
        return Err(CoupledError::InvalidSystem(
            "temperature sweep needs a temperature-dependent sensor capacitor".into(),
        ));
    }
    temperatures
        .iter()
        .map(|&t| sweep(system, grid, Some(t)).map(|s| (t, s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::ResponseLaw;

    const PF: f64 = 1e-12;

    #[test]
    fn tuning_anchor() {
        let f = resonant_frequency(8.35e-6, 66.0 * PF).unwrap();
        assert!((f / 6.78e6 - 1.0).abs() < 1e-3, "f = {f}");
        let c = solve_tuning_capacitor(8.35e-6, 6.78e6).unwrap();
        assert!((c / (66.0 * PF) - 1.0).abs() < 1e-2);
        let back = resonant_frequency(8.35e-6, c).unwrap();
        assert!((back / 6.78e6 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_and_scaling_cases() {
        assert!((resonant_frequency(1.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let f1 = resonant_frequency(1e-6, 1e-9).unwrap();
        let f2 = resonant_frequency(1e-6, 0.5e-9).unwrap();
        assert!((f2 / f1 - 2f64.sqrt()).abs() < 1e-12);
        let c1 = solve_tuning_capacitor(1e-6, 1e6).unwrap();
        let c2 = solve_tuning_capacitor(1e-6, 2e6).unwrap();
        assert!((c1 / c2 - 4.0).abs() < 1e-12);
        assert!(resonant_frequency(0.0, 1.0).is_err());
        assert!(resonant_frequency(1.0, -1.0).is_err());
        assert!(solve_tuning_capacitor(1.0, 0.0).is_err());
    }

    fn symmetric(k: f64, z0: f64) -> CoupledSystem {
        CoupledSystem {
            reader: CoilParams::new(8.35e-6, 2.0),
            reader_capacitance: 66.0 * PF,
            sensor: CoilParams::new(8.35e-6, 2.0),
            sensor_capacitor: SensorCapacitor::Fixed {
                capacitance: 66.0 * PF,
                esr: 0.0,
            },
            k,
            port_impedance: z0,
        }
    }

    #[test]
    fn decoupled_ports_are_isolated() {
        let grid = FrequencyGrid::linspace(4e6, 10e6, 601).unwrap();
        let out = sweep(&symmetric(0.0, 50.0), &grid, None).unwrap();
        assert!(out.point_errors.is_empty());
        assert!(out.sweep.parameter(2, 1).iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn symmetric_critical_coupling_closed_form() {
        let sys = symmetric(0.05, 2.0);
        let a = coupling_regime(&sys, None).unwrap();
        let f0 = resonant_frequency(8.35e-6, 66.0 * PF).unwrap();
        let q = 2.0 * PI * f0 * 8.35e-6 / 4.0;
        assert!((a.k_crit * q - 1.0).abs() < 1e-12);
        assert_eq!(a.regime, Regime::Over);
        assert_eq!(
            coupling_regime(&symmetric(0.0, 2.0), None).unwrap().regime,
            Regime::Under
        );
        assert_eq!(
            coupling_regime(&symmetric(0.5, 50.0), None).unwrap().regime,
            Regime::Over
        );
        let crit = symmetric(a.k_crit * 1.019, 2.0);
        assert_eq!(
            coupling_regime(&crit, None).unwrap().regime,
            Regime::Critical
        );
        let under = symmetric(a.k_crit * 0.97, 2.0);
        assert_eq!(coupling_regime(&under, None).unwrap().regime, Regime::Under);
    }

    #[test]
    fn model_sensor_requires_temperature() {
        let mut sys = symmetric(0.05, 50.0);
        sys.sensor_capacitor = SensorCapacitor::Model(
            CompositeResponseModel::new(
                ResponseLaw::ExpDecay {
                    rr_max: 0.8,
                    tau: 20.0,
                },
                66.0 * PF,
                20.0,
            )
            .unwrap(),
        );
        let grid = FrequencyGrid::linspace(4e6, 10e6, 11).unwrap();
        assert_eq!(
            sweep(&sys, &grid, None),
            Err(CoupledError::MissingTemperature)
        );
        assert!(sweep(&sys, &grid, Some(50.0)).is_ok());
        assert!(matches!(
            sweep(&sys, &grid, Some(200.0)),
            Err(CoupledError::Model(CompositeError::OutOfRange { .. }))
        ));
    }

    #[test]
    fn invalid_systems() {
        let grid = FrequencyGrid::linspace(4e6, 10e6, 11).unwrap();
        let mut sys = symmetric(1.0, 50.0);
        assert!(matches!(
            sweep(&sys, &grid, None),
            Err(CoupledError::InvalidSystem(_))
        ));
        sys.k = 0.1;
        sys.port_impedance = 0.0;
        assert!(sweep(&sys, &grid, None).is_err());
        sys.port_impedance = 50.0;
        sys.reader.inductance = -1.0;
        assert!(sweep(&sys, &grid, None).is_err());
        let fixed = symmetric(0.1, 50.0);
        assert!(temperature_sweep(&fixed, &grid, &[20.0]).is_err());
    }

    #[test]
    fn self_capacitance_lowers_isolated_resonance() {
        // With k = 0 the sensor branch is (R + jwL) || Cp in series with C.
        let mut sys = symmetric(0.0, 50.0);
        sys.sensor.self_capacitance = 10.0 * PF;
        let grid = FrequencyGrid::linspace(6e6, 7e6, 3).unwrap();
        let cap = sys.sensor_capacitor.resolve(None).unwrap();
        let f = 6.5e6;
        let w = 2.0 * PI * f;
        let z = sys.impedance_matrix(f, &cap);
        let coil = Complex64::new(2.0, w * 8.35e-6);
        let expected = coil
            / (Complex64::new(1.0, 0.0) + Complex64::new(0.0, w * 10.0 * PF) * coil)
            + Complex64::new(0.0, -1.0 / (w * 66.0 * PF));
        assert!((z.get(1, 1) - expected).norm() < 1e-9 * expected.norm());
        assert_eq!(z.get(0, 1), Complex64::new(0.0, 0.0));
        assert!(sweep(&sys, &grid, None).is_ok());
    }
}
