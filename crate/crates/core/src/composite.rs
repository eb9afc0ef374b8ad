//! Temperature response laws for loaded composite capacitors and their
//! least-squares fitting.
//!
//! Two capacitance laws are supported, both referenced to `(t_ref, c_ref)`:
//!
//! * linear: `C(T) = c_ref (1 + slope_rel (T - t_ref))`
//! * exponential decay: `C(T) = c_ref (1 - rr_max (1 - exp(-(T - t_ref) / tau)))`
//!
//! The loss tangent follows `tand(T) = tand_ref (1 + tand_slope_rel (T - t_ref))`.
//! A model carries an optional frequency tag; models measured at different
//! frequencies are distinct objects and are never blended.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default calibrated temperature range in °C.
pub const DEFAULT_VALIDITY: (f64, f64) = (20.0, 110.0);

const TAU_BOUNDS: (f64, f64) = (1.0, 500.0);
const TAU_SCAN_POINTS: usize = 241;
const GOLDEN_MAX_ITER: usize = 200;
const GOLDEN_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompositeError {
    #[error("temperature {t} °C outside validity range [{lo}, {hi}] °C")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("reference value must be non-zero and finite")]
    ZeroReference,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("need at least {needed} points to fit, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("fit failed: {reason} (rmse {rmse:e})")]
    FitFailure { reason: String, rmse: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseLaw {
    Linear { slope_rel: f64 },
    ExpDecay { rr_max: f64, tau: f64 },
}

impl ResponseLaw {
    fn relative_capacitance(&self, dt: f64) -> f64 {
        match *self {
            ResponseLaw::Linear { slope_rel } => 1.0 + slope_rel * dt,
            ResponseLaw::ExpDecay { rr_max, tau } => 1.0 - rr_max * (1.0 - (-dt / tau).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeResponseModel {
    pub law: ResponseLaw,
    /// Capacitance at `t_ref`, F.
    pub c_ref: f64,
    /// Reference temperature, °C.
    pub t_ref: f64,
    #[serde(default)]
    pub tand_ref: f64,
    #[serde(default)]
    pub tand_slope_rel: f64,
    #[serde(default = "default_validity")]
    pub validity: (f64, f64),
    #[serde(default)]
    pub extrapolate: bool,
    /// Frequency (Hz) at which the law was measured.
    #[serde(default)]
    pub frequency_tag: Option<f64>,
}

fn default_validity() -> (f64, f64) {
    DEFAULT_VALIDITY
}

/// Capacitance and loss tangent at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub capacitance: f64,
    pub tan_delta: f64,
}

impl Response {
    /// Equivalent series resistance tand / (2 pi f C) at frequency `f`.
    pub fn esr(&self, f: f64) -> f64 {
        self.tan_delta / (2.0 * PI * f * self.capacitance)
    }
}

impl CompositeResponseModel {
    pub fn new(law: ResponseLaw, c_ref: f64, t_ref: f64) -> Result<Self, CompositeError> {
        let model = Self {
            law,
            c_ref,
            t_ref,
            tand_ref: 0.0,
            tand_slope_rel: 0.0,
            validity: DEFAULT_VALIDITY,
            extrapolate: false,
            frequency_tag: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_loss_tangent(
        mut self,
        tand_ref: f64,
        tand_slope_rel: f64,
    ) -> Result<Self, CompositeError> {
        self.tand_ref = tand_ref;
        self.tand_slope_rel = tand_slope_rel;
        self.validate()?;
        Ok(self)
    }

    pub fn with_validity(mut self, lo: f64, hi: f64) -> Result<Self, CompositeError> {
        self.validity = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn with_extrapolation(mut self, enabled: bool) -> Self {
        self.extrapolate = enabled;
        self
    }

    pub fn with_frequency_tag(mut self, f: f64) -> Result<Self, CompositeError> {
        self.frequency_tag = Some(f);
        self.validate()?;
        Ok(self)
    }

    /// Checks the law's invariants over the validity range.
    pub fn validate(&self) -> Result<(), CompositeError> {
        let bad = |m: &str| Err(CompositeError::InvalidModel(m.to_string()));
        let all_finite = [self.c_ref, self.t_ref, self.tand_ref, self.tand_slope_rel]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return bad("parameters must be finite");
        }
        if self.c_ref <= 0.0 {
            return bad("c_ref must be positive");
        }
        let (lo, hi) = self.validity;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad("validity range must be a finite, non-empty interval");
        }
        if let Some(f) = self.frequency_tag {
            if !(f.is_finite() && f > 0.0) {
                return bad("frequency tag must be positive");
            }
        }
        match self.law {
            ResponseLaw::Linear { slope_rel } => {
                if !slope_rel.is_finite() {
                    return bad("slope_rel must be finite");
                }
                let ends = [lo, hi].map(|t| self.law.relative_capacitance(t - self.t_ref));
                if ends.iter().any(|&r| r <= 0.0) {
                    return bad("linear capacitance must stay positive over the validity range");
                }
            }
            ResponseLaw::ExpDecay { rr_max, tau } => {
                if !(rr_max > 0.0 && rr_max < 1.0) {
                    return bad("rr_max must lie in (0, 1)");
                }
                if !(tau.is_finite() && tau > 0.0) {
                    return bad("tau must be positive");
                }
            }
        }
        let tand_ends =
            [lo, hi].map(|t| self.tand_ref * (1.0 + self.tand_slope_rel * (t - self.t_ref)));
        if self.tand_ref < 0.0 || tand_ends.iter().any(|&v| v < 0.0) {
            return bad("loss tangent must stay non-negative over the validity range");
        }
        Ok(())
    }

    pub fn evaluate(&self, t: f64) -> Result<Response, CompositeError> {
        let (lo, hi) = self.validity;
        if !t.is_finite() || (!self.extrapolate && (t < lo || t > hi)) {
            return Err(CompositeError::OutOfRange { t, lo, hi });
        }
        let dt = t - self.t_ref;
        Ok(Response {
            capacitance: self.c_ref * self.law.relative_capacitance(dt),
            tan_delta: self.tand_ref * (1.0 + self.tand_slope_rel * dt),
        })
    }

    /// Relative capacitance change |C(t) - c_ref| / c_ref.
    pub fn relative_response_at(&self, t: f64) -> Result<f64, CompositeError> {
        let c = self.evaluate(t)?.capacitance;
        relative_response(c, self.c_ref).map(|r| r.magnitude)
    }

    /// Average relative capacitance change per °C across `[t_lo, t_hi]`, in %/°C.
    pub fn sensitivity_pct_per_degc(&self, t_lo: f64, t_hi: f64) -> Result<f64, CompositeError> {
        if !(t_hi > t_lo) {
            return Err(CompositeError::InvalidSeries(
                "empty temperature span".into(),
            ));
        }
        let c_lo = self.evaluate(t_lo)?.capacitance;
        let c_hi = self.evaluate(t_hi)?.capacitance;
        Ok(100.0 * relative_response(c_hi, c_lo)?.magnitude / (t_hi - t_lo))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increase,
    Decrease,
    Unchanged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeResponse {
    /// Fraction, not percent.
    pub magnitude: f64,
    pub direction: Direction,
}

pub fn relative_response(value: f64, reference: f64) -> Result<RelativeResponse, CompositeError> {
    if reference == 0.0 || !reference.is_finite() || !value.is_finite() {
        return Err(CompositeError::ZeroReference);
    }
    let delta = value - reference;
    let direction = if delta > 0.0 {
        Direction::Increase
    } else if delta < 0.0 {
        Direction::Decrease
    } else {
        Direction::Unchanged
    };
    Ok(RelativeResponse {
        magnitude: delta.abs() / reference.abs(),
        direction,
    })
}

/// Measured (temperature °C, value) pairs with strictly increasing temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSeries {
    points: Vec<(f64, f64)>,
}

impl TemperatureSeries {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, CompositeError> {
        for (i, &(t, v)) in points.iter().enumerate() {
            if !(t.is_finite() && v.is_finite()) {
                return Err(CompositeError::InvalidSeries(format!(
                    "non-finite value at row {i}"
                )));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(CompositeError::InvalidSeries(format!(
                    "temperatures must be strictly increasing (row {i})"
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn temperatures(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Linear,
    ExpDecay,
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: CompositeResponseModel,
    /// Root-mean-square residual in the series' value units.
    pub rmse: f64,
    /// Objective evaluations spent on the tau search (0 for linear).
    pub evaluations: usize,
}

/// Ordinary least squares for `y = a + b x`; returns `(a, b, sse)`.
fn linear_lsq(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let sse = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - a - b * xi).powi(2))
        .sum();
    (a, b, sse)
}

fn check_fit_input(data: &TemperatureSeries, needed: usize) -> Result<(), CompositeError> {
    if data.len() < needed {
        return Err(CompositeError::InsufficientPoints {
            needed,
            got: data.len(),
        });
    }
    if data.points().iter().any(|&(_, v)| v <= 0.0) {
        return Err(CompositeError::InvalidSeries(
            "values must be positive".into(),
        ));
    }
    Ok(())
}

fn fitted_model(
    law: ResponseLaw,
    c_ref: f64,
    data: &TemperatureSeries,
) -> Result<CompositeResponseModel, String> {
    let t: Vec<f64> = data.temperatures().collect();
    let model = CompositeResponseModel {
        law,
        c_ref,
        t_ref: t[0],
        tand_ref: 0.0,
        tand_slope_rel: 0.0,
        validity: (t[0], t[t.len() - 1]),
        extrapolate: false,
        frequency_tag: None,
    };
    model.validate().map(|_| model).map_err(|e| e.to_string())
}

fn fit_linear(data: &TemperatureSeries) -> Result<FitReport, CompositeError> {
    check_fit_input(data, 3)?;
    let t_ref = data.points()[0].0;
    let x: Vec<f64> = data.temperatures().map(|t| t - t_ref).collect();
    let y: Vec<f64> = data.points().iter().map(|p| p.1).collect();
    let (a, b, sse) = linear_lsq(&x, &y);
    let rmse = (sse / x.len() as f64).sqrt();
    let model = fitted_model(ResponseLaw::Linear { slope_rel: b / a }, a, data)
        .map_err(|reason| CompositeError::FitFailure { reason, rmse })?;
    Ok(FitReport {
        model,
        rmse,
        evaluations: 0,
    })
}

/// Profiled objective: for fixed tau the law is linear in (c_ref, c_ref rr_max).
struct ExpProfile {
    dt: Vec<f64>,
    y: Vec<f64>,
}

impl ExpProfile {
    fn solve(&self, tau: f64) -> (f64, f64, f64) {
        let g: Vec<f64> = self.dt.iter().map(|d| 1.0 - (-d / tau).exp()).collect();
        linear_lsq(&g, &self.y)
    }

    fn sse(&self, log_tau: f64) -> f64 {
        self.solve(log_tau.exp()).2
    }
}

fn fit_exp_decay(data: &TemperatureSeries) -> Result<FitReport, CompositeError> {
    check_fit_input(data, 4)?;
    let t_ref = data.points()[0].0;
    let profile = ExpProfile {
        dt: data.temperatures().map(|t| t - t_ref).collect(),
        y: data.points().iter().map(|p| p.1).collect(),
    };
    let n = data.len() as f64;
    let (lo, hi) = (TAU_BOUNDS.0.ln(), TAU_BOUNDS.1.ln());

    // Coarse log-spaced scan to bracket the global minimum, then golden
    // section inside the bracket.
    let step = (hi - lo) / (TAU_SCAN_POINTS - 1) as f64;
    let scan: Vec<f64> = (0..TAU_SCAN_POINTS)
        .map(|i| profile.sse(lo + step * i as f64))
        .collect();
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < scan[b] { i } else { b });
    let mut evaluations = TAU_SCAN_POINTS;

    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(TAU_SCAN_POINTS - 1) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = profile.sse(x1);
    let mut f2 = profile.sse(x2);
    evaluations += 2;
    let mut converged = false;
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= GOLDEN_TOL {
            converged = true;
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = profile.sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = profile.sse(x2);
        }
        evaluations += 1;
    }
    let log_tau = 0.5 * (a + b);
    let tau = log_tau.exp();
    let (c_ref, slope, sse) = profile.solve(tau);
    let rmse = (sse / n).sqrt();
    if !converged {
        return Err(CompositeError::FitFailure {
            reason: format!("tau search did not converge in {GOLDEN_MAX_ITER} iterations"),
            rmse,
        });
    }
    if best == 0 || best == TAU_SCAN_POINTS - 1 {
        return Err(CompositeError::FitFailure {
            reason: format!(
                "tau = {tau:.6} hit the search bound [{}, {}]",
                TAU_BOUNDS.0, TAU_BOUNDS.1
            ),
            rmse,
        });
    }
    let rr_max = -slope / c_ref;
    let model = fitted_model(ResponseLaw::ExpDecay { rr_max, tau }, c_ref, data)
        .map_err(|reason| CompositeError::FitFailure { reason, rmse })?;
    Ok(FitReport {
        model,
        rmse,
        evaluations,
    })
}

/// Least-squares fit of a capacitance law to `(T, C)` data. The first sample
/// is the reference temperature. `Auto` keeps the lower-RMSE law and prefers
/// linear on ties or when the decay fit fails.
pub fn fit(data: &TemperatureSeries, kind: FitKind) -> Result<FitReport, CompositeError> {
    match kind {
        FitKind::Linear => fit_linear(data),
        FitKind::ExpDecay => fit_exp_decay(data),
        FitKind::Auto => {
            let linear = fit_linear(data)?;
            match fit_exp_decay(data) {
                Ok(exp) if exp.rmse < linear.rmse - 1e-12 * linear.model.c_ref => Ok(exp),
                _ => Ok(linear),
            }
        }
    }
}

/// Linear loss-tangent law `(tand_ref, tand_slope_rel)` referenced to the
/// first sample's temperature.
pub fn fit_loss_tangent(data: &TemperatureSeries) -> Result<(f64, f64), CompositeError> {
    if data.len() < 2 {
        return Err(CompositeError::InsufficientPoints {
            needed: 2,
            got: data.len(),
        });
    }
    let t_ref = data.points()[0].0;
    let x: Vec<f64> = data.temperatures().map(|t| t - t_ref).collect();
    let y: Vec<f64> = data.points().iter().map(|p| p.1).collect();
    let (a, b, _) = linear_lsq(&x, &y);
    if a <= 0.0 {
        return Err(CompositeError::FitFailure {
            reason: "reference loss tangent is not positive".into(),
            rmse: f64::NAN,
        });
    }
    Ok((a, b / a))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PF: f64 = 1e-12;

    fn linear_model() -> CompositeResponseModel {
        CompositeResponseModel::new(ResponseLaw::Linear { slope_rel: -0.0018 }, 4.0 * PF, 20.0)
            .unwrap()
    }

    #[test]
    fn linear_reference_identity_and_span() {
        let m = linear_model();
        assert_eq!(m.evaluate(20.0).unwrap().capacitance, 4.0 * PF);
        let m = m.with_extrapolation(true);
        let c = m.evaluate(120.0).unwrap().capacitance;
        assert!((c / (4.0 * PF) - 0.82).abs() < 1e-12);
        assert!((m.relative_response_at(120.0).unwrap() - 0.18).abs() < 1e-12);
    }

    #[test]
    fn exp_decay_closed_form() {
        let m = CompositeResponseModel::new(
            ResponseLaw::ExpDecay {
                rr_max: 0.855,
                tau: 15.0,
            },
            35.0 * PF,
            20.0,
        )
        .unwrap();
        let rr = m.relative_response_at(110.0).unwrap();
        assert!((rr - 0.855 * (1.0 - (-6.0f64).exp())).abs() < 1e-12);
        assert!((rr - 0.853).abs() < 5e-4);
    }

    #[test]
    fn out_of_range_unless_extrapolating() {
        let m = linear_model();
        assert!(matches!(
            m.evaluate(10.0),
            Err(CompositeError::OutOfRange { .. })
        ));
        assert!(m.with_extrapolation(true).evaluate(10.0).is_ok());
    }

    #[test]
    fn esr_companion() {
        let m = linear_model().with_loss_tangent(0.02, 0.0).unwrap();
        let r = m.evaluate(20.0).unwrap();
        let expected = 0.02 / (2.0 * PI * 1e7 * 4.0 * PF);
        assert!((r.esr(1e7) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariant_violations() {
        assert!(CompositeResponseModel::new(
            ResponseLaw::ExpDecay {
                rr_max: 1.0,
                tau: 1.0
            },
            PF,
            20.0
        )
        .is_err());
        assert!(CompositeResponseModel::new(
            ResponseLaw::ExpDecay {
                rr_max: 0.5,
                tau: 0.0
            },
            PF,
            20.0
        )
        .is_err());
        assert!(
            CompositeResponseModel::new(ResponseLaw::Linear { slope_rel: -0.02 }, PF, 20.0)
                .is_err()
        );
        assert!(linear_model().with_loss_tangent(0.01, -0.05).is_err());
        assert!(
            CompositeResponseModel::new(ResponseLaw::Linear { slope_rel: 0.0 }, -PF, 20.0).is_err()
        );
    }

    #[test]
    fn relative_response_quoted_endpoints() {
        assert_eq!(relative_response(3.0, 3.0).unwrap().magnitude, 0.0);
        let r = relative_response(9.41e6, 6.88e6).unwrap();
        assert!((r.magnitude - 0.3677).abs() < 1e-4);
        assert_eq!(r.direction, Direction::Increase);
        let r = relative_response(9.41e6, 7.03e6).unwrap();
        assert!((r.magnitude - 0.3386).abs() < 1e-4);
        assert_eq!(
            relative_response(1.0, 2.0).unwrap().direction,
            Direction::Decrease
        );
        assert_eq!(
            relative_response(1.0, 0.0),
            Err(CompositeError::ZeroReference)
        );
    }

    fn grid_series(m: &CompositeResponseModel) -> TemperatureSeries {
        TemperatureSeries::new(
            (0..10)
                .map(|i| {
                    let t = 20.0 + 10.0 * i as f64;
                    (t, m.evaluate(t).unwrap().capacitance)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn linear_exact_recovery() {
        let m = linear_model();
        let r = fit(&grid_series(&m), FitKind::Linear).unwrap();
        let ResponseLaw::Linear { slope_rel } = r.model.law else {
            panic!()
        };
        assert!((slope_rel / -0.0018 - 1.0).abs() < 1e-6);
        assert!(r.rmse < 1e-20);
        let auto = fit(&grid_series(&m), FitKind::Auto).unwrap();
        assert!(matches!(auto.model.law, ResponseLaw::Linear { .. }));
    }

    #[test]
    fn exp_decay_exact_recovery() {
        let m = CompositeResponseModel::new(
            ResponseLaw::ExpDecay {
                rr_max: 0.8,
                tau: 20.0,
            },
            30.0 * PF,
            20.0,
        )
        .unwrap();
        let r = fit(&grid_series(&m), FitKind::ExpDecay).unwrap();
        let ResponseLaw::ExpDecay { rr_max, tau } = r.model.law else {
            panic!()
        };
        assert!((rr_max / 0.8 - 1.0).abs() < 1e-4, "rr_max {rr_max}");
        assert!((tau / 20.0 - 1.0).abs() < 1e-4, "tau {tau}");
        let auto = fit(&grid_series(&m), FitKind::Auto).unwrap();
        assert!(matches!(auto.model.law, ResponseLaw::ExpDecay { .. }));
    }

    #[test]
    fn fit_input_errors() {
        let s = TemperatureSeries::new(vec![(20.0, 1.0), (30.0, 0.9), (40.0, 0.8)]).unwrap();
        assert_eq!(
            fit(&s, FitKind::ExpDecay),
            Err(CompositeError::InsufficientPoints { needed: 4, got: 3 })
        );
        assert!(fit(&s, FitKind::Linear).is_ok());
        let neg = TemperatureSeries::new(vec![(20.0, 1.0), (30.0, -0.9), (40.0, 0.8)]).unwrap();
        assert!(matches!(
            fit(&neg, FitKind::Linear),
            Err(CompositeError::InvalidSeries(_))
        ));
        assert!(TemperatureSeries::new(vec![(20.0, 1.0), (20.0, 1.0)]).is_err());
    }

    #[test]
    fn rising_data_is_not_a_decay() {
        let s = TemperatureSeries::new(
            (0..6)
                .map(|i| (20.0 + 10.0 * i as f64, 1.0 + 0.1 * i as f64))
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            fit(&s, FitKind::ExpDecay),
            Err(CompositeError::FitFailure { .. })
        ));
        assert!(matches!(
            fit(&s, FitKind::Auto).unwrap().model.law,
            ResponseLaw::Linear { .. }
        ));
    }

    #[test]
    fn loss_tangent_fit() {
        let s = TemperatureSeries::new(vec![(20.0, 0.02), (30.0, 0.022), (40.0, 0.024)]).unwrap();
        let (t0, slope) = fit_loss_tangent(&s).unwrap();
        assert!((t0 - 0.02).abs() < 1e-15);
        assert!((slope - 0.01).abs() < 1e-12);
    }

    #[test]
    fn model_json_round_trip() {
        let m = CompositeResponseModel::new(
            ResponseLaw::ExpDecay {
                rr_max: 0.8,
                tau: 20.0,
            },
            30.0 * PF,
            20.0,
        )
        .unwrap()
        .with_frequency_tag(10e6)
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: CompositeResponseModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }
}
