//! Lumped capacitor characterization from one-port impedance sweeps.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::rfnet::{FrequencyGrid, OnePortSweep, RfError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractionError {
    #[error("Im{{Z}} = {reactance} ohm is not capacitive at {frequency} Hz (at or above self-resonance)")]
    AboveSelfResonance { frequency: f64, reactance: f64 },
    #[error("frequency must be positive and finite, got {0}")]
    BadFrequency(f64),
    #[error("band [{lo}, {hi}] Hz is empty or outside the sweep [{grid_lo}, {grid_hi}] Hz")]
    BadBand {
        lo: f64,
        hi: f64,
        grid_lo: f64,
        grid_hi: f64,
    },
    #[error("no capacitive points (Im{{Z}} < 0) inside the band")]
    NoCapacitiveRegion,
    #[error("invalid capacitor model: {0}")]
    InvalidModel(&'static str),
    #[error(transparent)]
    Network(#[from] RfError),
}

/// Series C, ESR and parasitic inductance; optionally the plate area in m².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitorModel {
    pub capacitance: f64,
    pub esr: f64,
    pub parasitic_inductance: f64,
    pub area: Option<f64>,
}

impl CapacitorModel {
    pub fn new(
        capacitance: f64,
        esr: f64,
        parasitic_inductance: f64,
        area: Option<f64>,
    ) -> Result<Self, ExtractionError> {
        if !(capacitance.is_finite() && capacitance > 0.0) {
            return Err(ExtractionError::InvalidModel(
                "capacitance must be positive",
            ));
        }
        if !(esr.is_finite() && esr >= 0.0) {
            return Err(ExtractionError::InvalidModel("esr must be non-negative"));
        }
        if !(parasitic_inductance.is_finite() && parasitic_inductance >= 0.0) {
            return Err(ExtractionError::InvalidModel(
                "parasitic inductance must be non-negative",
            ));
        }
        if let Some(a) = area {
            if !(a.is_finite() && a > 0.0) {
                return Err(ExtractionError::InvalidModel("area must be positive"));
            }
        }
        Ok(Self {
            capacitance,
            esr,
            parasitic_inductance,
            area,
        })
    }

    pub fn impedance(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        Complex64::new(
            self.esr,
            w * self.parasitic_inductance - 1.0 / (w * self.capacitance),
        )
    }

    /// Analytic self-resonant frequency, `None` for an ideal capacitor.
    pub fn self_resonant_frequency(&self) -> Option<f64> {
        (self.parasitic_inductance > 0.0)
            .then(|| 1.0 / (2.0 * PI * (self.parasitic_inductance * self.capacitance).sqrt()))
    }

    pub fn sweep(&self, grid: &FrequencyGrid, z0: f64) -> Result<OnePortSweep, RfError> {
        let z = grid.points().iter().map(|&f| self.impedance(f)).collect();
        OnePortSweep::from_impedance(grid.clone(), z, z0)
    }
}

/// C = -1 / (Im{Z} 2 pi f), defined only where the reactance is negative.
pub fn capacitance_from_impedance(z: Complex64, f: f64) -> Result<f64, ExtractionError> {
    if !(f.is_finite() && f > 0.0) {
        return Err(ExtractionError::BadFrequency(f));
    }
    if z.im >= 0.0 || !z.im.is_finite() {
        return Err(ExtractionError::AboveSelfResonance {
            frequency: f,
            reactance: z.im,
        });
    }
    Ok(-1.0 / (z.im * 2.0 * PI * f))
}

/// Quality factor |Im Z| / |Re Z|. A lossless point has no finite Q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QualityFactor {
    Finite(f64),
    Infinite,
}

impl QualityFactor {
    pub fn value(self) -> Option<f64> {
        match self {
            QualityFactor::Finite(q) => Some(q),
            QualityFactor::Infinite => None,
        }
    }

    /// tan(delta) = 1/Q; zero for an infinite Q.
    pub fn loss_tangent(self) -> f64 {
        match self {
            QualityFactor::Finite(q) => 1.0 / q,
            QualityFactor::Infinite => 0.0,
        }
    }
}

pub fn quality_factor(z: Complex64) -> QualityFactor {
    if z.re == 0.0 {
        QualityFactor::Infinite
    } else {
        QualityFactor::Finite(z.im.abs() / z.re.abs())
    }
}

/// Lowest frequency where the reactance crosses from negative to
/// non-negative, linearly interpolated between the bracketing points.
pub fn self_resonant_frequency(sweep: &OnePortSweep) -> Option<f64> {
    let f = sweep.grid().points();
    let z = sweep.impedance();
    (1..f.len()).find_map(|i| {
        let (x0, x1) = (z[i - 1].im, z[i].im);
        (x0 < 0.0 && x1 >= 0.0).then(|| f[i - 1] + (f[i] - f[i - 1]) * (-x0) / (x1 - x0))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionReport {
    /// Per-point capacitance in F; `None` where Im{Z} >= 0.
    pub c_of_f: Vec<Option<f64>>,
    pub q_of_f: Vec<QualityFactor>,
    pub srf: Option<f64>,
    pub band: (f64, f64),
    pub band_mean_c: f64,
    pub band_std_c: f64,
    /// Mean of the finite quality factors over the capacitive band points.
    pub band_mean_q: Option<f64>,
    /// Number of capacitive points that entered the band statistics.
    pub band_points: usize,
    /// Capacitance per unit area (F/m²), mean and std, when an area was given.
    pub area_normalized: Option<(f64, f64)>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-point C and Q with band statistics over the capacitive points.
pub fn extract(
    sweep: &OnePortSweep,
    band: (f64, f64),
    area: Option<f64>,
) -> Result<ExtractionReport, ExtractionError> {
    let grid = sweep.grid();
    let (lo, hi) = band;
    if !(lo < hi) || lo < grid.first() || hi > grid.last() {
        return Err(ExtractionError::BadBand {
            lo,
            hi,
            grid_lo: grid.first(),
            grid_hi: grid.last(),
        });
    }
    if let Some(a) = area {
        if !(a.is_finite() && a > 0.0) {
            return Err(ExtractionError::InvalidModel("area must be positive"));
        }
    }

    let c_of_f: Vec<Option<f64>> = grid
        .points()
        .iter()
        .zip(sweep.impedance())
        .map(|(&f, &z)| capacitance_from_impedance(z, f).ok())
        .collect();
    let q_of_f: Vec<QualityFactor> = sweep
        .impedance()
        .iter()
        .map(|&z| quality_factor(z))
        .collect();

    let in_band: Vec<usize> = grid
        .points()
        .iter()
        .enumerate()
        .filter(|(i, &f)| f >= lo && f <= hi && c_of_f[*i].is_some())
        .map(|(i, _)| i)
        .collect();
    if in_band.is_empty() {
        return Err(ExtractionError::NoCapacitiveRegion);
    }
    let caps: Vec<f64> = in_band.iter().filter_map(|&i| c_of_f[i]).collect();
    let (band_mean_c, band_std_c) = mean_std(&caps);
    let qs: Vec<f64> = in_band.iter().filter_map(|&i| q_of_f[i].value()).collect();
    let band_mean_q = (!qs.is_empty()).then(|| qs.iter().sum::<f64>() / qs.len() as f64);
    let area_normalized = area.map(|a| {
        let per_area: Vec<f64> = caps.iter().map(|c| c / a).collect();
        mean_std(&per_area)
    });

    Ok(ExtractionReport {
        c_of_f,
        q_of_f,
        srf: self_resonant_frequency(sweep),
        band,
        band_mean_c,
        band_std_c,
        band_mean_q,
        band_points: caps.len(),
        area_normalized,
    })
}
