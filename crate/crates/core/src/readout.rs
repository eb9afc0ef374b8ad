//! From reflection traces to temperatures: dip detection, dip tracking
//! across temperature, sensitivity figures and calibration inversion.

use thiserror::Error;

use crate::format_sig9;
use crate::rfnet::FrequencyGrid;

/// Default minimum dip prominence in dB.
pub const DEFAULT_PROMINENCE_DB: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadoutError {
    #[error("trace needs at least 5 points, got {0}")]
    TooFewPoints(usize),
    #[error("trace length {trace} does not match grid length {grid}")]
    LengthMismatch { trace: usize, grid: usize },
    #[error("prominence threshold must be positive, got {0}")]
    BadProminence(f64),
    #[error("no resonance found at temperature index {0}")]
    NoPeaks(usize),
    #[error("calibration needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("temperatures must be finite and strictly increasing (index {0})")]
    TemperatureOrder(usize),
    #[error("resonant frequency is not strictly monotone in temperature at index {0}")]
    NonMonotone(usize),
    #[error("tracked resonance is not monotone at index {index}; try another policy")]
    TrackingFailure { index: usize },
    #[error("degenerate temperature span")]
    DegenerateSpan,
    #[error("frequency {f} Hz outside calibrated range [{lo}, {hi}] Hz")]
    OutOfRange { f: f64, lo: f64, hi: f64 },
    #[error("measured frequency is not a number")]
    NotANumber,
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePeak {
    /// Refined dip frequency, Hz.
    pub frequency: f64,
    /// Trace level at the refined dip, dB.
    pub depth_db: f64,
    pub prominence_db: f64,
}

/// Vertex of the parabola through three points, returned as an offset from
/// the middle abscissa and the value there. The offset is clamped to the
/// outer abscissas.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let u0 = x[0] - x[1];
    let u2 = x[2] - x[1];
    let s0 = (y[0] - y[1]) / u0;
    let s2 = (y[2] - y[1]) / u2;
    let a = (s2 - s0) / (u2 - u0);
    if !(a > 0.0) || !a.is_finite() {
        return (0.0, y[1]);
    }
    let b = s2 - a * u2;
    let u = (-b / (2.0 * a)).clamp(u0, u2);
    (u, y[1] + b * u + a * u * u)
}

/// Local minima of a dB trace whose topographic prominence reaches
/// `prominence_db`, refined by a three-point parabola and sorted by
/// frequency. The first and last points are never dips. Any constant
/// offset of the trace leaves the result's frequencies unchanged.
pub fn find_dips(
    grid: &FrequencyGrid,
    trace_db: &[f64],
    prominence_db: f64,
) -> Result<Vec<ResonancePeak>, ReadoutError> {
    let n = trace_db.len();
    if n != grid.len() {
        return Err(ReadoutError::LengthMismatch {
            trace: n,
            grid: grid.len(),
        });
    }
    if n < 5 {
        return Err(ReadoutError::TooFewPoints(n));
    }
    if !(prominence_db > 0.0) {
        return Err(ReadoutError::BadProminence(prominence_db));
    }
    let f = grid.points();
    let d = trace_db;
    let mut dips = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if !(d[i] < d[i - 1]) {
            i += 1;
            continue;
        }
        // Walk across a flat bottom; it must rise again before the end.
        let mut j = i;
        while j + 1 < n && d[j + 1] == d[i] {
            j += 1;
        }
        if j + 1 >= n || !(d[j + 1] > d[i]) {
            i = j + 1;
            continue;
        }
        let level = d[i];
        let left_max = d[..i]
            .iter()
            .rev()
            .take_while(|&&v| v >= level)
            .fold(level, |m, &v| m.max(v));
        let right_max = d[j + 1..]
            .iter()
            .take_while(|&&v| v >= level)
            .fold(level, |m, &v| m.max(v));
        let prominence = left_max.min(right_max) - level;
        if prominence >= prominence_db {
            let (frequency, depth) = if j > i {
                (0.5 * (f[i] + f[j]), level)
            } else {
                let (du, y) =
                    parabolic_vertex([f[i - 1], f[i], f[i + 1]], [d[i - 1], d[i], d[i + 1]]);
                (f[i] + du, y)
            };
            dips.push(ResonancePeak {
                frequency,
                depth_db: depth,
                prominence_db: prominence,
            });
        }
        i = j + 1;
    }
    Ok(dips)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneDirection {
    Increasing,
    Decreasing,
}

/// Resonant frequency versus temperature; strictly monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    samples: Vec<(f64, f64)>,
    direction: MonotoneDirection,
}

impl CalibrationCurve {
    /// `samples` are `(temperature °C, f_r Hz)` pairs.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, ReadoutError> {
        if samples.len() < 3 {
            return Err(ReadoutError::TooFewSamples(samples.len()));
        }
        for (i, &(t, f)) in samples.iter().enumerate() {
            if !t.is_finite() || (i > 0 && t <= samples[i - 1].0) {
                return Err(ReadoutError::TemperatureOrder(i));
            }
            if !(f.is_finite() && f > 0.0) {
                return Err(ReadoutError::NonMonotone(i));
            }
        }
        let direction = if samples[1].1 > samples[0].1 {
            MonotoneDirection::Increasing
        } else if samples[1].1 < samples[0].1 {
            MonotoneDirection::Decreasing
        } else {
            return Err(ReadoutError::NonMonotone(1));
        };
        for i in 2..samples.len() {
            let ok = match direction {
                MonotoneDirection::Increasing => samples[i].1 > samples[i - 1].1,
                MonotoneDirection::Decreasing => samples[i].1 < samples[i - 1].1,
            };
            if !ok {
                return Err(ReadoutError::NonMonotone(i));
            }
        }
        Ok(Self { samples, direction })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn direction(&self) -> MonotoneDirection {
        self.direction
    }

    /// CSV with header `temperature_c,f_r_hz`, optionally preceded by one
    /// `#` metadata line.
    pub fn to_csv(&self, metadata: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(m) = metadata {
            out.push('#');
            out.push_str(m);
            out.push('\n');
        }
        out.push_str("temperature_c,f_r_hz\n");
        for &(t, f) in &self.samples {
            out.push_str(&format_sig9(t));
            out.push(',');
            out.push_str(&format_sig9(f));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ReadoutError> {
        let mut samples = Vec::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.trim();
            if body.is_empty() {
                continue;
            }
            if body.starts_with('#') {
                if line == 1 {
                    continue;
                }
                return Err(ReadoutError::Csv {
                    line,
                    message: "metadata is only allowed on the first line".into(),
                });
            }
            if !header_seen {
                if body != "temperature_c,f_r_hz" {
                    return Err(ReadoutError::Csv {
                        line,
                        message: format!("expected header `temperature_c,f_r_hz`, found `{body}`"),
                    });
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = body.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(ReadoutError::Csv {
                    line,
                    message: format!("expected 2 columns, found {}", cols.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ReadoutError::Csv {
                        line,
                        message: format!("invalid number `{s}`"),
                    })
            };
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        if !header_seen {
            return Err(ReadoutError::Csv {
                line: 1,
                message: "missing header".into(),
            });
        }
        Self::new(samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackPolicy {
    /// Follow the dip nearest the previous pick, seeded at the first
    /// temperature by the dip nearest `reference_frequency`.
    Nearest { reference_frequency: f64 },
    /// Always take the highest-frequency dip.
    HighestFrequency,
}

fn nearest(peaks: &[ResonancePeak], target: f64) -> f64 {
    // Ties resolve to the lower frequency.
    let mut best = peaks[0].frequency;
    for p in &peaks[1..] {
        let (dp, db) = ((p.frequency - target).abs(), (best - target).abs());
        if dp < db || (dp == db && p.frequency < best) {
            best = p.frequency;
        }
    }
    best
}

pub fn track(
    peaks_by_temperature: &[(f64, Vec<ResonancePeak>)],
    policy: TrackPolicy,
) -> Result<CalibrationCurve, ReadoutError> {
    let mut samples = Vec::with_capacity(peaks_by_temperature.len());
    let mut previous: Option<f64> = None;
    for (index, (t, peaks)) in peaks_by_temperature.iter().enumerate() {
        if peaks.is_empty() {
            return Err(ReadoutError::NoPeaks(index));
        }
        let f = match policy {
            TrackPolicy::HighestFrequency => peaks
                .iter()
                .map(|p| p.frequency)
                .fold(f64::NEG_INFINITY, f64::max),
            TrackPolicy::Nearest {
                reference_frequency,
            } => nearest(peaks, previous.unwrap_or(reference_frequency)),
        };
        previous = Some(f);
        samples.push((*t, f));
    }
    CalibrationCurve::new(samples).map_err(|e| match e {
        ReadoutError::NonMonotone(index) => ReadoutError::TrackingFailure { index },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityReport {
    pub span: (f64, f64),
    /// f(t_hi) - f(t_lo), Hz.
    pub delta_f: f64,
    /// Relative frequency change over the span per °C, %/°C.
    pub avg_sensitivity_pct_per_degc: f64,
    /// |delta_f| / span in MHz/°C.
    pub slope_mhz_per_degc: f64,
    /// Slope normalized by `reference_frequency`, %/°C.
    pub freq_normalized_pct_per_degc: f64,
    /// Hz.
    pub reference_frequency: f64,
}

/// Sensitivity figures with the lowest-temperature frequency as reference.
pub fn sensitivity(curve: &CalibrationCurve) -> Result<SensitivityReport, ReadoutError> {
    sensitivity_with_reference(curve, curve.samples()[0].1)
}

pub fn sensitivity_with_reference(
    curve: &CalibrationCurve,
    reference_frequency: f64,
) -> Result<SensitivityReport, ReadoutError> {
    let s = curve.samples();
    let (t_lo, f_lo) = s[0];
    let (t_hi, f_hi) = s[s.len() - 1];
    let span = t_hi - t_lo;
    if !(span > 0.0) || !(reference_frequency > 0.0) {
        return Err(ReadoutError::DegenerateSpan);
    }
    let delta_f = f_hi - f_lo;
    let slope_hz = delta_f.abs() / span;
    Ok(SensitivityReport {
        span: (t_lo, t_hi),
        delta_f,
        avg_sensitivity_pct_per_degc: 100.0 * delta_f.abs() / f_lo / span,
        slope_mhz_per_degc: slope_hz / 1e6,
        freq_normalized_pct_per_degc: 100.0 * slope_hz / reference_frequency,
        reference_frequency,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertMode {
    Clamp,
    Strict,
}

/// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes with
/// the three-point end conditions). `x` strictly increasing.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            let (a, b) = (delta[k - 1], delta[k]);
            if a * b > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        d[0] = Self::end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = Self::end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Self { x, y, d }
    }

    fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
        let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() || m0 == 0.0 {
            0.0
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            3.0 * m0
        } else {
            d
        }
    }

    fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let k = self.x.partition_point(|&v| v <= xq).clamp(1, n - 1) - 1;
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

/// Temperature at which the curve reaches `f_measured`.
pub fn invert(
    curve: &CalibrationCurve,
    f_measured: f64,
    mode: InvertMode,
) -> Result<f64, ReadoutError> {
    if f_measured.is_nan() {
        return Err(ReadoutError::NotANumber);
    }
    let mut pairs: Vec<(f64, f64)> = curve.samples().iter().map(|&(t, f)| (f, t)).collect();
    if curve.direction() == MonotoneDirection::Decreasing {
        pairs.reverse();
    }
    let (f_lo, t_at_lo) = pairs[0];
    let (f_hi, t_at_hi) = pairs[pairs.len() - 1];
    if f_measured < f_lo || f_measured > f_hi {
        return match mode {
            InvertMode::Strict => Err(ReadoutError::OutOfRange {
                f: f_measured,
                lo: f_lo,
                hi: f_hi,
            }),
            InvertMode::Clamp => Ok(if f_measured < f_lo { t_at_lo } else { t_at_hi }),
        };
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(Pchip::new(x, y).eval(f_measured))
}

/// One row of a published sensitivity comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub reference: String,
    /// Centre frequency, MHz.
    pub f0_mhz: f64,
    pub slope_mhz_per_degc: f64,
    /// Frequency-normalized sensitivity as printed, %/°C.
    pub printed_pct_per_degc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCheck {
    pub row: ComparisonRow,
    pub recomputed_pct_per_degc: f64,
    /// |printed - recomputed| / recomputed.
    pub relative_deviation: f64,
    pub flagged: bool,
}

/// Recomputes 100 * slope / f0 for each row and flags rows whose printed
/// value deviates by more than `threshold` (relative).
pub fn check_comparison(rows: &[ComparisonRow], threshold: f64) -> Vec<ComparisonCheck> {
    rows.iter()
        .map(|row| {
            let recomputed = 100.0 * row.slope_mhz_per_degc / row.f0_mhz;
            let relative_deviation =
                (row.printed_pct_per_degc - recomputed).abs() / recomputed.abs();
            ComparisonCheck {
                row: row.clone(),
                recomputed_pct_per_degc: recomputed,
                relative_deviation,
                flagged: !(relative_deviation <= threshold),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peak(f: f64) -> ResonancePeak {
        ResonancePeak {
            frequency: f,
            depth_db: -10.0,
            prominence_db: 5.0,
        }
    }

    #[test]
    fn flat_trace_has_no_dips() {
        let g = FrequencyGrid::linspace(1e6, 2e6, 11).unwrap();
        assert!(find_dips(&g, &[0.0; 11], 1.0).unwrap().is_empty());
    }

    #[test]
    fn dip_preconditions() {
        let g = FrequencyGrid::linspace(1e6, 2e6, 4).unwrap();
        assert_eq!(
            find_dips(&g, &[0.0; 4], 1.0),
            Err(ReadoutError::TooFewPoints(4))
        );
        let g = FrequencyGrid::linspace(1e6, 2e6, 5).unwrap();
        assert!(matches!(
            find_dips(&g, &[0.0; 5], 0.0),
            Err(ReadoutError::BadProminence(_))
        ));
        assert!(matches!(
            find_dips(&g, &[0.0; 6], 1.0),
            Err(ReadoutError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn parabola_recovers_vertex() {
        let g = FrequencyGrid::linspace(0.5, 10.5, 11).unwrap();
        let trace: Vec<f64> = g
            .points()
            .iter()
            .map(|f| (f - 4.3).powi(2) - 20.0)
            .collect();
        let dips = find_dips(&g, &trace, 1.0).unwrap();
        assert_eq!(dips.len(), 1);
        assert!((dips[0].frequency - 4.3).abs() < 1e-12);
        assert!((dips[0].depth_db + 20.0).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_shallow_dips_ignored() {
        let g = FrequencyGrid::linspace(1.0, 7.0, 7).unwrap();
        let trace = [-5.0, 0.0, -0.5, 0.0, -3.0, 0.0, -9.0];
        let dips = find_dips(&g, &trace, 1.0).unwrap();
        assert_eq!(dips.len(), 1);
        assert!((dips[0].frequency - 5.0).abs() < 1.0);
        assert_eq!(dips[0].prominence_db, 3.0);
    }

    #[test]
    fn flat_bottom_dip_uses_center() {
        let g = FrequencyGrid::linspace(1.0, 7.0, 7).unwrap();
        let trace = [0.0, -1.0, -4.0, -4.0, -1.0, 0.0, 0.0];
        let dips = find_dips(&g, &trace, 1.0).unwrap();
        assert_eq!(dips.len(), 1);
        assert_eq!(dips[0].frequency, 3.5);
    }

    #[test]
    fn curve_validation() {
        assert_eq!(
            CalibrationCurve::new(vec![(20.0, 1.0), (30.0, 2.0)]),
            Err(ReadoutError::TooFewSamples(2))
        );
        assert_eq!(
            CalibrationCurve::new(vec![(20.0, 1.0), (30.0, 2.0), (40.0, 2.0)]),
            Err(ReadoutError::NonMonotone(2))
        );
        assert_eq!(
            CalibrationCurve::new(vec![(20.0, 1.0), (20.0, 2.0), (40.0, 3.0)]),
            Err(ReadoutError::TemperatureOrder(1))
        );
        let c = CalibrationCurve::new(vec![(20.0, 3.0), (30.0, 2.0), (40.0, 1.0)]).unwrap();
        assert_eq!(c.direction(), MonotoneDirection::Decreasing);
    }

    #[test]
    fn track_single_peaks() {
        let data: Vec<_> = [(20.0, 7.0e6), (30.0, 7.5e6), (40.0, 8.0e6)]
            .iter()
            .map(|&(t, f)| (t, vec![peak(f)]))
            .collect();
        let c = track(&data, TrackPolicy::HighestFrequency).unwrap();
        assert_eq!(c.samples(), &[(20.0, 7.0e6), (30.0, 7.5e6), (40.0, 8.0e6)]);
    }

    #[test]
    fn track_two_branch_pattern() {
        let uppers = [8.26e6, 8.9e6, 9.6e6, 10.3e6, 10.96e6];
        let data: Vec<_> = uppers
            .iter()
            .enumerate()
            .map(|(i, &u)| (20.0 + 10.0 * i as f64, vec![peak(6.7e6), peak(u)]))
            .collect();
        let c = track(&data, TrackPolicy::HighestFrequency).unwrap();
        let fs: Vec<f64> = c.samples().iter().map(|s| s.1).collect();
        assert_eq!(fs, uppers);
        let err = track(
            &data,
            TrackPolicy::Nearest {
                reference_frequency: 6.7e6,
            },
        )
        .unwrap_err();
        assert_eq!(err, ReadoutError::TrackingFailure { index: 1 });
        let ok = track(
            &data,
            TrackPolicy::Nearest {
                reference_frequency: 8.2e6,
            },
        )
        .unwrap();
        assert_eq!(ok.samples()[4].1, 10.96e6);
    }

    #[test]
    fn nearest_tie_goes_low() {
        let peaks = [peak(9.0), peak(11.0)];
        assert_eq!(nearest(&peaks, 10.0), 9.0);
        let peaks = [peak(11.0), peak(9.0)];
        assert_eq!(nearest(&peaks, 10.0), 9.0);
    }

    #[test]
    fn track_missing_peaks() {
        let data = vec![(20.0, vec![peak(1.0)]), (30.0, vec![])];
        assert_eq!(
            track(&data, TrackPolicy::HighestFrequency),
            Err(ReadoutError::NoPeaks(1))
        );
    }

    #[test]
    fn sensitivity_from_endpoints() {
        let c =
            CalibrationCurve::new(vec![(20.0, 7.03e6), (60.0, 9.0e6), (110.0, 9.41e6)]).unwrap();
        let r = sensitivity(&c).unwrap();
        assert!((r.avg_sensitivity_pct_per_degc - 100.0 * (2.38 / 7.03) / 90.0).abs() < 1e-9);
        assert!((r.slope_mhz_per_degc - 2.38 / 90.0).abs() < 1e-12);
        assert!((r.freq_normalized_pct_per_degc - r.avg_sensitivity_pct_per_degc).abs() < 1e-12);
        assert!((r.delta_f - 2.38e6).abs() < 1e-6);
    }

    #[test]
    fn invert_knots_and_clamp() {
        let c = CalibrationCurve::new(vec![
            (20.0, 7.0e6),
            (30.0, 7.6e6),
            (40.0, 8.0e6),
            (50.0, 8.2e6),
        ])
        .unwrap();
        for &(t, f) in c.samples() {
            assert_eq!(invert(&c, f, InvertMode::Strict).unwrap(), t);
        }
        assert_eq!(invert(&c, 6.0e6, InvertMode::Clamp).unwrap(), 20.0);
        assert_eq!(invert(&c, 9.0e6, InvertMode::Clamp).unwrap(), 50.0);
        assert!(matches!(
            invert(&c, 6.0e6, InvertMode::Strict),
            Err(ReadoutError::OutOfRange { .. })
        ));
        assert_eq!(
            invert(&c, f64::NAN, InvertMode::Clamp),
            Err(ReadoutError::NotANumber)
        );
    }

    #[test]
    fn invert_decreasing_curve() {
        let c = CalibrationCurve::new(vec![(20.0, 8.0e6), (30.0, 7.5e6), (40.0, 7.2e6)]).unwrap();
        assert_eq!(invert(&c, 7.5e6, InvertMode::Strict).unwrap(), 30.0);
        let t = invert(&c, 7.35e6, InvertMode::Strict).unwrap();
        assert!(t > 30.0 && t < 40.0);
        assert_eq!(invert(&c, 9.0e6, InvertMode::Clamp).unwrap(), 20.0);
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let c = CalibrationCurve::new(vec![(20.0, 7.03e6), (30.0, 7.5e6), (40.0, 8.1e6)]).unwrap();
        let text = c.to_csv(Some(" reader coil"));
        assert!(text.starts_with("# reader coil\ntemperature_c,f_r_hz\n"));
        assert_eq!(CalibrationCurve::from_csv(&text).unwrap(), c);
        let bad = "temperature_c,f_r_hz\n20,1\n30,x\n";
        assert!(matches!(
            CalibrationCurve::from_csv(bad),
            Err(ReadoutError::Csv { line: 3, .. })
        ));
        assert!(matches!(
            CalibrationCurve::from_csv("t,f\n"),
            Err(ReadoutError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn comparison_flagging() {
        let rows = vec![
            ComparisonRow {
                reference: "S1".into(),
                f0_mhz: 2920.0,
                slope_mhz_per_degc: 0.307,
                printed_pct_per_degc: 0.0102,
            },
            ComparisonRow {
                reference: "S5".into(),
                f0_mhz: 2030.0,
                slope_mhz_per_degc: 0.205,
                printed_pct_per_degc: 0.186,
            },
        ];
        let checks = check_comparison(&rows, 0.05);
        assert!((checks[0].recomputed_pct_per_degc - 0.0105).abs() < 5e-5);
        assert!(!checks[0].flagged);
        assert!((checks[1].recomputed_pct_per_degc - 0.0101).abs() < 5e-5);
        assert!(checks[1].flagged);
    }
}
