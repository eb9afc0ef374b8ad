use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::SystemConfig;
use super::{CliError, Command, FitKindArg, ModeArg, PolicyArg, SweepFormat, EXIT_DATA, EXIT_OK};
use crate::composite::{self, relative_response, Direction, FitKind, TemperatureSeries};
use crate::coupled;
use crate::extraction::{self, ExtractionError};
use crate::format_sig9;
use crate::readout::{
    self, CalibrationCurve, ComparisonRow, InvertMode, ResonancePeak, TrackPolicy,
};
use crate::touchstone::{self, DataFormat, TouchstoneDocument};

type CmdResult = Result<i32, CliError>;

pub(super) fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Extract {
            files,
            band,
            area,
            out,
        } => cmd_extract(&files, &band, area, out.as_deref(), stdout, stderr),
        Command::Simulate {
            config,
            out_dir,
            format,
        } => cmd_simulate(&config, &out_dir, format, stderr),
        Command::Fit {
            input,
            kind,
            frequency_tag,
            out,
        } => cmd_fit(&input, kind, frequency_tag, out.as_deref(), stdout),
        Command::Calibrate {
            input,
            policy,
            reference_hz,
            column,
            out,
        } => cmd_calibrate(
            &input,
            policy,
            reference_hz,
            &column,
            out.as_deref(),
            stdout,
        ),
        Command::Invert {
            curve,
            frequencies,
            mode,
        } => cmd_invert(&curve, &frequencies, mode, stdout, stderr),
        Command::Report {
            curve,
            capacitance,
            span,
            compare,
            threshold,
        } => cmd_report(
            curve.as_deref(),
            capacitance.as_deref(),
            &span,
            compare.as_deref(),
            threshold,
            stdout,
        ),
    }
}

fn parse_range(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("{what} must look like `lo:hi`, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        }
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Data(format!("stdout: {e}"))),
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

fn opt_num(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

fn ports_from_extension(path: &Path) -> Option<usize> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "s1p" => Some(1),
        "s2p" => Some(2),
        _ => None,
    }
}

fn cmd_extract(
    files: &[PathBuf],
    band: &str,
    area_cm2: Option<f64>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    if files.is_empty() {
        return Err(CliError::Usage(
            "at least one input file is required".into(),
        ));
    }
    let band = parse_range(band, "--band")?;
    if let Some(a) = area_cm2 {
        if !(a.is_finite() && a > 0.0) {
            return Err(CliError::Usage("--area must be positive".into()));
        }
    }

    let mut w = csv_writer();
    let mut header = vec![
        "file",
        "band_mean_c_pf",
        "band_std_c_pf",
        "srf_mhz",
        "mean_q",
    ];
    if area_cm2.is_some() {
        header.extend(["c_per_area_pf_per_cm2", "c_per_area_std_pf_per_cm2"]);
    }
    header.push("status");
    w.write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let mut failed = false;
    for path in files {
        let name = path.display().to_string();
        let result = read_bytes(path)
            .map_err(|e| ("read_error", e.to_string()))
            .and_then(|bytes| {
                touchstone::parse_with_ports(&bytes, ports_from_extension(path))
                    .map_err(|e| ("parse_error", e.to_string()))
            })
            .and_then(|doc| {
                doc.to_one_port()
                    .map_err(|e| ("conversion_error", e.to_string()))
            })
            .and_then(|sweep| {
                extraction::extract(&sweep, band, area_cm2.map(|a| a * 1e-4)).map_err(|e| {
                    let status = match e {
                        ExtractionError::NoCapacitiveRegion => "no_capacitive_region",
                        ExtractionError::BadBand { .. } => "bad_band",
                        _ => "extraction_error",
                    };
                    (status, e.to_string())
                })
            });
        let mut row = vec![name.clone()];
        match result {
            Ok(report) => {
                row.push(format_sig9(report.band_mean_c * 1e12));
                row.push(format_sig9(report.band_std_c * 1e12));
                row.push(opt_num(report.srf.map(|f| f / 1e6)));
                row.push(opt_num(report.band_mean_q));
                if let Some((mean, std)) = report.area_normalized {
                    // F/m² to pF/cm².
                    row.push(format_sig9(mean * 1e8));
                    row.push(format_sig9(std * 1e8));
                }
                row.push("ok".into());
            }
            Err((status, message)) => {
                failed = true;
                let _ = writeln!(stderr, "{name}: {message}");
                let blanks = if area_cm2.is_some() { 6 } else { 4 };
                row.extend(std::iter::repeat_n(String::new(), blanks));
                row.push(status.into());
            }
        }
        w.write_record(&row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    emit(out, stdout, &finish_csv(w)?)?;
    Ok(if failed { EXIT_DATA } else { EXIT_OK })
}

fn temperature_label(t: f64) -> String {
    format!("{t}")
}

fn cmd_simulate(
    config: &Path,
    out_dir: &Path,
    format: SweepFormat,
    stderr: &mut dyn Write,
) -> CmdResult {
    let text = read_text(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let cfg = SystemConfig::parse(&text, base).map_err(|e| CliError::Format(e.to_string()))?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Data(format!("{}: {e}", out_dir.display())))?;

    let mut summary = csv_writer();
    summary
        .write_record([
            "temperature_c",
            "reader_dip_hz",
            "reader_depth_db",
            "reader_dips",
            "sensor_dip_hz",
            "sensor_depth_db",
            "sensor_dips",
        ])
        .map_err(|e| CliError::Data(e.to_string()))?;

    let mut failed = false;
    for &t in &cfg.temperatures {
        let sim = coupled::sweep(&cfg.system, &cfg.grid, Some(t))
            .map_err(|e| CliError::Data(format!("T = {t}: {e}")))?;
        for e in &sim.point_errors {
            failed = true;
            let _ = writeln!(stderr, "T = {t}: {e}");
        }
        let sweep = &sim.sweep;
        let label = temperature_label(t);
        let (file_name, bytes) = match format {
            SweepFormat::S2p => {
                let doc = TouchstoneDocument::from_two_port(
                    sweep,
                    vec![format!(" lcsense coupled-system sweep at {label} degC")],
                );
                (
                    format!("sweep_T{label}.s2p"),
                    touchstone::write(&doc, DataFormat::Ri),
                )
            }
            SweepFormat::Csv => {
                let mut w = csv_writer();
                w.write_record(["f_hz", "s11_db", "s22_db", "s21_db"])
                    .map_err(|e| CliError::Data(e.to_string()))?;
                let s11 = sweep.parameter_db(1, 1);
                let s22 = sweep.parameter_db(2, 2);
                let s21 = sweep.parameter_db(2, 1);
                for (i, f) in sweep.grid().points().iter().enumerate() {
                    w.write_record([
                        format_sig9(*f),
                        format_sig9(s11[i]),
                        format_sig9(s22[i]),
                        format_sig9(s21[i]),
                    ])
                    .map_err(|e| CliError::Data(e.to_string()))?;
                }
                (format!("sweep_T{label}.csv"), finish_csv(w)?)
            }
        };
        let path = out_dir.join(file_name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;

        let top = |trace: Vec<f64>| -> Result<(Option<ResonancePeak>, usize), CliError> {
            let dips = readout::find_dips(sweep.grid(), &trace, cfg.prominence_db)
                .map_err(|e| CliError::Data(e.to_string()))?;
            Ok((dips.last().copied(), dips.len()))
        };
        let (reader, n_reader) = top(sweep.parameter_db(1, 1))?;
        let (sensor, n_sensor) = top(sweep.parameter_db(2, 2))?;
        summary
            .write_record([
                format_sig9(t),
                opt_num(reader.map(|p| p.frequency)),
                opt_num(reader.map(|p| p.depth_db)),
                n_reader.to_string(),
                opt_num(sensor.map(|p| p.frequency)),
                opt_num(sensor.map(|p| p.depth_db)),
                n_sensor.to_string(),
            ])
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    let path = out_dir.join("summary.csv");
    std::fs::write(&path, finish_csv(summary)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(if failed { EXIT_DATA } else { EXIT_OK })
}

/// Reads a headed CSV and returns the named numeric columns row by row,
/// with the 1-based line of each row. Empty cells become `None`.
type NumericRows = Vec<(usize, Vec<Option<f64>>)>;

fn read_columns(path: &Path, columns: &[&str]) -> Result<NumericRows, CliError> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?
        .clone();
    let idx = columns
        .iter()
        .map(|c| {
            headers.iter().position(|h| h == *c).ok_or_else(|| {
                CliError::Format(format!("{}: line 1: missing column `{c}`", path.display()))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Format(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let vals = idx
            .iter()
            .map(|&i| {
                let cell = rec.get(i).unwrap_or("");
                if cell.is_empty() {
                    return Ok(None);
                }
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(Some)
                    .ok_or_else(|| {
                        CliError::Format(format!(
                            "{}: line {line}: invalid number `{cell}`",
                            path.display()
                        ))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, vals));
    }
    Ok(rows)
}

fn read_series(path: &Path) -> Result<TemperatureSeries, CliError> {
    let rows = read_columns(path, &["temperature_c", "capacitance_f"])?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, vals) in rows {
        match (vals[0], vals[1]) {
            (Some(t), Some(c)) => points.push((t, c)),
            _ => {
                return Err(CliError::Format(format!(
                    "{}: line {line}: empty cell",
                    path.display()
                )))
            }
        }
    }
    TemperatureSeries::new(points).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct FitOutput {
    kind: &'static str,
    rmse: f64,
    evaluations: usize,
    model: composite::CompositeResponseModel,
}

fn cmd_fit(
    input: &Path,
    kind: FitKindArg,
    frequency_tag: Option<f64>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let series = read_series(input)?;
    let kind = match kind {
        FitKindArg::Linear => FitKind::Linear,
        FitKindArg::ExpDecay => FitKind::ExpDecay,
        FitKindArg::Auto => FitKind::Auto,
    };
    let report = composite::fit(&series, kind).map_err(|e| CliError::Data(e.to_string()))?;
    let model = match frequency_tag {
        Some(f) => report
            .model
            .with_frequency_tag(f)
            .map_err(|e| CliError::Usage(e.to_string()))?,
        None => report.model,
    };
    let output = FitOutput {
        kind: match model.law {
            composite::ResponseLaw::Linear { .. } => "linear",
            composite::ResponseLaw::ExpDecay { .. } => "exp_decay",
        },
        rmse: report.rmse,
        evaluations: report.evaluations,
        model,
    };
    let mut text =
        serde_json::to_string_pretty(&output).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    emit(out, stdout, text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_calibrate(
    input: &Path,
    policy: PolicyArg,
    reference_hz: Option<f64>,
    column: &str,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let policy = match (policy, reference_hz) {
        (PolicyArg::Highest, _) => TrackPolicy::HighestFrequency,
        (PolicyArg::Nearest, Some(f)) => TrackPolicy::Nearest {
            reference_frequency: f,
        },
        (PolicyArg::Nearest, None) => {
            return Err(CliError::Usage(
                "--policy nearest needs --reference-hz".into(),
            ))
        }
    };
    let rows = read_columns(input, &["temperature_c", column])?;
    let mut grouped: Vec<(f64, Vec<ResonancePeak>)> = Vec::new();
    for (line, vals) in rows {
        let Some(t) = vals[0] else {
            return Err(CliError::Format(format!(
                "{}: line {line}: empty temperature",
                input.display()
            )));
        };
        let peak = vals[1].map(|f| ResonancePeak {
            frequency: f,
            depth_db: f64::NAN,
            prominence_db: f64::NAN,
        });
        match grouped.last_mut() {
            Some((last_t, peaks)) if *last_t == t => peaks.extend(peak),
            Some((last_t, _)) if t < *last_t => {
                return Err(CliError::Format(format!(
                    "{}: line {line}: temperatures must be non-decreasing",
                    input.display()
                )))
            }
            _ => grouped.push((t, peak.into_iter().collect())),
        }
    }
    let curve = readout::track(&grouped, policy).map_err(|e| CliError::Data(e.to_string()))?;
    let meta = match policy {
        TrackPolicy::HighestFrequency => " policy=highest".to_string(),
        TrackPolicy::Nearest {
            reference_frequency,
        } => {
            format!(
                " policy=nearest reference_hz={}",
                format_sig9(reference_frequency)
            )
        }
    };
    emit(out, stdout, curve.to_csv(Some(&meta)).as_bytes())?;
    Ok(EXIT_OK)
}

fn read_curve(path: &Path) -> Result<CalibrationCurve, CliError> {
    let text = read_text(path)?;
    CalibrationCurve::from_csv(&text)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

fn cmd_invert(
    curve: &Path,
    frequencies: &[f64],
    mode: ModeArg,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let curve = read_curve(curve)?;
    let mode = match mode {
        ModeArg::Clamp => InvertMode::Clamp,
        ModeArg::Strict => InvertMode::Strict,
    };
    let mut w = csv_writer();
    w.write_record(["f_hz", "temperature_c"])
        .map_err(|e| CliError::Data(e.to_string()))?;
    let mut failed = false;
    for &f in frequencies {
        let t = match readout::invert(&curve, f, mode) {
            Ok(t) => format_sig9(t),
            Err(e) => {
                failed = true;
                let _ = writeln!(stderr, "{f}: {e}");
                String::new()
            }
        };
        w.write_record([format_sig9(f), t])
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    emit(None, stdout, &finish_csv(w)?)?;
    Ok(if failed { EXIT_DATA } else { EXIT_OK })
}

#[derive(Serialize)]
struct CurveSection {
    span_c: (f64, f64),
    f_lo_hz: f64,
    f_hi_hz: f64,
    delta_f_hz: f64,
    relative_response: f64,
    direction: Direction,
    avg_sensitivity_pct_per_degc: f64,
    /// Rounded to two decimals, as sensitivities are usually quoted.
    avg_sensitivity_pct_per_degc_2dp: f64,
    slope_mhz_per_degc: f64,
    freq_normalized_pct_per_degc: f64,
    reference_frequency_hz: f64,
}

#[derive(Serialize)]
struct CapacitanceSection {
    span_c: (f64, f64),
    c_lo_f: f64,
    c_hi_f: f64,
    relative_response: f64,
    direction: Direction,
    /// Relative capacitance change per °C.
    sensitivity_pct_per_degc: f64,
    /// The same figure read literally against a "S x 10^-2 (MHz/°C)" column
    /// header.
    literal_header_mhz_per_degc: f64,
}

#[derive(Serialize)]
struct ComparisonEntry {
    reference: String,
    f0_mhz: f64,
    slope_mhz_per_degc: f64,
    printed_pct_per_degc: f64,
    recomputed_pct_per_degc: f64,
    relative_deviation: f64,
    flagged: bool,
}

#[derive(Serialize)]
struct ComparisonSection {
    threshold: f64,
    rows: Vec<ComparisonEntry>,
    flagged: Vec<String>,
}

#[derive(Serialize, Default)]
struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    curve: Option<CurveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacitance: Option<CapacitanceSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<ComparisonSection>,
}

fn interpolate(points: &[(f64, f64)], t: f64) -> Option<f64> {
    let k = points.windows(2).position(|w| t >= w[0].0 && t <= w[1].0)?;
    let (t0, v0) = points[k];
    let (t1, v1) = points[k + 1];
    Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

fn read_comparison(path: &Path) -> Result<Vec<ComparisonRow>, CliError> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let expected = [
        "reference",
        "f0_mhz",
        "slope_mhz_per_degc",
        "printed_pct_per_degc",
    ];
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::Format(format!(
            "{}: line 1: expected header `{}`",
            path.display(),
            expected.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::Format(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| {
                    CliError::Format(format!(
                        "{}: line {line}: invalid number `{}`",
                        path.display(),
                        &rec[i]
                    ))
                })
        };
        rows.push(ComparisonRow {
            reference: rec[0].to_string(),
            f0_mhz: num(1)?,
            slope_mhz_per_degc: num(2)?,
            printed_pct_per_degc: num(3)?,
        });
    }
    Ok(rows)
}

fn cmd_report(
    curve: Option<&Path>,
    capacitance: Option<&Path>,
    span: &str,
    compare: Option<&Path>,
    threshold: f64,
    stdout: &mut dyn Write,
) -> CmdResult {
    if curve.is_none() && capacitance.is_none() && compare.is_none() {
        return Err(CliError::Usage(
            "give at least one of --curve, --capacitance or --compare".into(),
        ));
    }
    if !(threshold > 0.0) {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let mut report = Report::default();

    if let Some(path) = curve {
        let c = read_curve(path)?;
        let s = readout::sensitivity(&c).map_err(|e| CliError::Data(e.to_string()))?;
        let samples = c.samples();
        let (f_lo, f_hi) = (samples[0].1, samples[samples.len() - 1].1);
        let rr = relative_response(f_hi, f_lo).map_err(|e| CliError::Data(e.to_string()))?;
        report.curve = Some(CurveSection {
            span_c: s.span,
            f_lo_hz: f_lo,
            f_hi_hz: f_hi,
            delta_f_hz: s.delta_f,
            relative_response: rr.magnitude,
            direction: rr.direction,
            avg_sensitivity_pct_per_degc: s.avg_sensitivity_pct_per_degc,
            avg_sensitivity_pct_per_degc_2dp: (s.avg_sensitivity_pct_per_degc * 100.0).round()
                / 100.0,
            slope_mhz_per_degc: s.slope_mhz_per_degc,
            freq_normalized_pct_per_degc: s.freq_normalized_pct_per_degc,
            reference_frequency_hz: s.reference_frequency,
        });
    }

    if let Some(path) = capacitance {
        let (t_lo, t_hi) = parse_range(span, "--span")?;
        let series = read_series(path)?;
        let at = |t: f64| {
            interpolate(series.points(), t)
                .ok_or_else(|| CliError::Data(format!("{} does not cover {t} °C", path.display())))
        };
        let (c_lo, c_hi) = (at(t_lo)?, at(t_hi)?);
        let rr = relative_response(c_hi, c_lo).map_err(|e| CliError::Data(e.to_string()))?;
        let pct = 100.0 * rr.magnitude / (t_hi - t_lo);
        report.capacitance = Some(CapacitanceSection {
            span_c: (t_lo, t_hi),
            c_lo_f: c_lo,
            c_hi_f: c_hi,
            relative_response: rr.magnitude,
            direction: rr.direction,
            sensitivity_pct_per_degc: pct,
            literal_header_mhz_per_degc: pct * 1e-2,
        });
    }

    if let Some(path) = compare {
        let rows = read_comparison(path)?;
        let checks = readout::check_comparison(&rows, threshold);
        let mut seen = BTreeMap::new();
        let flagged = checks
            .iter()
            .filter(|c| c.flagged)
            .filter(|c| seen.insert(c.row.reference.clone(), ()).is_none())
            .map(|c| c.row.reference.clone())
            .collect();
        report.comparison = Some(ComparisonSection {
            threshold,
            rows: checks
                .into_iter()
                .map(|c| ComparisonEntry {
                    reference: c.row.reference,
                    f0_mhz: c.row.f0_mhz,
                    slope_mhz_per_degc: c.row.slope_mhz_per_degc,
                    printed_pct_per_degc: c.row.printed_pct_per_degc,
                    recomputed_pct_per_degc: c.recomputed_pct_per_degc,
                    relative_deviation: c.relative_deviation,
                    flagged: c.flagged,
                })
                .collect(),
            flagged,
        });
    }

    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))?;
    text.push('\n');
    emit(None, stdout, text.as_bytes())?;
    Ok(EXIT_OK)
}
