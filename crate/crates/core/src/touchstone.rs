//! Touchstone version 1 reader and writer for `.s1p` and `.s2p` files.
//!
//! Values are held exactly as they appear on disk once decoded to complex
//! numbers: S-parameters are dimensionless and Z/Y parameters stay
//! normalized to the reference resistance. [`TouchstoneDocument::to_one_port`]
//! and [`TouchstoneDocument::to_two_port`] denormalize into sweeps.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use thiserror::Error;

use crate::rfnet::{FrequencyGrid, Mat2, OnePortSweep, RfError, TwoPortSweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub fn scale(self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1e3,
            FrequencyUnit::MHz => 1e6,
            FrequencyUnit::GHz => 1e9,
        }
    }

    fn token(self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "HZ",
            FrequencyUnit::KHz => "KHZ",
            FrequencyUnit::MHz => "MHZ",
            FrequencyUnit::GHz => "GHZ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    S,
    Z,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real / imaginary.
    Ri,
    /// Magnitude / angle in degrees.
    Ma,
    /// 20 log10 magnitude / angle in degrees.
    Db,
}

impl DataFormat {
    fn token(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::Ri => Complex64::new(a, b),
            DataFormat::Ma => Complex64::from_polar(a, b * PI / 180.0),
            DataFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b * PI / 180.0),
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            DataFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionLine {
    pub frequency_unit: FrequencyUnit,
    pub parameter: Parameter,
    pub format: DataFormat,
    pub reference_resistance: f64,
}

impl Default for OptionLine {
    fn default() -> Self {
        Self {
            frequency_unit: FrequencyUnit::GHz,
            parameter: Parameter::S,
            format: DataFormat::Ma,
            reference_resistance: 50.0,
        }
    }
}

impl fmt::Display for OptionLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let param = match self.parameter {
            Parameter::S => "S",
            Parameter::Z => "Z",
            Parameter::Y => "Y",
        };
        write!(
            f,
            "# {} {} {} R {}",
            self.frequency_unit.token(),
            param,
            self.format.token(),
            format_number(self.reference_resistance)
        )
    }
}

/// Complex values per frequency point. Two-port rows are stored in file
/// order: 11, 21, 12, 22.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkData {
    OnePort(Vec<Complex64>),
    TwoPort(Vec<[Complex64; 4]>),
}

impl NetworkData {
    pub fn ports(&self) -> usize {
        match self {
            NetworkData::OnePort(_) => 1,
            NetworkData::TwoPort(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            NetworkData::OnePort(v) => v.len(),
            NetworkData::TwoPort(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub options: OptionLine,
    pub comments: Vec<String>,
    pub grid: FrequencyGrid,
    pub data: NetworkData,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown option token `{0}`")]
    UnknownOptionToken(String),
    #[error("option line must precede data")]
    LateOptionLine,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("expected {expected} numeric columns, found {found}")]
    ColumnCount { expected: usize, found: usize },
    #[error("frequencies must be positive and strictly increasing")]
    NonMonotonic,
    #[error("Touchstone version 2 keywords are not supported")]
    UnsupportedVersion,
    #[error("reference resistance must be positive")]
    BadReference,
    #[error("at least two frequency points are required")]
    TooFewPoints,
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based line number of the first offending line.
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind) -> Self {
        Self { line, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("document has {found} port(s), expected {expected}")]
    PortCount { expected: usize, found: usize },
    #[error(transparent)]
    Network(#[from] RfError),
}

fn parse_options(rest: &str, line: usize) -> Result<OptionLine, ParseError> {
    let mut opts = OptionLine::default();
    let mut tokens = rest.split_whitespace();
    while let Some(tok) = tokens.next() {
        let upper = tok.to_ascii_uppercase();
        match upper.as_str() {
            "HZ" => opts.frequency_unit = FrequencyUnit::Hz,
            "KHZ" => opts.frequency_unit = FrequencyUnit::KHz,
            "MHZ" => opts.frequency_unit = FrequencyUnit::MHz,
            "GHZ" => opts.frequency_unit = FrequencyUnit::GHz,
            "S" => opts.parameter = Parameter::S,
            "Z" => opts.parameter = Parameter::Z,
            "Y" => opts.parameter = Parameter::Y,
            "RI" => opts.format = DataFormat::Ri,
            "MA" => opts.format = DataFormat::Ma,
            "DB" => opts.format = DataFormat::Db,
            "R" => {
                let value = tokens.next().ok_or_else(|| {
                    ParseError::new(line, ParseErrorKind::UnknownOptionToken("R".into()))
                })?;
                let r = parse_number(value, line)?;
                if r <= 0.0 {
                    return Err(ParseError::new(line, ParseErrorKind::BadReference));
                }
                opts.reference_resistance = r;
            }
            _ => {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::UnknownOptionToken(tok.to_string()),
                ))
            }
        }
    }
    Ok(opts)
}

fn parse_number(tok: &str, line: usize) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::new(
            line,
            ParseErrorKind::InvalidNumber(tok.to_string()),
        )),
    }
}

/// Parses a document, inferring the port count from the first data line
/// (3 columns: one port, anything else: two ports).
pub fn parse(input: &[u8]) -> Result<TouchstoneDocument, ParseError> {
    parse_with_ports(input, None)
}

/// Parses a document with a known port count (1 or 2), as implied by a
/// `.s1p`/`.s2p` extension.
pub fn parse_with_ports(
    input: &[u8],
    ports: Option<usize>,
) -> Result<TouchstoneDocument, ParseError> {
    let text = std::str::from_utf8(input).map_err(|e| {
        let line = 1 + input[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        ParseError::new(line, ParseErrorKind::Encoding)
    })?;

    let mut options: Option<OptionLine> = None;
    let mut comments = Vec::new();
    let mut ports = ports;
    let mut freqs: Vec<f64> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    // Tokens of a two-port row that continues onto the next physical line.
    let mut pending: Vec<f64> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let (body, comment) = match raw.find('!') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            comments.push(c.trim_end_matches('\r').to_string());
        }
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            return Err(ParseError::new(line, ParseErrorKind::UnsupportedVersion));
        }
        if let Some(rest) = body.strip_prefix('#') {
            if !freqs.is_empty() || !pending.is_empty() {
                if options.is_some() {
                    // Repeated option lines are ignored in version 1.
                    continue;
                }
                return Err(ParseError::new(line, ParseErrorKind::LateOptionLine));
            }
            let parsed = parse_options(rest, line)?;
            if options.is_none() {
                options = Some(parsed);
            }
            continue;
        }

        let nums = body
            .split_whitespace()
            .map(|t| parse_number(t, line))
            .collect::<Result<Vec<_>, _>>()?;

        let port_count = *ports.get_or_insert(if nums.len() == 3 { 1 } else { 2 });
        let row_len = if port_count == 1 { 3 } else { 9 };

        let row = if port_count == 1 {
            if nums.len() != 3 {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::ColumnCount {
                        expected: 3,
                        found: nums.len(),
                    },
                ));
            }
            nums
        } else {
            pending.extend(nums);
            if pending.len() < row_len {
                continue;
            }
            if pending.len() > row_len {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::ColumnCount {
                        expected: row_len,
                        found: pending.len(),
                    },
                ));
            }
            std::mem::take(&mut pending)
        };

        let opts = options.unwrap_or_default();
        let f = row[0] * opts.frequency_unit.scale();
        if f <= 0.0 || freqs.last().is_some_and(|&prev| f <= prev) {
            return Err(ParseError::new(line, ParseErrorKind::NonMonotonic));
        }
        freqs.push(f);
        for pair in row[1..].chunks_exact(2) {
            values.push(opts.format.decode(pair[0], pair[1]));
        }
    }

    if !pending.is_empty() {
        return Err(ParseError::new(
            last_line,
            ParseErrorKind::ColumnCount {
                expected: 9,
                found: pending.len(),
            },
        ));
    }

    let grid = FrequencyGrid::new(freqs)
        .map_err(|_| ParseError::new(last_line.max(1), ParseErrorKind::TooFewPoints))?;
    let data = match ports {
        Some(1) => NetworkData::OnePort(values),
        _ => NetworkData::TwoPort(
            values
                .chunks_exact(4)
                .map(|c| [c[0], c[1], c[2], c[3]])
                .collect(),
        ),
    };

    Ok(TouchstoneDocument {
        options: options.unwrap_or_default(),
        comments,
        grid,
        data,
    })
}

/// 12 significant digits, scientific, `E` exponent marker.
pub fn format_number(v: f64) -> String {
    format!("{v:.11E}")
}

/// Serializes a document in the requested data format. The frequency unit,
/// parameter type and reference resistance are kept from the document.
pub fn write(doc: &TouchstoneDocument, format: DataFormat) -> Vec<u8> {
    let mut out = String::new();
    for c in &doc.comments {
        out.push('!');
        out.push_str(c);
        out.push('\n');
    }
    let opts = OptionLine {
        format,
        ..doc.options
    };
    let _ = writeln!(out, "{opts}");
    let scale = opts.frequency_unit.scale();
    let mut push_row = |f: f64, vals: &[Complex64]| {
        out.push_str(&format_number(f / scale));
        for &v in vals {
            let (a, b) = format.encode(v);
            out.push(' ');
            out.push_str(&format_number(a));
            out.push(' ');
            out.push_str(&format_number(b));
        }
        out.push('\n');
    };
    match &doc.data {
        NetworkData::OnePort(v) => {
            for (&f, z) in doc.grid.points().iter().zip(v) {
                push_row(f, std::slice::from_ref(z));
            }
        }
        NetworkData::TwoPort(v) => {
            for (&f, row) in doc.grid.points().iter().zip(v) {
                push_row(f, row);
            }
        }
    }
    out.into_bytes()
}

impl TouchstoneDocument {
    pub fn from_one_port(sweep: &OnePortSweep, comments: Vec<String>) -> Self {
        Self {
            options: OptionLine {
                frequency_unit: FrequencyUnit::Hz,
                parameter: Parameter::S,
                format: DataFormat::Ri,
                reference_resistance: sweep.reference_impedance(),
            },
            comments,
            grid: sweep.grid().clone(),
            data: NetworkData::OnePort(sweep.reflection()),
        }
    }

    pub fn from_two_port(sweep: &TwoPortSweep, comments: Vec<String>) -> Self {
        Self {
            options: OptionLine {
                frequency_unit: FrequencyUnit::Hz,
                parameter: Parameter::S,
                format: DataFormat::Ri,
                reference_resistance: sweep.reference_impedance(),
            },
            comments,
            grid: sweep.grid().clone(),
            data: NetworkData::TwoPort(
                sweep
                    .s()
                    .iter()
                    .map(|m| [m.get(0, 0), m.get(1, 0), m.get(0, 1), m.get(1, 1)])
                    .collect(),
            ),
        }
    }

    /// Denormalizes a one-port document into an impedance sweep.
    pub fn to_one_port(&self) -> Result<OnePortSweep, ConvertError> {
        let NetworkData::OnePort(values) = &self.data else {
            return Err(ConvertError::PortCount {
                expected: 1,
                found: self.data.ports(),
            });
        };
        let r = self.options.reference_resistance;
        let z = match self.options.parameter {
            Parameter::S => {
                return Ok(OnePortSweep::from_reflection(self.grid.clone(), values, r)?);
            }
            Parameter::Z => values.iter().map(|&v| v * r).collect(),
            Parameter::Y => values
                .iter()
                .map(|&v| {
                    if v.norm() == 0.0 {
                        Err(RfError::OpenCircuit)
                    } else {
                        Ok(r / v)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        Ok(OnePortSweep::from_impedance(self.grid.clone(), z, r)?)
    }

    /// Denormalizes a two-port document into a scattering sweep.
    pub fn to_two_port(&self) -> Result<TwoPortSweep, ConvertError> {
        let NetworkData::TwoPort(rows) = &self.data else {
            return Err(ConvertError::PortCount {
                expected: 2,
                found: self.data.ports(),
            });
        };
        let r = self.options.reference_resistance;
        // File order is 11, 21, 12, 22.
        let mats: Vec<Mat2> = rows
            .iter()
            .map(|v| Mat2::new(v[0], v[2], v[1], v[3]))
            .collect();
        let s = match self.options.parameter {
            Parameter::S => mats,
            Parameter::Z => {
                let z: Vec<Mat2> = mats
                    .iter()
                    .map(|m| m.scale(Complex64::new(r, 0.0)))
                    .collect();
                return Ok(crate::rfnet::zmatrix_to_smatrix(&self.grid, &z, r)?);
            }
            Parameter::Y => {
                let z = mats
                    .iter()
                    .zip(self.grid.points())
                    .enumerate()
                    .map(|(index, (m, &frequency))| {
                        m.inverse()
                            .map(|zn| zn.scale(Complex64::new(r, 0.0)))
                            .ok_or(RfError::Singular { index, frequency })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(crate::rfnet::zmatrix_to_smatrix(&self.grid, &z, r)?);
            }
        };
        Ok(TwoPortSweep::new(self.grid.clone(), s, r)?)
    }
}
