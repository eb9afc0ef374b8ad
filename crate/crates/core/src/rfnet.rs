//! Complex network math: frequency grids, one- and two-port sweeps, and
//! impedance/scattering conversions.
//!
//! Impedance is the canonical domain. Scattering parameters are derived on
//! demand against a single real reference impedance per sweep.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Default reference impedance in ohms.
pub const DEFAULT_Z0: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RfError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("reference impedance must be positive, got {0}")]
    BadReference(f64),
    #[error("frequency grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("frequency grid must be positive and strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("singular conversion at point {index} ({frequency} Hz)")]
    Singular { index: usize, frequency: f64 },
    #[error("open circuit: reflection coefficient of exactly 1 has no finite impedance")]
    OpenCircuit,
    #[error("length mismatch: grid has {grid} points, data has {data}")]
    LengthMismatch { grid: usize, data: usize },
}

/// Strictly increasing list of positive frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, RfError> {
        if points.len() < 2 {
            return Err(RfError::TooFewPoints(points.len()));
        }
        for (i, &f) in points.iter().enumerate() {
            if !f.is_finite() {
                return Err(RfError::NonFinite("frequency grid"));
            }
            if f <= 0.0 || (i > 0 && f <= points[i - 1]) {
                return Err(RfError::NotIncreasing(i));
            }
        }
        Ok(Self { points })
    }

    /// Evenly spaced grid including both endpoints.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self, RfError> {
        if n < 2 {
            return Err(RfError::TooFewPoints(n));
        }
        let step = (stop - start) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
        points[n - 1] = stop;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Largest spacing between adjacent points.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

fn check_z0(z0: f64) -> Result<(), RfError> {
    if !z0.is_finite() || z0 <= 0.0 {
        return Err(RfError::BadReference(z0));
    }
    Ok(())
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Reflection coefficient of impedance `z` against reference `z0`.
pub fn z_to_s_oneport(z: Complex64, z0: f64) -> Result<Complex64, RfError> {
    check_z0(z0)?;
    if !is_finite(z) {
        return Err(RfError::NonFinite("impedance"));
    }
    Ok((z - z0) / (z + z0))
}

/// Impedance seen behind reflection coefficient `s`.
pub fn s_to_z_oneport(s: Complex64, z0: f64) -> Result<Complex64, RfError> {
    check_z0(z0)?;
    if !is_finite(s) {
        return Err(RfError::NonFinite("reflection coefficient"));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(RfError::OpenCircuit);
    }
    Ok(z0 * (Complex64::new(1.0, 0.0) + s) / (Complex64::new(1.0, 0.0) - s))
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self {
            m: [[a11, a12], [a21, a22]],
        }
    }

    pub fn zeros() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::diag(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn diag(a11: Complex64, a22: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(a11, z, z, a22)
    }

    pub fn nan() -> Self {
        let n = Complex64::new(f64::NAN, f64::NAN);
        Self::new(n, n, n, n)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Adjugate inverse; the result of a symmetric matrix is exactly symmetric.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !is_finite(det) {
            return None;
        }
        let inv = Self::new(
            self.m[1][1] / det,
            -self.m[0][1] / det,
            -self.m[1][0] / det,
            self.m[0][0] / det,
        );
        inv.is_finite().then_some(inv)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(
            self.m[0][0] * k,
            self.m[0][1] * k,
            self.m[1][0] * k,
            self.m[1][1] * k,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| is_finite(*z))
    }

    /// Singular values, largest first, from the eigenvalues of A^H A.
    pub fn singular_values(&self) -> [f64; 2] {
        let a = &self.m;
        let n00 = a[0][0].norm_sqr() + a[1][0].norm_sqr();
        let n11 = a[0][1].norm_sqr() + a[1][1].norm_sqr();
        let n01 = a[0][0].conj() * a[0][1] + a[1][0].conj() * a[1][1];
        let half_trace = 0.5 * (n00 + n11);
        let half_diff = 0.5 * (n00 - n11);
        let disc = (half_diff * half_diff + n01.norm_sqr()).sqrt();
        let hi = half_trace + disc;
        // The product of the eigenvalues is |det A|^2; using it avoids
        // cancellation in the small one.
        let lo = if hi > 0.0 {
            self.det().norm_sqr() / hi
        } else {
            0.0
        };
        [hi.max(0.0).sqrt(), lo.max(0.0).sqrt()]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// S = I - 2 z0 (Z + z0 I)^-1 for a single frequency point.
pub fn z_to_s_matrix(z: &Mat2, z0: f64) -> Option<Mat2> {
    let z0c = Complex64::new(z0, 0.0);
    let shifted = *z + Mat2::diag(z0c, z0c);
    let inv = shifted.inverse()?;
    Some(Mat2::identity() - inv.scale(Complex64::new(2.0 * z0, 0.0)))
}

/// Z = z0 (I + S)(I - S)^-1 for a single frequency point.
pub fn s_to_z_matrix(s: &Mat2, z0: f64) -> Option<Mat2> {
    let inv = (Mat2::identity() - *s).inverse()?;
    Some(((Mat2::identity() + *s) * inv).scale(Complex64::new(z0, 0.0)))
}

/// Converts per-point impedance matrices into a scattering sweep.
pub fn zmatrix_to_smatrix(
    grid: &FrequencyGrid,
    z: &[Mat2],
    z0: f64,
) -> Result<TwoPortSweep, RfError> {
    check_z0(z0)?;
    if z.len() != grid.len() {
        return Err(RfError::LengthMismatch {
            grid: grid.len(),
            data: z.len(),
        });
    }
    let s = z
        .iter()
        .zip(grid.points())
        .enumerate()
        .map(|(index, (zm, &frequency))| {
            if !zm.is_finite() {
                return Err(RfError::NonFinite("impedance matrix"));
            }
            z_to_s_matrix(zm, z0).ok_or(RfError::Singular { index, frequency })
        })
        .collect::<Result<Vec<_>, _>>()?;
    TwoPortSweep::new(grid.clone(), s, z0)
}

/// One-port sweep held as impedance.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePortSweep {
    grid: FrequencyGrid,
    z: Vec<Complex64>,
    reference_impedance: f64,
}

impl OnePortSweep {
    pub fn from_impedance(
        grid: FrequencyGrid,
        z: Vec<Complex64>,
        reference_impedance: f64,
    ) -> Result<Self, RfError> {
        check_z0(reference_impedance)?;
        if z.len() != grid.len() {
            return Err(RfError::LengthMismatch {
                grid: grid.len(),
                data: z.len(),
            });
        }
        Ok(Self {
            grid,
            z,
            reference_impedance,
        })
    }

    pub fn from_reflection(
        grid: FrequencyGrid,
        s11: &[Complex64],
        reference_impedance: f64,
    ) -> Result<Self, RfError> {
        let z = s11
            .iter()
            .map(|&s| s_to_z_oneport(s, reference_impedance))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_impedance(grid, z, reference_impedance)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn impedance(&self) -> &[Complex64] {
        &self.z
    }

    pub fn reference_impedance(&self) -> f64 {
        self.reference_impedance
    }

    pub fn reflection(&self) -> Vec<Complex64> {
        let z0 = self.reference_impedance;
        self.z.iter().map(|&z| (z - z0) / (z + z0)).collect()
    }
}

/// Two-port scattering sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPortSweep {
    grid: FrequencyGrid,
    s: Vec<Mat2>,
    reference_impedance: f64,
}

impl TwoPortSweep {
    pub fn new(
        grid: FrequencyGrid,
        s: Vec<Mat2>,
        reference_impedance: f64,
    ) -> Result<Self, RfError> {
        check_z0(reference_impedance)?;
        if s.len() != grid.len() {
            return Err(RfError::LengthMismatch {
                grid: grid.len(),
                data: s.len(),
            });
        }
        Ok(Self {
            grid,
            s,
            reference_impedance,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn s(&self) -> &[Mat2] {
        &self.s
    }

    pub fn reference_impedance(&self) -> f64 {
        self.reference_impedance
    }

    /// One S-parameter across the sweep, ports numbered from 1.
    pub fn parameter(&self, row: usize, col: usize) -> Vec<Complex64> {
        self.s.iter().map(|m| m.get(row - 1, col - 1)).collect()
    }

    /// |S_rc| in dB across the sweep.
    pub fn parameter_db(&self, row: usize, col: usize) -> Vec<f64> {
        self.parameter(row, col)
            .into_iter()
            .map(magnitude_db)
            .collect()
    }

    pub fn to_impedance(&self) -> Result<Vec<Mat2>, RfError> {
        self.s
            .iter()
            .zip(self.grid.points())
            .enumerate()
            .map(|(index, (s, &frequency))| {
                s_to_z_matrix(s, self.reference_impedance)
                    .ok_or(RfError::Singular { index, frequency })
            })
            .collect()
    }

    pub fn max_abs_reciprocity_error(&self) -> f64 {
        self.s
            .iter()
            .filter(|m| m.is_finite())
            .map(|m| (m.get(0, 1) - m.get(1, 0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.s
            .iter()
            .filter(|m| m.is_finite())
            .map(|m| m.singular_values()[0])
            .fold(0.0, f64::max)
    }

    pub fn is_passive(&self, tol: f64) -> bool {
        self.max_singular_value() <= 1.0 + tol
    }
}

/// 20 log10 |z|, floored at -400 dB so exact zeros stay finite.
pub fn magnitude_db(z: Complex64) -> f64 {
    let mag = z.norm();
    if mag <= 1e-20 {
        -400.0
    } else {
        20.0 * mag.log10()
    }
}
