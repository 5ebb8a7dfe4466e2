//! Square domain geometry, the Fourier lattice, and the admissible
//! frequency/direction generators for the four measurement modes.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use crate::error::{Error, Result};

/// A point (or 2-vector) in the plane.
pub type Point = [f64; 2];

/// Default small constant used for the zero Fourier mode of the mean
/// (`lambda0` acoustic, `xi0` elastic).
pub const DEFAULT_ZERO_MODE_OFFSET: f64 = 1e-3;

/// The square `Ω = (-a/2, a/2)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    side: f64,
}

impl Domain {
    pub fn new(side: f64) -> Result<Self> {
        if side > 0.0 && side.is_finite() {
            Ok(Self { side })
        } else {
            Err(Error::InvalidParameter { name: "side", value: side })
        }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn half_side(&self) -> f64 {
        0.5 * self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    /// `2π / a`, the spacing of the Fourier lattice in wavenumber space.
    pub fn lattice_scale(&self) -> f64 {
        2.0 * PI / self.side
    }

    /// Membership in the closed square.
    pub fn contains(&self, x: Point) -> bool {
        let h = self.half_side();
        x[0].abs() <= h && x[1].abs() <= h
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self { side: 1.0 }
    }
}

/// An integer pair `l = (l1, l2)` labelling the basis function `φ_l`.
///
/// The derived ordering is lexicographic in `(l1, l2)`, which is the
/// enumeration order used for every generated list and file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FourierIndex {
    pub l1: i32,
    pub l2: i32,
}

impl FourierIndex {
    pub const ZERO: Self = Self { l1: 0, l2: 0 };

    pub const fn new(l1: i32, l2: i32) -> Self {
        Self { l1, l2 }
    }

    pub fn is_zero(&self) -> bool {
        self.l1 == 0 && self.l2 == 0
    }

    /// `|l|_∞`
    pub fn sup_norm(&self) -> u32 {
        self.l1.unsigned_abs().max(self.l2.unsigned_abs())
    }

    /// Euclidean length `|l|`.
    pub fn norm(&self) -> f64 {
        let (a, b) = (self.l1 as f64, self.l2 as f64);
        (a * a + b * b).sqrt()
    }

    /// `l / |l|`, or `None` for the zero index.
    pub fn direction(&self) -> Option<Point> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some([self.l1 as f64 / n, self.l2 as f64 / n])
    }

    /// The lattice wavevector `(2π/a) l`.
    pub fn wavevector(&self, domain: &Domain) -> Point {
        let s = domain.lattice_scale();
        [s * self.l1 as f64, s * self.l2 as f64]
    }
}

impl core::ops::Neg for FourierIndex {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.l1, -self.l2)
    }
}

impl fmt::Display for FourierIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.l1, self.l2)
    }
}

/// All indices with `|l|_∞ <= order`, in lexicographic order.
pub fn lattice(order: u32) -> impl Iterator<Item = FourierIndex> + Clone {
    let n = order as i32;
    (-n..=n).flat_map(move |l1| (-n..=n).map(move |l2| FourierIndex::new(l1, l2)))
}

/// Number of indices with `|l|_∞ <= order`.
pub fn lattice_len(order: u32) -> usize {
    let side = 2 * order as usize + 1;
    side * side
}

/// Position of `l` in [`lattice`]`(order)`.
pub fn lattice_position(l: FourierIndex, order: u32) -> Option<usize> {
    if l.sup_norm() > order {
        return None;
    }
    let n = order as i32;
    let side = 2 * n + 1;
    Some(((l.l1 + n) * side + (l.l2 + n)) as usize)
}

/// `φ_l(x) = exp(i (2π/a) l·x)`.
pub fn basis_eval(l: FourierIndex, x: Point, side: f64) -> Complex64 {
    let phase = 2.0 * PI / side * (l.l1 as f64 * x[0] + l.l2 as f64 * x[1]);
    Complex64::cis(phase)
}

/// Truncation order `N = 2[δ^{-1/2}]` where `[X]` is the largest integer
/// smaller than `X + 1`.
///
/// Values of `δ^{-1/2}` within rounding of an integer count as integers, so
/// `δ = 0.01` gives `N = 20` rather than 22.
pub fn truncation_order(delta: f64) -> Result<u32> {
    if delta == 0.0 {
        return Err(Error::DegenerateTruncation);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidNoiseLevel(delta));
    }
    let x = 1.0 / delta.sqrt();
    let nearest = x.round();
    let bracket = if (x - nearest).abs() <= 1e-9 * x { nearest } else { x.ceil() };
    Ok(2 * bracket as u32)
}

/// Which statistic an admissible point serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    AcousticMean,
    AcousticVariance,
    ElasticMean,
    ElasticVariance,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::AcousticMean => "acoustic-mean",
            Mode::AcousticVariance => "acoustic-variance",
            Mode::ElasticMean => "elastic-mean",
            Mode::ElasticVariance => "elastic-variance",
        }
    }

    pub fn is_elastic(&self) -> bool {
        matches!(self, Mode::ElasticMean | Mode::ElasticVariance)
    }

    pub fn is_variance(&self) -> bool {
        matches!(self, Mode::AcousticVariance | Mode::ElasticVariance)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acoustic-mean" => Ok(Mode::AcousticMean),
            "acoustic-variance" => Ok(Mode::AcousticVariance),
            "elastic-mean" => Ok(Mode::ElasticMean),
            "elastic-variance" => Ok(Mode::ElasticVariance),
            _ => Err(Error::InvalidParameter { name: "mode", value: f64::NAN }),
        }
    }
}

/// One `(index, frequency, direction)` triple.
///
/// `frequency` is the wavenumber `k_l` (acoustic mean), the offset `τ_l`
/// (variance modes) or the angular frequency `ω_l` (elastic mean). It is
/// positive except for the variance zero mode, where `τ_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePoint {
    pub index: FourierIndex,
    pub frequency: f64,
    pub direction: Point,
    pub mode: Mode,
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidParameter { name: "order", value: 0.0 })
    } else {
        Ok(())
    }
}

fn check_offset(name: &'static str, offset: f64) -> Result<()> {
    if offset > 0.0 && offset < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value: offset })
    }
}

fn check_unit(direction: Point) -> Result<()> {
    let n = direction[0].hypot(direction[1]);
    if (n - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "zero_direction", value: n })
    }
}

fn mean_points(order: u32, offset: f64, domain: &Domain, mode: Mode) -> Vec<AdmissiblePoint> {
    let scale = domain.lattice_scale();
    lattice(order)
        .map(|index| match index.direction() {
            Some(direction) => AdmissiblePoint {
                index,
                frequency: scale * index.norm(),
                direction,
                mode,
            },
            None => AdmissiblePoint {
                index,
                frequency: scale * offset,
                direction: [1.0, 0.0],
                mode,
            },
        })
        .collect()
}

fn variance_points(order: u32, domain: &Domain, zero_dir: Point, mode: Mode) -> Vec<AdmissiblePoint> {
    let scale = domain.lattice_scale();
    lattice(order)
        .map(|index| AdmissiblePoint {
            index,
            frequency: scale * index.norm(),
            direction: index.direction().unwrap_or(zero_dir),
            mode,
        })
        .collect()
}

/// Wavenumbers `k_l` and directions for recovering the acoustic mean.
pub fn acoustic_mean_points(order: u32, lambda0: f64, domain: &Domain) -> Result<Vec<AdmissiblePoint>> {
    check_order(order)?;
    check_offset("lambda0", lambda0)?;
    Ok(mean_points(order, lambda0, domain, Mode::AcousticMean))
}

/// Offsets `τ_l` and directions for recovering the acoustic variance.
pub fn acoustic_variance_points(order: u32, domain: &Domain, zero_dir: Point) -> Result<Vec<AdmissiblePoint>> {
    check_unit(zero_dir)?;
    Ok(variance_points(order, domain, zero_dir, Mode::AcousticVariance))
}

/// Angular frequencies `ω_l` and directions for recovering the elastic mean.
///
/// The far field of wave type ξ is measured at `c_ξ ω_l`; see
/// [`crate::elastic::elastic_measurement_frequency`].
pub fn elastic_mean_points(order: u32, xi0: f64, domain: &Domain) -> Result<Vec<AdmissiblePoint>> {
    check_order(order)?;
    check_offset("xi0", xi0)?;
    Ok(mean_points(order, xi0, domain, Mode::ElasticMean))
}

/// Offsets `τ_l` and directions for recovering the elastic variance.
pub fn elastic_variance_points(order: u32, domain: &Domain, zero_dir: Point) -> Result<Vec<AdmissiblePoint>> {
    check_unit(zero_dir)?;
    Ok(variance_points(order, domain, zero_dir, Mode::ElasticVariance))
}
