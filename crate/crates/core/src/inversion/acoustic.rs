//! Scalar mean and variance coefficients from acoustic far-field statistics.

use alloc::string::String;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use super::{CoefficientKind, CoefficientSet};
use crate::acoustic::farfield_constant;
use crate::domain::FourierIndex;
use crate::error::{Error, Result};
use crate::measurement::{gather, MeasurementSet, Measurements};

/// `ĝ_l = E / (a² γ(k_l))` for `l ≠ 0`.
pub fn mean_coefficient(e: Complex64, l: FourierIndex, k_l: f64, side: f64) -> Result<Complex64> {
    if l.is_zero() {
        return Err(Error::ZeroModeNotAllowed);
    }
    Ok(e / (farfield_constant(k_l)? * side * side))
}

/// `∫_Ω φ_l conj(φ_(λ₀,0))`, which vanishes unless `l₂ = 0`.
pub fn overlap_integral(l: FourierIndex, lambda0: f64, side: f64) -> Result<f64> {
    if l.is_zero() {
        return Err(Error::ZeroModeNotAllowed);
    }
    if l.l2 != 0 {
        return Ok(0.0);
    }
    let sign = if l.l1 % 2 == 0 { 1.0 } else { -1.0 };
    Ok(-side * side * sign * (PI * lambda0).sin() / (PI * (l.l1 as f64 - lambda0)))
}

pub(crate) fn zero_mode_factor(offset: f64) -> Result<f64> {
    let s = (offset * PI).sin();
    if s.abs() <= f64::EPSILON * offset.abs().max(1.0) {
        return Err(Error::SingularZeroMode(offset));
    }
    Ok(offset * PI / s)
}

pub(crate) fn overlap_correction<const D: usize>(
    coeffs: &CoefficientSet<D>,
    offset: f64,
    side: f64,
) -> Result<[Complex64; D]> {
    let mut sum = [Complex64::new(0.0, 0.0); D];
    for (l, c) in coeffs.iter() {
        if l.is_zero() || l.l2 != 0 {
            continue;
        }
        let w = overlap_integral(l, offset, side)?;
        for k in 0..D {
            sum[k] += c[k] * w;
        }
    }
    Ok(sum)
}

/// `ĝ_0` from the datum at `k = (2π/a)λ₀`, `x̂ = (1, 0)`, correcting for the
/// leakage of the already recovered `ĝ_l`.
///
/// Only the coefficients stored in `coeffs` (excluding `l = 0`) enter the
/// correction.
pub fn mean_zero_coefficient(
    e0: Complex64,
    coeffs: &CoefficientSet<1>,
    lambda0: f64,
    side: f64,
) -> Result<Complex64> {
    let factor = zero_mode_factor(lambda0)?;
    let k = 2.0 * PI / side * lambda0;
    let correction = overlap_correction(coeffs, lambda0, side)?[0];
    Ok((e0 / farfield_constant(k)? - correction) * (factor / (side * side)))
}

/// `σ̂_l = 8π √((k₀ + τ_l) k₀) / a² · C[u∞(k₀ + τ_l), u∞(k₀)]`.
pub fn variance_coefficient(c_raw: Complex64, k0: f64, tau: f64, side: f64) -> Result<Complex64> {
    if !(k0 > 0.0) {
        return Err(Error::NonPositiveWavenumber(k0));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter { name: "tau", value: tau });
    }
    Ok(c_raw * (8.0 * PI * ((k0 + tau) * k0).sqrt() / (side * side)))
}

fn acoustic_data(set: &MeasurementSet) -> Result<(&[crate::ChannelStat<1>], &[crate::ChannelStat<1>])> {
    match &set.measurements {
        Measurements::Acoustic { mean, covariance } => Ok((mean, covariance)),
        Measurements::Elastic { .. } => Err(Error::WrongModel(String::from("expected acoustic measurements"))),
    }
}

fn check_order(set: &MeasurementSet, order: Option<u32>) -> Result<u32> {
    let n = order.unwrap_or(set.metadata.order);
    if n == 0 {
        return Err(Error::InvalidParameter { name: "order", value: 0.0 });
    }
    Ok(n)
}

/// Mean coefficients for `|l|_∞ <= order` (default: the measured order).
pub fn invert_acoustic_mean(set: &MeasurementSet, order: Option<u32>) -> Result<CoefficientSet<1>> {
    let (mean, _) = acoustic_data(set)?;
    let order = check_order(set, order)?;
    let side = set.metadata.side;
    let channels = gather(mean, order)?;
    let mut coeffs = CoefficientSet::zeros(order, CoefficientKind::Mean, side);
    let mut e0 = None;
    for ch in channels {
        let l = ch.point.index;
        if l.is_zero() {
            e0 = Some(ch.value[0]);
        } else {
            coeffs.set(l, [mean_coefficient(ch.value[0], l, ch.point.frequency, side)?])?;
        }
    }
    let e0 = e0.expect("gather returns the zero mode");
    let g0 = mean_zero_coefficient(e0, &coeffs, set.metadata.zero_mode_offset, side)?;
    coeffs.set(FourierIndex::ZERO, [g0])?;
    Ok(coeffs)
}

/// Variance coefficients for `|l|_∞ <= order` (default: the measured order).
pub fn invert_acoustic_variance(set: &MeasurementSet, order: Option<u32>) -> Result<CoefficientSet<1>> {
    let (_, covariance) = acoustic_data(set)?;
    let order = check_order(set, order)?;
    let side = set.metadata.side;
    let k0 = set.metadata.baseline;
    let mut coeffs = CoefficientSet::zeros(order, CoefficientKind::Variance, side);
    for ch in gather(covariance, order)? {
        coeffs.set(ch.point.index, [variance_coefficient(ch.value[0], k0, ch.point.frequency, side)?])?;
    }
    Ok(coeffs)
}
