//! Vector mean and variance coefficients from compressional and shear
//! far-field statistics.

use alloc::string::String;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::acoustic::{overlap_correction, zero_mode_factor};
use super::{CoefficientKind, CoefficientSet};
use crate::acoustic::farfield_constant;
use crate::domain::{FourierIndex, Point};
use crate::elastic::{CVec2, LameParams};
use crate::error::{Error, Result};
use crate::measurement::{gather, ChannelStat, MeasurementSet, Measurements};

/// `U = c_p²/γ(ω) u_p + c_s²/γ(ω) u_s`, with both far fields measured at
/// their own frequency `c_ξ ω`.
pub fn combine_normalized(up: &CVec2, us: &CVec2, omega: f64, lame: &LameParams) -> Result<CVec2> {
    let gamma = farfield_constant(omega)?;
    let (fp, fs) = (lame.c_p() * lame.c_p() / gamma, lame.c_s() * lame.c_s() / gamma);
    Ok([up[0] * fp + us[0] * fs, up[1] * fp + us[1] * fs])
}

/// Combined covariance from the four normalized channels `pp, ps, sp, ss`.
pub fn combine_pair_covariances(pairs: &[CVec2; 4]) -> CVec2 {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for p in pairs {
        out[0] += p[0];
        out[1] += p[1];
    }
    out
}

/// `ĝ_l = (1/a²)(c_p²/γ(ω_l) E_p + c_s²/γ(ω_l) E_s)` for `l ≠ 0`.
pub fn mean_coefficient_elastic(
    ep: &CVec2,
    es: &CVec2,
    l: FourierIndex,
    omega_l: f64,
    side: f64,
    lame: &LameParams,
) -> Result<CVec2> {
    if l.is_zero() {
        return Err(Error::ZeroModeNotAllowed);
    }
    let u = combine_normalized(ep, es, omega_l, lame)?;
    let area = side * side;
    Ok([u[0] / area, u[1] / area])
}

/// `ĝ_0` from data at `ω₀ = (2π/a)ξ₀`, `x̂ = (1, 0)`.
pub fn mean_zero_coefficient_elastic(
    ep0: &CVec2,
    es0: &CVec2,
    coeffs: &CoefficientSet<2>,
    xi0: f64,
    side: f64,
    lame: &LameParams,
) -> Result<CVec2> {
    let factor = zero_mode_factor(xi0)?;
    let omega0 = 2.0 * PI / side * xi0;
    let u = combine_normalized(ep0, es0, omega0, lame)?;
    let correction = overlap_correction(coeffs, xi0, side)?;
    let area = side * side;
    Ok([0, 1].map(|k| (u[k] - correction[k]) * (factor / area)))
}

/// `σ̂_l = C[U(ω₀ + τ_l), U(ω₀)] / a²`, componentwise.
pub fn variance_coefficient_elastic(c: &CVec2, side: f64) -> CVec2 {
    let area = side * side;
    [c[0] / area, c[1] / area]
}

pub fn synthesize_vector(coeffs: &CoefficientSet<2>, x: Point) -> [f64; 2] {
    coeffs.synthesize(x)
}

struct ElasticData<'a> {
    mean_p: &'a [ChannelStat<2>],
    mean_s: &'a [ChannelStat<2>],
    covariance: &'a [ChannelStat<2>],
    lame: LameParams,
}

fn elastic_data(set: &MeasurementSet) -> Result<ElasticData<'_>> {
    match &set.measurements {
        Measurements::Elastic { mean_p, mean_s, covariance, .. } => Ok(ElasticData {
            mean_p,
            mean_s,
            covariance,
            lame: set.metadata.lame.ok_or_else(|| Error::WrongModel(String::from("missing Lamé parameters")))?,
        }),
        Measurements::Acoustic { .. } => Err(Error::WrongModel(String::from("expected elastic measurements"))),
    }
}

pub fn invert_elastic_mean(set: &MeasurementSet, order: Option<u32>) -> Result<CoefficientSet<2>> {
    let data = elastic_data(set)?;
    let order = order.unwrap_or(set.metadata.order);
    let side = set.metadata.side;
    let p = gather(data.mean_p, order)?;
    let s = gather(data.mean_s, order)?;
    let mut coeffs = CoefficientSet::zeros(order, CoefficientKind::Mean, side);
    let mut zero = None;
    for (cp, cs) in p.into_iter().zip(s) {
        let l = cp.point.index;
        if l.is_zero() {
            zero = Some((cp.value, cs.value));
        } else {
            coeffs.set(l, mean_coefficient_elastic(&cp.value, &cs.value, l, cp.point.frequency, side, &data.lame)?)?;
        }
    }
    let (ep0, es0) = zero.expect("gather returns the zero mode");
    let g0 = mean_zero_coefficient_elastic(&ep0, &es0, &coeffs, set.metadata.zero_mode_offset, side, &data.lame)?;
    coeffs.set(FourierIndex::ZERO, g0)?;
    Ok(coeffs)
}

pub fn invert_elastic_variance(set: &MeasurementSet, order: Option<u32>) -> Result<CoefficientSet<2>> {
    let data = elastic_data(set)?;
    let order = order.unwrap_or(set.metadata.order);
    let side = set.metadata.side;
    let mut coeffs = CoefficientSet::zeros(order, CoefficientKind::Variance, side);
    for ch in gather(data.covariance, order)? {
        coeffs.set(ch.point.index, variance_coefficient_elastic(&ch.value, side))?;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::projections;

    const Z: Complex64 = Complex64::new(0.0, 0.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_inputs() {
        let lame = LameParams::default();
        assert_eq!(combine_normalized(&[Z, Z], &[Z, Z], 2.0, &lame).unwrap(), [Z, Z]);
        assert_eq!(mean_coefficient_elastic(&[Z, Z], &[Z, Z], FourierIndex::new(1, 0), 2.0 * PI, 1.0, &lame).unwrap(), [Z, Z]);
        assert_eq!(variance_coefficient_elastic(&[Z, Z], 1.0), [Z, Z]);
        assert!(combine_normalized(&[Z, Z], &[Z, Z], 0.0, &lame).is_err());
    }

    #[test]
    fn zero_mode_diagonal_inversion() {
        let lame = LameParams::new(2.0, 0.5).unwrap();
        let (xi0, a) = (1e-3, 1.0);
        let target = [c(0.4, 0.0), c(-1.1, 0.0)];
        let omega0 = 2.0 * PI * xi0;
        let gamma = farfield_constant(omega0).unwrap();
        let bracket = (xi0 * PI).sin() / (xi0 * PI);
        // put the whole bracket into the p channel
        let ep = [0, 1].map(|k| target[k] * bracket * gamma / (lame.c_p() * lame.c_p()));
        let coeffs = CoefficientSet::<2>::zeros(2, CoefficientKind::Mean, a);
        let g0 = mean_zero_coefficient_elastic(&ep, &[Z, Z], &coeffs, xi0, a, &lame).unwrap();
        for k in 0..2 {
            assert!((g0[k] - target[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn combine_respects_projector_ranges() {
        let lame = LameParams::new(1.0, 1.0).unwrap();
        let x: Point = [0.6, 0.8];
        let (pp, ps) = projections(x);
        let v = [c(0.3, 1.0), c(-2.0, 0.5)];
        let up = [v[0] * pp[0][0] + v[1] * pp[0][1], v[0] * pp[1][0] + v[1] * pp[1][1]];
        let us = [v[0] * ps[0][0] + v[1] * ps[0][1], v[0] * ps[1][0] + v[1] * ps[1][1]];
        let omega = 5.0;
        let u = combine_normalized(&up, &us, omega, &lame).unwrap();
        let gamma = farfield_constant(omega).unwrap();
        let along = u[0] * x[0] + u[1] * x[1];
        let expected_along = (up[0] * x[0] + up[1] * x[1]) * 3.0 / gamma;
        assert!((along - expected_along).norm() < 1e-12);
        let across = u[0] * -x[1] + u[1] * x[0];
        let expected_across = (us[0] * -x[1] + us[1] * x[0]) / gamma;
        assert!((across - expected_across).norm() < 1e-12);
    }

    #[test]
    fn equal_speeds_reduce_to_acoustic_normalization() {
        // with c_p = c_s = c the combined field is c²/γ times the plain sum,
        // i.e. c² times the acoustic normalization √(8πω) e^{-iπ/4}
        let omega = 3.0;
        let c2 = 2.0;
        let gamma = farfield_constant(omega).unwrap();
        let acoustic = Complex64::from_polar((8.0 * PI * omega).sqrt(), -PI / 4.0);
        assert!((c2 / gamma - acoustic * c2).norm() < 1e-12);
    }

    #[test]
    fn pair_sum() {
        let pairs = [[c(1.0, 0.0), c(0.0, 1.0)], [c(2.0, 0.0), Z], [Z, c(0.5, 0.0)], [c(-1.0, 1.0), Z]];
        assert_eq!(combine_pair_covariances(&pairs), [c(2.0, 1.0), c(0.5, 1.0)]);
    }
}
