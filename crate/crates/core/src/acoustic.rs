//! Helmholtz far fields of `f = g + σẆ`, and measurement perturbation.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::noise::{NoiseGrid, QuadratureMesh};
use crate::transform::phase_sum;

/// `γ(k) = e^{iπ/4} / √(8πk)`.
pub fn farfield_constant(k: f64) -> Result<Complex64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NonPositiveWavenumber(k));
    }
    Ok(Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), FRAC_PI_4))
}

/// `γ(k) exp(-ik x̂·y)`.
pub fn farfield_kernel(xhat: Point, y: Point, k: f64) -> Result<Complex64> {
    let gamma = farfield_constant(k)?;
    Ok(gamma * Complex64::cis(-k * (xhat[0] * y[0] + xhat[1] * y[1])))
}

pub(crate) fn wavevector(k: f64, xhat: Point) -> Point {
    [k * xhat[0], k * xhat[1]]
}

/// Mean `g` and standard deviation `σ` of a scalar source.
#[derive(Clone)]
pub struct ScalarSourceModel {
    pub g: Arc<dyn Field>,
    pub sigma: Arc<dyn Field>,
}

impl ScalarSourceModel {
    pub fn new(g: impl Field + 'static, sigma: impl Field + 'static) -> Self {
        Self { g: Arc::new(g), sigma: Arc::new(sigma) }
    }

    pub fn sample(&self, mesh: &QuadratureMesh) -> SampledScalarSource {
        SampledScalarSource { mesh: *mesh, g: mesh.sample(&*self.g), sigma: mesh.sample(&*self.sigma) }
    }
}

impl core::fmt::Debug for ScalarSourceModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ScalarSourceModel")
    }
}

/// `g` and `σ` at the cell centers of one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledScalarSource {
    pub mesh: QuadratureMesh,
    pub g: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl SampledScalarSource {
    pub fn from_values(mesh: QuadratureMesh, g: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        for v in [&g, &sigma] {
            if v.len() != mesh.len() {
                return Err(Error::ShapeMismatch { expected: mesh.len(), found: v.len() });
            }
        }
        Ok(Self { mesh, g, sigma })
    }

    /// `g_j · |cell|`.
    pub fn mean_weights(&self) -> Vec<f64> {
        let area = self.mesh.cell_area();
        self.g.iter().map(|g| g * area).collect()
    }

    /// Overwrite `out` with `g_j · |cell| + σ_j ΔW_j`.
    pub fn realization_weights(&self, noise: &NoiseGrid, out: &mut [f64]) -> Result<()> {
        if *noise.mesh() != self.mesh {
            return Err(Error::MeshMismatch);
        }
        if noise.dims() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: noise.dims() });
        }
        let area = self.mesh.cell_area();
        for (((o, g), s), w) in out.iter_mut().zip(&self.g).zip(&self.sigma).zip(noise.increments()) {
            *o = g * area + s * w;
        }
        Ok(())
    }

    pub fn deterministic_farfield(&self, k: f64, xhat: Point) -> Result<Complex64> {
        let gamma = farfield_constant(k)?;
        Ok(gamma * phase_sum(&self.mesh, &self.mean_weights(), wavevector(k, xhat))?)
    }
}

/// Midpoint-rule far field of the mean source, `γ(k) Σ_j g(y_j) e^{-ik x̂·y_j} |cell|`.
pub fn deterministic_farfield(
    src: &ScalarSourceModel,
    k: f64,
    xhat: Point,
    mesh: &QuadratureMesh,
) -> Result<Complex64> {
    src.sample(mesh).deterministic_farfield(k, xhat)
}

/// Far field of one realization: deterministic part plus the Itô sum of
/// `σ` against the increments in `noise`.
pub fn realize_farfield(src: &SampledScalarSource, noise: &NoiseGrid, k: f64, xhat: Point) -> Result<Complex64> {
    let gamma = farfield_constant(k)?;
    let mut w = alloc::vec![0.0; src.mesh.len()];
    src.realization_weights(noise, &mut w)?;
    Ok(gamma * phase_sum(&src.mesh, &w, wavevector(k, xhat))?)
}

/// `v + δ r₁ |v| e^{iπ r₂}`.
pub fn add_noise(value: Complex64, delta: f64, r1: f64, r2: f64) -> Complex64 {
    value + Complex64::from_polar(delta * r1 * value.norm(), PI * r2)
}
