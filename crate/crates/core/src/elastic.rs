//! Compressional and shear far fields of the Navier source
//! `F = g + diag(σ₁, σ₂) Ẇ`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use crate::acoustic::{farfield_constant, wavevector};
use crate::domain::{AdmissiblePoint, Point};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::noise::{NoiseGrid, QuadratureMesh};
use crate::transform::PhaseSumPlan;

pub type Matrix2 = [[f64; 2]; 2];
pub type CVec2 = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    lambda: f64,
    mu: f64,
}

impl LameParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if mu > 0.0 && lambda + mu > 0.0 && lambda.is_finite() && mu.is_finite() {
            Ok(Self { lambda, mu })
        } else {
            Err(Error::InvalidLame { lambda, mu })
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn c_p(&self) -> f64 {
        (self.lambda + 2.0 * self.mu).sqrt()
    }

    pub fn c_s(&self) -> f64 {
        self.mu.sqrt()
    }

    pub fn speed(&self, wave: Wave) -> f64 {
        match wave {
            Wave::P => self.c_p(),
            Wave::S => self.c_s(),
        }
    }
}

impl Default for LameParams {
    fn default() -> Self {
        Self { lambda: 1.0, mu: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wave {
    P,
    S,
}

impl Wave {
    pub const BOTH: [Wave; 2] = [Wave::P, Wave::S];

    pub fn as_str(&self) -> &'static str {
        match self {
            Wave::P => "p",
            Wave::S => "s",
        }
    }
}

/// `(P_p, P_s) = (x̂x̂ᵀ, I − x̂x̂ᵀ)`.
pub fn projections(xhat: Point) -> (Matrix2, Matrix2) {
    let (a, b) = (xhat[0], xhat[1]);
    let p = [[a * a, a * b], [a * b, b * b]];
    let s = [[1.0 - a * a, -a * b], [-a * b, 1.0 - b * b]];
    (p, s)
}

pub fn projection(xhat: Point, wave: Wave) -> Matrix2 {
    let (p, s) = projections(xhat);
    match wave {
        Wave::P => p,
        Wave::S => s,
    }
}

pub(crate) fn apply(m: &Matrix2, v: &CVec2) -> CVec2 {
    [v[0] * m[0][0] + v[1] * m[0][1], v[0] * m[1][0] + v[1] * m[1][1]]
}

/// Vector mean `g = (g₁, g₂)` and diagonal deviation `(σ₁, σ₂)`.
#[derive(Clone)]
pub struct VectorSourceModel {
    pub g: [Arc<dyn Field>; 2],
    pub sigma: [Arc<dyn Field>; 2],
}

impl VectorSourceModel {
    pub fn new(
        g1: impl Field + 'static,
        g2: impl Field + 'static,
        sigma1: impl Field + 'static,
        sigma2: impl Field + 'static,
    ) -> Self {
        Self { g: [Arc::new(g1), Arc::new(g2)], sigma: [Arc::new(sigma1), Arc::new(sigma2)] }
    }

    pub fn sample(&self, mesh: &QuadratureMesh) -> SampledVectorSource {
        SampledVectorSource {
            mesh: *mesh,
            g: [mesh.sample(&*self.g[0]), mesh.sample(&*self.g[1])],
            sigma: [mesh.sample(&*self.sigma[0]), mesh.sample(&*self.sigma[1])],
        }
    }
}

impl core::fmt::Debug for VectorSourceModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("VectorSourceModel")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledVectorSource {
    pub mesh: QuadratureMesh,
    pub g: [Vec<f64>; 2],
    pub sigma: [Vec<f64>; 2],
}

impl SampledVectorSource {
    pub fn mean_weights(&self) -> [Vec<f64>; 2] {
        let area = self.mesh.cell_area();
        [0, 1].map(|c| self.g[c].iter().map(|g| g * area).collect())
    }

    /// Component `c` of `g(y_j)|cell| + σ(y_j) ΔW_j`; component 2 sees only `ΔW₂`.
    pub fn realization_weights(&self, noise: &NoiseGrid, out: &mut [Vec<f64>; 2]) -> Result<()> {
        if *noise.mesh() != self.mesh {
            return Err(Error::MeshMismatch);
        }
        if noise.dims() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: noise.dims() });
        }
        let area = self.mesh.cell_area();
        for (c, o) in out.iter_mut().enumerate() {
            o.resize(self.mesh.len(), 0.0);
            for (((o, g), s), w) in o.iter_mut().zip(&self.g[c]).zip(&self.sigma[c]).zip(noise.component(c)) {
                *o = g * area + s * w;
            }
        }
        Ok(())
    }
}

/// Far field of wave type `wave` at wavenumber `k` built from the vector
/// integral `I = Σ_j e^{-ik x̂·y_j} w_j`: `γ(k)/c² · P · I`.
///
/// The `1/c²` equals `k²/f²` for the physical frequency `f = c k`.
pub fn wave_farfield(integral: &CVec2, wave: Wave, k: f64, xhat: Point, lame: &LameParams) -> Result<CVec2> {
    let c = lame.speed(wave);
    let scale = farfield_constant(k)? / (c * c);
    let v = apply(&projection(xhat, wave), integral);
    Ok([v[0] * scale, v[1] * scale])
}

fn vector_integral(mesh: &QuadratureMesh, weights: &[Vec<f64>; 2], kappa: Point) -> Result<CVec2> {
    let plan = PhaseSumPlan::new(mesh, &[kappa])?;
    let mut ws = plan.workspace();
    let mut out = [[Complex64::new(0.0, 0.0)]; 2];
    for c in 0..2 {
        plan.evaluate(&weights[c], &mut ws, &mut out[c])?;
    }
    Ok([out[0][0], out[1][0]])
}

fn farfields_from_weights(
    mesh: &QuadratureMesh,
    weights: &[Vec<f64>; 2],
    omega: f64,
    xhat: Point,
    lame: &LameParams,
) -> Result<(CVec2, CVec2)> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveWavenumber(omega));
    }
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (slot, wave) in out.iter_mut().zip(Wave::BOTH) {
        let k = omega / lame.speed(wave);
        let integral = vector_integral(mesh, weights, wavevector(k, xhat))?;
        *slot = wave_farfield(&integral, wave, k, xhat, lame)?;
    }
    Ok((out[0], out[1]))
}

/// `(u_p∞, u_s∞)` at angular frequency `omega` for one noise realization.
pub fn realize_elastic_farfields(
    src: &SampledVectorSource,
    noise: &NoiseGrid,
    omega: f64,
    xhat: Point,
    lame: &LameParams,
) -> Result<(CVec2, CVec2)> {
    let mut w = [Vec::new(), Vec::new()];
    src.realization_weights(noise, &mut w)?;
    farfields_from_weights(&src.mesh, &w, omega, xhat, lame)
}

/// Noise-free `(u_p∞, u_s∞)` of the mean `g`.
pub fn deterministic_elastic_farfields(
    src: &SampledVectorSource,
    omega: f64,
    xhat: Point,
    lame: &LameParams,
) -> Result<(CVec2, CVec2)> {
    farfields_from_weights(&src.mesh, &src.mean_weights(), omega, xhat, lame)
}

/// Physical frequency `c_ξ ω` at which wave type ξ is measured.
pub fn elastic_measurement_frequency(point: &AdmissiblePoint, wave: Wave, lame: &LameParams) -> Result<f64> {
    if !point.mode.is_elastic() {
        return Err(Error::WrongModel(alloc::string::String::from(point.mode.as_str())));
    }
    Ok(lame.speed(wave) * point.frequency)
}
