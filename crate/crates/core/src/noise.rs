//! Midpoint quadrature mesh, discretized white noise and the Itô sum.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::field::Field;

/// Uniform `M × M` cell partition of `Ω` with cell-midpoint nodes.
///
/// Cell `(j1, j2)` is stored at flat index `j1 * M + j2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMesh {
    cells_per_side: usize,
    side: f64,
}

impl QuadratureMesh {
    pub fn new(cells_per_side: usize, side: f64) -> Result<Self> {
        if cells_per_side < 2 {
            return Err(Error::InvalidParameter { name: "mesh", value: cells_per_side as f64 });
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter { name: "side", value: side });
        }
        Ok(Self { cells_per_side, side })
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn len(&self) -> usize {
        self.cells_per_side * self.cells_per_side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_width(&self) -> f64 {
        self.side / self.cells_per_side as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.cell_width();
        h * h
    }

    /// Midpoint coordinate of the `j`-th cell along either axis.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.side + (j as f64 + 0.5) * self.cell_width()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.cells_per_side).map(|j| self.coordinate(j)).collect()
    }

    pub fn center(&self, j: usize) -> Point {
        let m = self.cells_per_side;
        [self.coordinate(j / m), self.coordinate(j % m)]
    }

    pub fn centers(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |j| self.center(j))
    }

    /// Values of `field` at every cell center, in flat order.
    pub fn sample<F: Field + ?Sized>(&self, field: &F) -> Vec<f64> {
        self.centers().map(|y| field.value(y)).collect()
    }
}

const NOISE_TAG: u64 = 0x5749_454e_4552_0001;
const PERTURBATION_TAG: u64 = 0x5045_5254_5552_0002;

/// Counter-based seed: the stream for realization `r` depends only on
/// `(master_seed, r)`, never on which worker draws it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub realization: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, realization: u64) -> Self {
        Self { master_seed, realization }
    }

    fn stream(&self, tag: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed ^ tag);
        rng.set_stream(self.realization);
        rng
    }

    /// Generator for the Brownian increments of this realization.
    pub fn noise_rng(&self) -> ChaCha8Rng {
        self.stream(NOISE_TAG)
    }

    /// Generator for the measurement perturbations of this realization.
    pub fn perturbation_rng(&self) -> ChaCha8Rng {
        self.stream(PERTURBATION_TAG)
    }
}

/// One realization of the Brownian increments `ΔW_j ~ N(0, cell_area)`.
///
/// Components are stored one after another: component `c` of cell `j`
/// lives at `c * mesh.len() + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseGrid {
    mesh: QuadratureMesh,
    dims: usize,
    increments: Vec<f64>,
}

impl NoiseGrid {
    pub fn zeros(mesh: QuadratureMesh, dims: usize) -> Result<Self> {
        if !(1..=2).contains(&dims) {
            return Err(Error::DimensionMismatch { expected: 2, found: dims });
        }
        Ok(Self { mesh, dims, increments: vec![0.0; dims * mesh.len()] })
    }

    pub fn mesh(&self) -> &QuadratureMesh {
        &self.mesh
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.mesh.len();
        &self.increments[c * n..(c + 1) * n]
    }

    /// Redraw in place for another realization.
    pub fn resample(&mut self, seed: SeedSpec) {
        let scale = self.mesh.cell_area().sqrt();
        let mut rng = seed.noise_rng();
        for w in &mut self.increments {
            let z: f64 = rng.sample(StandardNormal);
            *w = scale * z;
        }
    }
}

pub fn sample_noise(mesh: &QuadratureMesh, dims: usize, seed: SeedSpec) -> Result<NoiseGrid> {
    let mut grid = NoiseGrid::zeros(*mesh, dims)?;
    grid.resample(seed);
    Ok(grid)
}

fn check_scalar(mesh: &QuadratureMesh, kernel_len: usize, noise: &NoiseGrid, dims: usize) -> Result<()> {
    if noise.mesh != *mesh {
        return Err(Error::MeshMismatch);
    }
    if noise.dims != dims {
        return Err(Error::DimensionMismatch { expected: dims, found: noise.dims });
    }
    if kernel_len != mesh.len() {
        return Err(Error::ShapeMismatch { expected: mesh.len(), found: kernel_len });
    }
    Ok(())
}

/// `Σ_j h(y_j) ΔW_j` for a scalar kernel sampled on `mesh`.
pub fn stochastic_integral(mesh: &QuadratureMesh, kernel: &[Complex64], noise: &NoiseGrid) -> Result<Complex64> {
    check_scalar(mesh, kernel.len(), noise, 1)?;
    Ok(kernel.iter().zip(&noise.increments).map(|(h, w)| h * w).sum())
}

/// `Σ_j H(y_j) ΔW_j` for a 2×2 matrix kernel acting on vector increments.
pub fn stochastic_integral_matrix(
    mesh: &QuadratureMesh,
    kernel: &[[[Complex64; 2]; 2]],
    noise: &NoiseGrid,
) -> Result<[Complex64; 2]> {
    check_scalar(mesh, kernel.len(), noise, 2)?;
    let (w1, w2) = (noise.component(0), noise.component(1));
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (j, h) in kernel.iter().enumerate() {
        for (r, row) in h.iter().enumerate() {
            out[r] += row[0] * w1[j] + row[1] * w2[j];
        }
    }
    Ok(out)
}
