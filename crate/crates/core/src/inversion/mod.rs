//! Recovered Fourier coefficients and truncated-series synthesis.

pub mod acoustic;
pub mod elastic;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::domain::{basis_eval, lattice, lattice_len, lattice_position, FourierIndex, Point};
use crate::error::{Error, Result};
use crate::evaluation::EvalGrid;

pub use acoustic::{
    invert_acoustic_mean, invert_acoustic_variance, mean_coefficient, mean_zero_coefficient, overlap_integral,
    variance_coefficient,
};
pub use elastic::{
    combine_normalized, combine_pair_covariances, invert_elastic_mean, invert_elastic_variance,
    mean_coefficient_elastic, mean_zero_coefficient_elastic, synthesize_vector, variance_coefficient_elastic,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    Mean,
    Variance,
}

impl CoefficientKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoefficientKind::Mean => "mean",
            CoefficientKind::Variance => "variance",
        }
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoefficientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(CoefficientKind::Mean),
            "variance" => Ok(CoefficientKind::Variance),
            _ => Err(Error::InvalidParameter { name: "kind", value: f64::NAN }),
        }
    }
}

/// Coefficients `c_l` for every `|l|_∞ <= order`, stored densely in
/// lexicographic index order. `D = 1` for scalar, `D = 2` for vector fields.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet<const D: usize> {
    order: u32,
    kind: CoefficientKind,
    side: f64,
    coeffs: Vec<[Complex64; D]>,
}

/// A truncated series evaluated on an [`EvalGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation<const D: usize> {
    pub values: Vec<[f64; D]>,
    pub gradients: Vec<[[f64; 2]; D]>,
    /// Largest `|Im|` of the series values over the grid.
    pub max_imag_residual: f64,
}

impl<const D: usize> CoefficientSet<D> {
    pub fn zeros(order: u32, kind: CoefficientKind, side: f64) -> Self {
        Self { order, kind, side, coeffs: vec![[Complex64::new(0.0, 0.0); D]; lattice_len(order)] }
    }

    pub fn from_fn(order: u32, kind: CoefficientKind, side: f64, f: impl FnMut(FourierIndex) -> [Complex64; D]) -> Self {
        Self { order, kind, side, coeffs: lattice(order).map(f).collect() }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn get(&self, l: FourierIndex) -> Option<&[Complex64; D]> {
        lattice_position(l, self.order).map(|i| &self.coeffs[i])
    }

    pub fn set(&mut self, l: FourierIndex, value: [Complex64; D]) -> Result<()> {
        let i = lattice_position(l, self.order).ok_or(Error::InvalidParameter { name: "index", value: l.sup_norm() as f64 })?;
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (FourierIndex, &[Complex64; D])> + '_ {
        lattice(self.order).zip(&self.coeffs)
    }

    /// Copy of the coefficients with `|l|_∞ <= order`.
    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        Self::from_fn(order, self.kind, self.side, |l| *self.get(l).expect("lower order is contained"))
    }

    /// Complex series value `Σ c_l φ_l(x)`.
    pub fn evaluate(&self, x: Point) -> [Complex64; D] {
        let mut out = [Complex64::new(0.0, 0.0); D];
        for (l, c) in self.iter() {
            let phi = basis_eval(l, x, self.side);
            for k in 0..D {
                out[k] += c[k] * phi;
            }
        }
        out
    }

    /// Real part of the series at `x`.
    pub fn synthesize(&self, x: Point) -> [f64; D] {
        self.evaluate(x).map(|z| z.re)
    }

    /// Real part of the exact gradient of the series at `x`.
    pub fn synthesize_gradient(&self, x: Point) -> [[f64; 2]; D] {
        let s = 2.0 * PI / self.side;
        let mut out = [[0.0; 2]; D];
        for (l, c) in self.iter() {
            let phi = basis_eval(l, x, self.side);
            for k in 0..D {
                let d = Complex64::new(0.0, s) * c[k] * phi;
                out[k][0] += d.re * l.l1 as f64;
                out[k][1] += d.re * l.l2 as f64;
            }
        }
        out
    }

    /// Values and gradients on every grid point, by separable summation.
    pub fn evaluate_grid(&self, grid: &EvalGrid) -> GridEvaluation<D> {
        let n = self.order as i32;
        let width = (2 * n + 1) as usize;
        let s = 2.0 * PI / self.side;
        let xs = grid.coordinates();
        let p = xs.len();
        let zero = Complex64::new(0.0, 0.0);
        // e[i][m] = exp(i s (m - n) x_i)
        let e: Vec<Complex64> = xs
            .iter()
            .flat_map(|&x| (-n..=n).map(move |m| Complex64::cis(s * m as f64 * x)))
            .collect();

        let mut values = vec![[0.0; D]; p * p];
        let mut gradients = vec![[[0.0; 2]; D]; p * p];
        let mut max_imag: f64 = 0.0;
        // t[a][j] = Σ_b c_(a,b) e[j][b], dt = Σ_b i s b c_(a,b) e[j][b]
        let mut t = vec![zero; width * p];
        let mut dt = vec![zero; width * p];
        for k in 0..D {
            for a in 0..width {
                for j in 0..p {
                    let (mut acc, mut dacc) = (zero, zero);
                    for b in 0..width {
                        let term = self.coeffs[a * width + b][k] * e[j * width + b];
                        acc += term;
                        dacc += term * (b as f64 - n as f64);
                    }
                    t[a * p + j] = acc;
                    dt[a * p + j] = dacc * Complex64::new(0.0, s);
                }
            }
            for i in 0..p {
                for j in 0..p {
                    let (mut v, mut g1, mut g2) = (zero, zero, zero);
                    for a in 0..width {
                        let ea = e[i * width + a];
                        let ta = t[a * p + j];
                        v += ea * ta;
                        g1 += ea * ta * (a as f64 - n as f64);
                        g2 += ea * dt[a * p + j];
                    }
                    let g1 = g1 * Complex64::new(0.0, s);
                    let idx = grid.flat_index(i, j);
                    values[idx][k] = v.re;
                    gradients[idx][k] = [g1.re, g2.re];
                    max_imag = max_imag.max(v.im.abs());
                }
            }
        }
        GridEvaluation { values, gradients, max_imag_residual: max_imag }
    }
}

impl CoefficientSet<1> {
    pub fn get_scalar(&self, l: FourierIndex) -> Option<Complex64> {
        self.get(l).map(|c| c[0])
    }
}
