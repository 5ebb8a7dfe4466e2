//! Analytic test sources, the evaluation grid, and discrete relative
//! L²/H¹ errors.

use alloc::vec::Vec;

#[allow(unused_imports)] // std links inherent float methods that shadow these
use num_traits::Float;

use crate::acoustic::ScalarSourceModel;
use crate::campaign::CampaignSource;
use crate::domain::Point;
use crate::elastic::VectorSourceModel;
use crate::error::{Error, Result};
use crate::field::FnField;
use crate::inversion::{CoefficientSet, GridEvaluation};
use crate::measurement::Model;

pub const DEFAULT_GRID_POINTS: usize = 401;

fn bump(x: Point) -> f64 {
    let (a, b) = (x[0] - 0.01, x[1] - 0.12);
    (-200.0 * (a * a + b * b)).exp()
}

fn bump_grad(x: Point) -> [f64; 2] {
    let v = bump(x);
    [-400.0 * (x[0] - 0.01) * v, -400.0 * (x[1] - 0.12) * v]
}

fn saddle(x: Point) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    100.0 * (x2 * x2 - x1 * x1) * (-90.0 * (x1 * x1 + x2 * x2)).exp()
}

fn saddle_grad(x: Point) -> [f64; 2] {
    let (x1, x2) = (x[0], x[1]);
    let e = (-90.0 * (x1 * x1 + x2 * x2)).exp();
    let q = x2 * x2 - x1 * x1;
    [100.0 * e * (-2.0 * x1 - 180.0 * x1 * q), 100.0 * e * (2.0 * x2 - 180.0 * x2 * q)]
}

fn g1(x: Point) -> f64 {
    bump(x) - saddle(x)
}

fn g1_grad(x: Point) -> [f64; 2] {
    let (a, b) = (bump_grad(x), saddle_grad(x));
    [a[0] - b[0], a[1] - b[1]]
}

fn half_g1(x: Point) -> f64 {
    0.5 * g1(x)
}

fn half_g1_grad(x: Point) -> [f64; 2] {
    let d = g1_grad(x);
    [0.5 * d[0], 0.5 * d[1]]
}

fn quarter_g1_sq(x: Point) -> f64 {
    0.25 * g1(x) * g1(x)
}

fn quarter_g1_sq_grad(x: Point) -> [f64; 2] {
    let (v, d) = (g1(x), g1_grad(x));
    [0.5 * v * d[0], 0.5 * v * d[1]]
}

fn g2(x: Point) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    1500.0 * x1 * x1 * x2 * (-50.0 * (x1 * x1 + x2 * x2)).exp()
}

fn g2_grad(x: Point) -> [f64; 2] {
    let (x1, x2) = (x[0], x[1]);
    let e = (-50.0 * (x1 * x1 + x2 * x2)).exp();
    [
        1500.0 * e * (2.0 * x1 * x2 - 100.0 * x1 * x1 * x1 * x2),
        1500.0 * e * (x1 * x1 - 100.0 * x1 * x1 * x2 * x2),
    ]
}

fn half_bump(x: Point) -> f64 {
    0.5 * bump(x)
}

fn half_bump_grad(x: Point) -> [f64; 2] {
    let d = bump_grad(x);
    [0.5 * d[0], 0.5 * d[1]]
}

fn quarter_bump_sq(x: Point) -> f64 {
    0.25 * bump(x) * bump(x)
}

fn quarter_bump_sq_grad(x: Point) -> [f64; 2] {
    let (v, d) = (bump(x), bump_grad(x));
    [0.5 * v * d[0], 0.5 * v * d[1]]
}

const G1: FnField = FnField { value: g1, gradient: g1_grad };
const SIGMA1: FnField = FnField { value: half_g1, gradient: half_g1_grad };
const VARIANCE1: FnField = FnField { value: quarter_g1_sq, gradient: quarter_g1_sq_grad };
const G2: FnField = FnField { value: g2, gradient: g2_grad };
const SIGMA2: FnField = FnField { value: half_bump, gradient: half_bump_grad };
const VARIANCE2: FnField = FnField { value: quarter_bump_sq, gradient: quarter_bump_sq_grad };
const NOTHING: FnField = FnField { value: |_| 0.0, gradient: |_| [0.0, 0.0] };

/// A named source with closed-form mean, deviation and variance.
///
/// `mean`, `sigma` and `variance` hold one field per component.
#[derive(Debug, Clone)]
pub struct TestSource {
    pub name: &'static str,
    pub model: Model,
    pub mean: Vec<FnField>,
    pub sigma: Vec<FnField>,
    pub variance: Vec<FnField>,
}

impl TestSource {
    pub fn components(&self) -> usize {
        self.mean.len()
    }

    pub fn campaign_source(&self) -> CampaignSource {
        match self.model {
            Model::Acoustic => CampaignSource::Scalar(ScalarSourceModel::new(self.mean[0], self.sigma[0])),
            Model::Elastic => CampaignSource::Vector(VectorSourceModel::new(
                self.mean[0],
                self.mean[1],
                self.sigma[0],
                self.sigma[1],
            )),
        }
    }
}

/// Built-in test sources.
///
/// * `acoustic`: `g = e^{-200((x₁-0.01)²+(x₂-0.12)²)} - 100(x₂²-x₁²)e^{-90|x|²}`, `σ = g/2`
/// * `acoustic-zero-mean`: the same `σ` with `g = 0`
/// * `elastic`: `g = (g₁, 1500x₁²x₂e^{-50|x|²})`, `σ = (g₁/2, e^{-200((x₁-0.01)²+(x₂-0.12)²)}/2)`
pub fn registry() -> Vec<TestSource> {
    alloc::vec![
        TestSource {
            name: "acoustic",
            model: Model::Acoustic,
            mean: alloc::vec![G1],
            sigma: alloc::vec![SIGMA1],
            variance: alloc::vec![VARIANCE1],
        },
        TestSource {
            name: "acoustic-zero-mean",
            model: Model::Acoustic,
            mean: alloc::vec![NOTHING],
            sigma: alloc::vec![SIGMA1],
            variance: alloc::vec![VARIANCE1],
        },
        TestSource {
            name: "elastic",
            model: Model::Elastic,
            mean: alloc::vec![G1, G2],
            sigma: alloc::vec![SIGMA1, SIGMA2],
            variance: alloc::vec![VARIANCE1, VARIANCE2],
        },
    ]
}

pub fn find_source(name: &str) -> Option<TestSource> {
    registry().into_iter().find(|s| s.name == name)
}

/// `n × n` uniformly spaced points on the closed square, spacing `a/(n-1)`.
///
/// Point `(i, j)` has coordinates `(x_i, x_j)` and flat index `i * n + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalGrid {
    side: f64,
    points_per_side: usize,
}

impl EvalGrid {
    pub fn new(side: f64, points_per_side: usize) -> Result<Self> {
        if points_per_side < 2 {
            return Err(Error::InvalidParameter { name: "grid", value: points_per_side as f64 });
        }
        if !(side > 0.0) {
            return Err(Error::InvalidParameter { name: "side", value: side });
        }
        Ok(Self { side, points_per_side })
    }

    pub fn standard(side: f64) -> Result<Self> {
        Self::new(side, DEFAULT_GRID_POINTS)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn points_per_side(&self) -> usize {
        self.points_per_side
    }

    pub fn len(&self) -> usize {
        self.points_per_side * self.points_per_side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.side / (self.points_per_side - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -0.5 * self.side + i as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points_per_side).map(|i| self.coordinate(i)).collect()
    }

    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        i * self.points_per_side + j
    }

    pub fn point(&self, idx: usize) -> Point {
        let n = self.points_per_side;
        [self.coordinate(idx / n), self.coordinate(idx % n)]
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Component-interleaved samples: entry `idx * D + k` is component `k` at
/// grid point `idx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
}

impl GridSamples {
    pub fn of_fields(grid: &EvalGrid, fields: &[FnField]) -> Self {
        let mut values = Vec::with_capacity(grid.len() * fields.len());
        let mut gradients = Vec::with_capacity(grid.len() * fields.len());
        for x in grid.points() {
            for f in fields {
                values.push((f.value)(x));
                gradients.push((f.gradient)(x));
            }
        }
        Self { values, gradients }
    }

    pub fn of_evaluation<const D: usize>(eval: &GridEvaluation<D>) -> Self {
        Self {
            values: eval.values.iter().flatten().copied().collect(),
            gradients: eval.gradients.iter().flatten().copied().collect(),
        }
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, found })
    }
}

/// `‖rec − exact‖ / ‖exact‖` over all samples.
pub fn relative_l2(rec: &[f64], exact: &[f64]) -> Result<f64> {
    check_len(exact.len(), rec.len())?;
    let (mut num, mut den) = (0.0, 0.0);
    for (r, e) in rec.iter().zip(exact) {
        num += (r - e) * (r - e);
        den += e * e;
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(num.sqrt() / den.sqrt())
}

/// Discrete H¹ analogue of [`relative_l2`], adding squared gradient
/// differences to both sums.
pub fn relative_h1(rec: &[f64], grad_rec: &[[f64; 2]], exact: &[f64], grad_exact: &[[f64; 2]]) -> Result<f64> {
    check_len(exact.len(), rec.len())?;
    check_len(exact.len(), grad_rec.len())?;
    check_len(exact.len(), grad_exact.len())?;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..exact.len() {
        let (r, e) = (rec[i], exact[i]);
        let (gr, ge) = (grad_rec[i], grad_exact[i]);
        let (d0, d1) = (gr[0] - ge[0], gr[1] - ge[1]);
        num += (r - e) * (r - e) + d0 * d0 + d1 * d1;
        den += e * e + ge[0] * ge[0] + ge[1] * ge[1];
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(num.sqrt() / den.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub rel_l2: f64,
    pub rel_h1: f64,
    pub max_imag_residual: f64,
}

impl ErrorReport {
    pub fn compare(rec: &GridSamples, exact: &GridSamples, max_imag_residual: f64) -> Result<Self> {
        Ok(Self {
            rel_l2: relative_l2(&rec.values, &exact.values)?,
            rel_h1: relative_h1(&rec.values, &rec.gradients, &exact.values, &exact.gradients)?,
            max_imag_residual,
        })
    }
}

/// Score a truncated series against closed-form fields on `grid`.
pub fn score<const D: usize>(coeffs: &CoefficientSet<D>, exact: &[FnField], grid: &EvalGrid) -> Result<ErrorReport> {
    check_len(D, exact.len())?;
    let eval = coeffs.evaluate_grid(grid);
    ErrorReport::compare(&GridSamples::of_evaluation(&eval), &GridSamples::of_fields(grid, exact), eval.max_imag_residual)
}
