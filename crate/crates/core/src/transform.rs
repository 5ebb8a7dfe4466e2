//! Batched evaluation of `S(κ) = Σ_j w_j exp(-i κ·y_j)` over the midpoint
//! mesh for many wavevectors `κ` and real weights `w`.
//!
//! The mesh is a tensor grid, so the sum factorizes into a pass over the
//! second axis (one column per distinct `κ₂`) followed by a short dot
//! product over the first axis. Wavevectors are folded onto the half plane
//! `κ₂ > 0 ∨ (κ₂ = 0 ∧ κ₁ ≥ 0)` using `S(-κ) = conj S(κ)`, and exact
//! duplicates are shared.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::noise::QuadratureMesh;

#[derive(Debug, Clone, Copy)]
struct Lookup {
    pair: usize,
    conj: bool,
}

#[derive(Debug, Clone)]
pub struct PhaseSumPlan {
    mesh: QuadratureMesh,
    // first-axis phases, [u][j1]
    first: Vec<Complex64>,
    // second-axis phases split into re/im, [j2][q]
    second_re: Vec<f64>,
    second_im: Vec<f64>,
    columns: usize,
    pairs: Vec<(usize, usize)>,
    lookups: Vec<Lookup>,
}

/// Scratch space for [`PhaseSumPlan::evaluate`].
#[derive(Debug, Clone)]
pub struct Workspace {
    re: Vec<f64>,
    im: Vec<f64>,
    pairs: Vec<Complex64>,
}

fn canonical(k: Point) -> (Point, bool) {
    let flip = k[1] < 0.0 || (k[1] == 0.0 && k[0] < 0.0);
    let mut c = if flip { [-k[0], -k[1]] } else { k };
    // -0.0 and 0.0 must share a table entry
    for v in &mut c {
        if *v == 0.0 {
            *v = 0.0;
        }
    }
    (c, flip)
}

fn intern(table: &mut BTreeMap<u64, usize>, values: &mut Vec<f64>, v: f64) -> usize {
    *table.entry(v.to_bits()).or_insert_with(|| {
        values.push(v);
        values.len() - 1
    })
}

impl PhaseSumPlan {
    pub fn new(mesh: &QuadratureMesh, wavevectors: &[Point]) -> Result<Self> {
        let (mut k1_table, mut k2_table, mut pair_table) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
        let (mut k1s, mut k2s) = (Vec::new(), Vec::new());
        let mut pairs = Vec::new();
        let mut lookups = Vec::with_capacity(wavevectors.len());
        for &k in wavevectors {
            if !(k[0].is_finite() && k[1].is_finite()) {
                return Err(Error::InvalidParameter { name: "wavevector", value: k[0] + k[1] });
            }
            let (c, conj) = canonical(k);
            let u = intern(&mut k1_table, &mut k1s, c[0]);
            let q = intern(&mut k2_table, &mut k2s, c[1]);
            let pair = *pair_table.entry((u, q)).or_insert_with(|| {
                pairs.push((u, q));
                pairs.len() - 1
            });
            lookups.push(Lookup { pair, conj });
        }

        let coords = mesh.coordinates();
        let m = coords.len();
        let columns = k2s.len();
        let first = k1s
            .iter()
            .flat_map(|&k| coords.iter().map(move |&y| Complex64::cis(-k * y)))
            .collect();
        let mut second_re = vec![0.0; m * columns];
        let mut second_im = vec![0.0; m * columns];
        for (j, &y) in coords.iter().enumerate() {
            for (q, &k) in k2s.iter().enumerate() {
                let z = Complex64::cis(-k * y);
                second_re[j * columns + q] = z.re;
                second_im[j * columns + q] = z.im;
            }
        }
        Ok(Self { mesh: *mesh, first, second_re, second_im, columns, pairs, lookups })
    }

    pub fn mesh(&self) -> &QuadratureMesh {
        &self.mesh
    }

    /// Number of requested wavevectors.
    pub fn len(&self) -> usize {
        self.lookups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookups.is_empty()
    }

    /// Number of distinct sums actually computed.
    pub fn unique_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn workspace(&self) -> Workspace {
        let m = self.mesh.cells_per_side();
        Workspace {
            re: vec![0.0; m * self.columns],
            im: vec![0.0; m * self.columns],
            pairs: vec![Complex64::new(0.0, 0.0); self.pairs.len()],
        }
    }

    /// Fill `out[p] = Σ_j weights[j] exp(-i κ_p·y_j)` for every planned `κ_p`.
    pub fn evaluate(&self, weights: &[f64], ws: &mut Workspace, out: &mut [Complex64]) -> Result<()> {
        let m = self.mesh.cells_per_side();
        if weights.len() != m * m {
            return Err(Error::ShapeMismatch { expected: m * m, found: weights.len() });
        }
        if out.len() != self.lookups.len() {
            return Err(Error::ShapeMismatch { expected: self.lookups.len(), found: out.len() });
        }
        let q = self.columns;
        ws.re.fill(0.0);
        ws.im.fill(0.0);
        for j1 in 0..m {
            let row = &weights[j1 * m..(j1 + 1) * m];
            let t_re = &mut ws.re[j1 * q..(j1 + 1) * q];
            let t_im = &mut ws.im[j1 * q..(j1 + 1) * q];
            for (j2, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let b_re = &self.second_re[j2 * q..(j2 + 1) * q];
                let b_im = &self.second_im[j2 * q..(j2 + 1) * q];
                for ((tr, ti), (br, bi)) in t_re.iter_mut().zip(t_im.iter_mut()).zip(b_re.iter().zip(b_im)) {
                    *tr += w * br;
                    *ti += w * bi;
                }
            }
        }
        for (slot, &(u, col)) in ws.pairs.iter_mut().zip(&self.pairs) {
            let a = &self.first[u * m..(u + 1) * m];
            let mut s = Complex64::new(0.0, 0.0);
            for (j1, phase) in a.iter().enumerate() {
                s += phase * Complex64::new(ws.re[j1 * q + col], ws.im[j1 * q + col]);
            }
            *slot = s;
        }
        for (o, l) in out.iter_mut().zip(&self.lookups) {
            let s = ws.pairs[l.pair];
            *o = if l.conj { s.conj() } else { s };
        }
        Ok(())
    }

    /// Convenience wrapper allocating its own workspace and output.
    pub fn evaluate_vec(&self, weights: &[f64]) -> Result<Vec<Complex64>> {
        let mut ws = self.workspace();
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.evaluate(weights, &mut ws, &mut out)?;
        Ok(out)
    }
}

/// Single wavevector evaluation through a one-element plan.
///
/// Produces the same bits as the corresponding entry of any larger plan.
pub fn phase_sum(mesh: &QuadratureMesh, weights: &[f64], wavevector: Point) -> Result<Complex64> {
    let plan = PhaseSumPlan::new(mesh, &[wavevector])?;
    Ok(plan.evaluate_vec(weights)?[0])
}

/// Plain double loop, used as a reference.
pub fn phase_sum_direct(mesh: &QuadratureMesh, weights: &[f64], wavevector: Point) -> Complex64 {
    mesh.centers()
        .zip(weights)
        .map(|(y, &w)| Complex64::cis(-(wavevector[0] * y[0] + wavevector[1] * y[1])) * w)
        .sum()
}
