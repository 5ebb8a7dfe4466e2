//! Monte Carlo synthesis of far-field statistics.
//!
//! Realizations are grouped into fixed-size blocks. A block is reduced
//! sequentially into a [`CampaignTally`]; tallies are merged in block order.
//! The block size is part of the configuration, so the floating-point
//! reduction tree (and therefore every output bit) does not depend on how
//! many workers process the blocks.
//!
//! Every realization draws one noise grid, evaluates every distinct
//! wavevector with it, and perturbs each resulting datum once. The same
//! perturbation draws serve all requested noise levels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
use rand::Rng;

use crate::acoustic::{add_noise, farfield_constant, wavevector, SampledScalarSource, ScalarSourceModel};
use crate::domain::{
    acoustic_mean_points, acoustic_variance_points, elastic_mean_points, elastic_variance_points,
    AdmissiblePoint, Domain, Point, DEFAULT_ZERO_MODE_OFFSET,
};
use crate::elastic::{apply, projections, CVec2, LameParams, Matrix2, SampledVectorSource, VectorSourceModel};
use crate::error::{Error, Result};
use crate::measurement::{ChannelStat, MeasurementSet, Measurements, Metadata, Model};
use crate::noise::{NoiseGrid, QuadratureMesh, SeedSpec};
use crate::stats::{CovarianceAccumulator, MeanAccumulator};
use crate::transform::{PhaseSumPlan, Workspace};

pub const DEFAULT_BLOCK_SIZE: u64 = 1024;
pub const DEFAULT_MESH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub model: Model,
    pub side: f64,
    /// One measurement set is produced per level.
    pub noise_levels: Vec<f64>,
    pub realizations: u64,
    pub mesh: usize,
    pub order: u32,
    pub zero_mode_offset: f64,
    /// `k₀` (acoustic) or `ω₀` (elastic).
    pub baseline: f64,
    pub lame: LameParams,
    pub zero_direction: Point,
    pub seed: u64,
    pub block_size: u64,
    /// Free-form label copied into the metadata.
    pub source: String,
}

impl CampaignConfig {
    pub fn acoustic(order: u32, realizations: u64, seed: u64) -> Self {
        Self {
            model: Model::Acoustic,
            side: 1.0,
            noise_levels: vec![0.0],
            realizations,
            mesh: DEFAULT_MESH,
            order,
            zero_mode_offset: DEFAULT_ZERO_MODE_OFFSET,
            baseline: 1.0,
            lame: LameParams::default(),
            zero_direction: [1.0, 0.0],
            seed,
            block_size: DEFAULT_BLOCK_SIZE,
            source: String::from("custom"),
        }
    }

    pub fn elastic(order: u32, realizations: u64, seed: u64) -> Self {
        Self { model: Model::Elastic, baseline: 1e-3, ..Self::acoustic(order, realizations, seed) }
    }

    fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidParameter { name: "realizations", value: 0.0 });
        }
        if self.block_size == 0 {
            return Err(Error::InvalidParameter { name: "block_size", value: 0.0 });
        }
        if !(self.baseline > 0.0 && self.baseline.is_finite()) {
            return Err(Error::NonPositiveWavenumber(self.baseline));
        }
        if self.noise_levels.is_empty() {
            return Err(Error::InvalidParameter { name: "delta", value: f64::NAN });
        }
        for &d in &self.noise_levels {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::InvalidNoiseLevel(d));
            }
        }
        Ok(())
    }
}

/// Source models accepted by a campaign.
#[derive(Debug, Clone)]
pub enum CampaignSource {
    Scalar(ScalarSourceModel),
    Vector(VectorSourceModel),
}

#[derive(Debug, Clone, PartialEq)]
enum LevelTally {
    Acoustic {
        mean: Vec<MeanAccumulator<1>>,
        cov: Vec<CovarianceAccumulator<1>>,
    },
    Elastic {
        mean_p: Vec<MeanAccumulator<2>>,
        mean_s: Vec<MeanAccumulator<2>>,
        cov: Vec<CovarianceAccumulator<2>>,
        pairs: [Vec<CovarianceAccumulator<2>>; 4],
    },
}

fn merge_all<T, F: Fn(&mut T, &T)>(a: &mut [T], b: &[T], f: F) {
    for (x, y) in a.iter_mut().zip(b) {
        f(x, y);
    }
}

impl LevelTally {
    fn merge(&mut self, other: &Self) {
        match (self, other) {
            (LevelTally::Acoustic { mean, cov }, LevelTally::Acoustic { mean: m2, cov: c2 }) => {
                merge_all(mean, m2, MeanAccumulator::merge);
                merge_all(cov, c2, CovarianceAccumulator::merge);
            }
            (
                LevelTally::Elastic { mean_p, mean_s, cov, pairs },
                LevelTally::Elastic { mean_p: p2, mean_s: s2, cov: c2, pairs: q2 },
            ) => {
                merge_all(mean_p, p2, MeanAccumulator::merge);
                merge_all(mean_s, s2, MeanAccumulator::merge);
                merge_all(cov, c2, CovarianceAccumulator::merge);
                for (a, b) in pairs.iter_mut().zip(q2) {
                    merge_all(a, b, CovarianceAccumulator::merge);
                }
            }
            _ => unreachable!("tallies of one campaign share a model"),
        }
    }
}

/// Partial reduction over a set of realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignTally {
    realizations: u64,
    levels: Vec<LevelTally>,
}

impl CampaignTally {
    pub fn realizations(&self) -> u64 {
        self.realizations
    }

    /// Fold `other` in after the realizations already held.
    pub fn merge(&mut self, other: &Self) {
        self.realizations += other.realizations;
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            a.merge(b);
        }
    }
}

/// A distinct far-field datum: one wavevector (and, for elastic data,
/// both wave types measured along it).
#[derive(Debug, Clone, Copy)]
struct Datum {
    kappa: Point,
    direction: Point,
    gamma: Complex64,
}

#[derive(Debug, Default)]
struct DatumTable {
    index: BTreeMap<(u64, u64), usize>,
    data: Vec<Datum>,
}

impl DatumTable {
    fn add(&mut self, kappa: Point, k: f64, direction: Point) -> Result<usize> {
        let key = (kappa[0].to_bits(), kappa[1].to_bits());
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let gamma = farfield_constant(k)?;
        self.data.push(Datum { kappa, direction, gamma });
        self.index.insert(key, self.data.len() - 1);
        Ok(self.data.len() - 1)
    }
}

fn mean_wavevector(p: &AdmissiblePoint, domain: &Domain) -> Point {
    if p.index.is_zero() {
        wavevector(p.frequency, p.direction)
    } else {
        p.index.wavevector(domain)
    }
}

#[derive(Debug, Clone)]
enum Sampled {
    Scalar(SampledScalarSource),
    Vector(SampledVectorSource),
}

#[derive(Debug, Clone)]
pub struct Campaign {
    config: CampaignConfig,
    mesh: QuadratureMesh,
    source: Sampled,
    plan: PhaseSumPlan,
    data: Vec<Datum>,
    // elastic: (P_p, P_s) per datum
    projectors: Vec<(Matrix2, Matrix2)>,
    mean_points: Vec<AdmissiblePoint>,
    mean_data: Vec<usize>,
    variance_points: Vec<AdmissiblePoint>,
    variance_data: Vec<(usize, usize)>,
}

struct Scratch {
    noise: NoiseGrid,
    weights: [Vec<f64>; 2],
    workspace: Workspace,
    sums: [Vec<Complex64>; 2],
    draws: Vec<f64>,
    clean: Vec<CVec2>,
    noisy: Vec<CVec2>,
    // elastic normalized p and s parts per datum
    parts: Vec<[CVec2; 2]>,
}

impl Campaign {
    pub fn new(config: CampaignConfig, source: CampaignSource) -> Result<Self> {
        config.validate()?;
        let domain = Domain::new(config.side)?;
        let mesh = QuadratureMesh::new(config.mesh, config.side)?;
        let (mean_points, variance_points) = match config.model {
            Model::Acoustic => (
                acoustic_mean_points(config.order, config.zero_mode_offset, &domain)?,
                acoustic_variance_points(config.order, &domain, config.zero_direction)?,
            ),
            Model::Elastic => (
                elastic_mean_points(config.order, config.zero_mode_offset, &domain)?,
                elastic_variance_points(config.order, &domain, config.zero_direction)?,
            ),
        };
        let source = match (config.model, source) {
            (Model::Acoustic, CampaignSource::Scalar(s)) => Sampled::Scalar(s.sample(&mesh)),
            (Model::Elastic, CampaignSource::Vector(s)) => Sampled::Vector(s.sample(&mesh)),
            (model, _) => {
                return Err(Error::WrongModel(alloc::format!("{model} campaign needs a matching source")));
            }
        };

        let mut table = DatumTable::default();
        let mut mean_data = Vec::with_capacity(mean_points.len());
        for p in &mean_points {
            mean_data.push(table.add(mean_wavevector(p, &domain), p.frequency, p.direction)?);
        }
        let base = config.baseline;
        let mut variance_data = Vec::with_capacity(variance_points.len());
        for p in &variance_points {
            let k_hi = base + p.frequency;
            let hi = table.add(wavevector(k_hi, p.direction), k_hi, p.direction)?;
            let lo = table.add(wavevector(base, p.direction), base, p.direction)?;
            variance_data.push((hi, lo));
        }
        let data = table.data;
        let kappas: Vec<Point> = data.iter().map(|d| d.kappa).collect();
        let plan = PhaseSumPlan::new(&mesh, &kappas)?;
        let projectors = match config.model {
            Model::Elastic => data.iter().map(|d| projections(d.direction)).collect(),
            Model::Acoustic => Vec::new(),
        };
        Ok(Self { config, mesh, source, plan, data, projectors, mean_points, mean_data, variance_points, variance_data })
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.config
    }

    /// Number of distinct far-field data evaluated per realization.
    pub fn datum_count(&self) -> usize {
        self.data.len()
    }

    pub fn block_count(&self) -> u64 {
        self.config.realizations.div_ceil(self.config.block_size)
    }

    pub fn block_range(&self, block: u64) -> Range<u64> {
        let start = block * self.config.block_size;
        start..(start + self.config.block_size).min(self.config.realizations)
    }

    pub fn empty_tally(&self) -> CampaignTally {
        let level = match self.config.model {
            Model::Acoustic => LevelTally::Acoustic {
                mean: vec![MeanAccumulator::new(); self.mean_points.len()],
                cov: vec![CovarianceAccumulator::new(); self.variance_points.len()],
            },
            Model::Elastic => LevelTally::Elastic {
                mean_p: vec![MeanAccumulator::new(); self.mean_points.len()],
                mean_s: vec![MeanAccumulator::new(); self.mean_points.len()],
                cov: vec![CovarianceAccumulator::new(); self.variance_points.len()],
                pairs: core::array::from_fn(|_| vec![CovarianceAccumulator::new(); self.variance_points.len()]),
            },
        };
        CampaignTally { realizations: 0, levels: vec![level; self.config.noise_levels.len()] }
    }

    fn scratch(&self) -> Result<Scratch> {
        let dims = match self.config.model {
            Model::Acoustic => 1,
            Model::Elastic => 2,
        };
        let zero = Complex64::new(0.0, 0.0);
        let n = self.data.len();
        Ok(Scratch {
            noise: NoiseGrid::zeros(self.mesh, dims)?,
            weights: [vec![0.0; self.mesh.len()], vec![0.0; self.mesh.len()]],
            workspace: self.plan.workspace(),
            sums: [vec![zero; n], vec![zero; n]],
            draws: Vec::with_capacity(8 * n),
            clean: vec![[zero; 2]; 2 * n],
            noisy: vec![[zero; 2]; 2 * n],
            parts: vec![[[zero; 2]; 2]; n],
        })
    }

    pub fn run_block(&self, block: u64) -> Result<CampaignTally> {
        self.run_range(self.block_range(block))
    }

    /// Reduce realizations `range` sequentially.
    pub fn run_range(&self, range: Range<u64>) -> Result<CampaignTally> {
        let mut tally = self.empty_tally();
        let mut s = self.scratch()?;
        for r in range {
            self.realize(r, &mut s, &mut tally)?;
        }
        Ok(tally)
    }

    fn realize(&self, r: u64, s: &mut Scratch, tally: &mut CampaignTally) -> Result<()> {
        let seed = SeedSpec::new(self.config.seed, r);
        s.noise.resample(seed);
        // Clean data: slot 2m is the p field (or the scalar field), 2m+1 the s field.
        match &self.source {
            Sampled::Scalar(src) => {
                src.realization_weights(&s.noise, &mut s.weights[0])?;
                self.plan.evaluate(&s.weights[0], &mut s.workspace, &mut s.sums[0])?;
                for (m, d) in self.data.iter().enumerate() {
                    s.clean[2 * m][0] = d.gamma * s.sums[0][m];
                }
            }
            Sampled::Vector(src) => {
                src.realization_weights(&s.noise, &mut s.weights)?;
                for c in 0..2 {
                    self.plan.evaluate(&s.weights[c], &mut s.workspace, &mut s.sums[c])?;
                }
                let (cp2, cs2) = (self.config.lame.c_p() * self.config.lame.c_p(), self.config.lame.c_s() * self.config.lame.c_s());
                for (m, d) in self.data.iter().enumerate() {
                    let integral = [s.sums[0][m], s.sums[1][m]];
                    let (pp, ps) = &self.projectors[m];
                    let up = apply(pp, &integral);
                    let us = apply(ps, &integral);
                    let (fp, fs) = (d.gamma / cp2, d.gamma / cs2);
                    s.clean[2 * m] = [up[0] * fp, up[1] * fp];
                    s.clean[2 * m + 1] = [us[0] * fs, us[1] * fs];
                }
            }
        }

        let per_datum = match self.source {
            Sampled::Scalar(_) => 2,
            Sampled::Vector(_) => 8,
        };
        let mut rng = seed.perturbation_rng();
        s.draws.clear();
        for _ in 0..per_datum * self.data.len() {
            s.draws.push(rng.random_range(-1.0..=1.0));
        }

        tally.realizations += 1;
        for (level, &delta) in tally.levels.iter_mut().zip(&self.config.noise_levels) {
            self.perturb(delta, s);
            match level {
                LevelTally::Acoustic { mean, cov } => {
                    for (acc, &m) in mean.iter_mut().zip(&self.mean_data) {
                        acc.update(&[s.noisy[2 * m][0]]);
                    }
                    for (acc, &(hi, lo)) in cov.iter_mut().zip(&self.variance_data) {
                        acc.update(&[s.noisy[2 * hi][0]], &[s.noisy[2 * lo][0]]);
                    }
                }
                LevelTally::Elastic { mean_p, mean_s, cov, pairs } => {
                    let (cp2, cs2) = (self.config.lame.c_p() * self.config.lame.c_p(), self.config.lame.c_s() * self.config.lame.c_s());
                    for (m, d) in self.data.iter().enumerate() {
                        let (np, ns) = (cp2 / d.gamma, cs2 / d.gamma);
                        let (up, us) = (s.noisy[2 * m], s.noisy[2 * m + 1]);
                        s.parts[m] = [[up[0] * np, up[1] * np], [us[0] * ns, us[1] * ns]];
                    }
                    for (i, &m) in self.mean_data.iter().enumerate() {
                        mean_p[i].update(&s.noisy[2 * m]);
                        mean_s[i].update(&s.noisy[2 * m + 1]);
                    }
                    for (i, &(hi, lo)) in self.variance_data.iter().enumerate() {
                        let (h, l) = (&s.parts[hi], &s.parts[lo]);
                        let combined = |p: &[CVec2; 2]| [p[0][0] + p[1][0], p[0][1] + p[1][1]];
                        cov[i].update(&combined(h), &combined(l));
                        for (slot, (a, b)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                            pairs[slot][i].update(&h[a], &l[b]);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn perturb(&self, delta: f64, s: &mut Scratch) {
        let comps = match self.source {
            Sampled::Scalar(_) => 1,
            Sampled::Vector(_) => 2,
        };
        let used = 2 * self.data.len();
        if delta == 0.0 {
            s.noisy[..used].copy_from_slice(&s.clean[..used]);
            return;
        }
        let mut draws = s.draws.chunks_exact(2);
        for slot in 0..used {
            if comps == 1 && slot % 2 == 1 {
                continue;
            }
            for c in 0..comps {
                let r = draws.next().expect("enough perturbation draws");
                s.noisy[slot][c] = add_noise(s.clean[slot][c], delta, r[0], r[1]);
            }
        }
    }

    /// Turn a complete tally into one measurement set per noise level.
    pub fn finish(&self, tally: &CampaignTally) -> Result<Vec<MeasurementSet>> {
        let cfg = &self.config;
        let mut sets = Vec::with_capacity(cfg.noise_levels.len());
        for (level, &delta) in tally.levels.iter().zip(&cfg.noise_levels) {
            let measurements = match level {
                LevelTally::Acoustic { mean, cov } => Measurements::Acoustic {
                    mean: mean_channels(&self.mean_points, mean)?,
                    covariance: cov_channels(&self.variance_points, cov)?,
                },
                LevelTally::Elastic { mean_p, mean_s, cov, pairs } => Measurements::Elastic {
                    mean_p: mean_channels(&self.mean_points, mean_p)?,
                    mean_s: mean_channels(&self.mean_points, mean_s)?,
                    covariance: cov_channels(&self.variance_points, cov)?,
                    pair_covariance: [
                        cov_channels(&self.variance_points, &pairs[0])?,
                        cov_channels(&self.variance_points, &pairs[1])?,
                        cov_channels(&self.variance_points, &pairs[2])?,
                        cov_channels(&self.variance_points, &pairs[3])?,
                    ],
                },
            };
            sets.push(MeasurementSet {
                metadata: Metadata {
                    model: cfg.model,
                    side: cfg.side,
                    noise_level: delta,
                    realizations: tally.realizations,
                    seed: cfg.seed,
                    mesh: cfg.mesh,
                    order: cfg.order,
                    zero_mode_offset: cfg.zero_mode_offset,
                    baseline: cfg.baseline,
                    lame: (cfg.model == Model::Elastic).then_some(cfg.lame),
                    zero_direction: cfg.zero_direction,
                    source: cfg.source.clone(),
                    block_size: cfg.block_size,
                },
                measurements,
            });
        }
        Ok(sets)
    }
}

fn mean_channels<const D: usize>(
    points: &[AdmissiblePoint],
    accs: &[MeanAccumulator<D>],
) -> Result<Vec<ChannelStat<D>>> {
    points
        .iter()
        .zip(accs)
        .map(|(p, a)| {
            let e = a.finalize()?;
            Ok(ChannelStat { point: *p, value: e.value, std_error: e.std_error, samples: e.count })
        })
        .collect()
}

fn cov_channels<const D: usize>(
    points: &[AdmissiblePoint],
    accs: &[CovarianceAccumulator<D>],
) -> Result<Vec<ChannelStat<D>>> {
    points
        .iter()
        .zip(accs)
        .map(|(p, a)| {
            let e = a.finalize()?;
            Ok(ChannelStat { point: *p, value: e.value, std_error: e.std_error, samples: e.count })
        })
        .collect()
}

/// Serial campaign: blocks reduced and merged in order.
pub fn run_campaign(config: CampaignConfig, source: CampaignSource) -> Result<Vec<MeasurementSet>> {
    let campaign = Campaign::new(config, source)?;
    let mut total = campaign.empty_tally();
    for b in 0..campaign.block_count() {
        total.merge(&campaign.run_block(b)?);
    }
    campaign.finish(&total)
}
