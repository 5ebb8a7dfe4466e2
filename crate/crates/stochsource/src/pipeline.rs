//! End-to-end commands: forward simulation, inversion, evaluation and table
//! reproduction.

use std::path::{Path, PathBuf};

use stochsource_core::inversion::{invert_acoustic_mean, invert_acoustic_variance, invert_elastic_mean, invert_elastic_variance};
use stochsource_core::{
    find_source, Campaign, CoefficientKind, CoefficientSet, ErrorReport, EvalGrid, GridSamples, MeasurementSet, Model,
    TestSource,
};

use crate::config::{ExperimentConfig, ModelName};
use crate::formats::{self, Coefficients, ErrorRow, ErrorTable, Header};
use crate::{runner, Error, Result};

pub const MEASUREMENTS_FILE: &str = "measurements.csv";

/// Noise levels of the published tables.
pub const TABLE_DELTAS: [f64; 4] = [0.005, 0.01, 0.05, 0.1];

pub const TABLE_METRICS: [&str; 4] = ["mean_l2", "mean_h1", "variance_l2", "variance_h1"];

/// Campaign for `config` at each of `deltas`, run on `config.workers` threads.
pub fn simulate(config: &ExperimentConfig, deltas: &[f64]) -> Result<Vec<MeasurementSet>> {
    let (cfg, source) = config.campaign(deltas)?;
    let campaign = Campaign::new(cfg, source)?;
    runner::run(&campaign, config.workers)
}

/// Simulate and write `<output>/measurements.csv` (plus its JSON sidecar).
pub fn forward(config: &ExperimentConfig) -> Result<PathBuf> {
    let set = simulate(config, &[config.delta])?.remove(0);
    let path = config.output.join(MEASUREMENTS_FILE);
    formats::write_measurements(&path, &set, &config.hash())?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub mean: Coefficients,
    pub variance: Coefficients,
}

impl Inversion {
    pub fn of(set: &MeasurementSet, order: Option<u32>) -> Result<Self> {
        Ok(match set.metadata.model {
            Model::Acoustic => Self {
                mean: Coefficients::Scalar(invert_acoustic_mean(set, order)?),
                variance: Coefficients::Scalar(invert_acoustic_variance(set, order)?),
            },
            Model::Elastic => Self {
                mean: Coefficients::Vector(invert_elastic_mean(set, order)?),
                variance: Coefficients::Vector(invert_elastic_variance(set, order)?),
            },
        })
    }

    pub fn parts(&self) -> [(&Coefficients, CoefficientKind); 2] {
        [(&self.mean, CoefficientKind::Mean), (&self.variance, CoefficientKind::Variance)]
    }
}

/// Grid samples of a coefficient set plus its largest discarded imaginary part.
pub fn sample_grid(coeffs: &Coefficients, grid: &EvalGrid) -> (GridSamples, f64) {
    fn go<const D: usize>(c: &CoefficientSet<D>, grid: &EvalGrid) -> (GridSamples, f64) {
        let eval = c.evaluate_grid(grid);
        (GridSamples::of_evaluation(&eval), eval.max_imag_residual)
    }
    match coeffs {
        Coefficients::Scalar(c) => go(c, grid),
        Coefficients::Vector(c) => go(c, grid),
    }
}

pub fn score(coeffs: &Coefficients, kind: CoefficientKind, source: &TestSource, grid: &EvalGrid) -> Result<ErrorReport> {
    let fields = match kind {
        CoefficientKind::Mean => &source.mean,
        CoefficientKind::Variance => &source.variance,
    };
    Ok(match coeffs {
        Coefficients::Scalar(c) => stochsource_core::score(c, fields, grid)?,
        Coefficients::Vector(c) => stochsource_core::score(c, fields, grid)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertOutput {
    pub coefficients: [PathBuf; 2],
    pub grids: [PathBuf; 2],
}

/// Invert a measurement file and write coefficient sets and grid dumps of
/// the reconstructed mean and variance into `out_dir`.
pub fn invert(measurements: &Path, out_dir: &Path, order: Option<u32>, grid_points: usize) -> Result<InvertOutput> {
    let file = formats::read_measurements(measurements)?;
    let set = &file.set;
    let inversion = Inversion::of(set, order)?;
    let grid = EvalGrid::new(set.metadata.side, grid_points)?;
    let mut meta = set.metadata.clone();
    meta.order = order.unwrap_or(meta.order);
    let mut provenance = Header::provenance(file.config_hash().unwrap_or("unknown"), &meta);
    provenance.push("model", meta.model).push("source", &meta.source);
    std::fs::create_dir_all(out_dir).map_err(Error::io(out_dir))?;

    let mut coefficients = Vec::new();
    let mut grids = Vec::new();
    for (coeffs, kind) in inversion.parts() {
        let cpath = out_dir.join(format!("{kind}_coefficients.csv"));
        match coeffs {
            Coefficients::Scalar(c) => formats::write_coefficients(&cpath, c, &provenance)?,
            Coefficients::Vector(c) => formats::write_coefficients(&cpath, c, &provenance)?,
        }
        let gpath = out_dir.join(format!("{kind}_grid.csv"));
        let (samples, residual) = sample_grid(coeffs, &grid);
        formats::write_grid(&gpath, &provenance, kind, &grid, coeffs.components(), &samples, residual)?;
        coefficients.push(cpath);
        grids.push(gpath);
    }
    Ok(InvertOutput {
        coefficients: coefficients.try_into().expect("two parts"),
        grids: grids.try_into().expect("two parts"),
    })
}

const PROVENANCE_KEYS: [&str; 6] = ["config_hash", "seed", "realizations", "mesh", "order", "delta"];

/// Compare a grid dump with the named registry source (default: the source
/// recorded in the dump) and write a one-row error table to `out`.
pub fn evaluate(grid_dump: &Path, source: Option<&str>, out: &Path) -> Result<ErrorRow> {
    let dump = formats::read_grid(grid_dump)?;
    let name = source
        .or(dump.header.get("source"))
        .ok_or_else(|| Error::Config("no source named and none recorded in the grid dump".into()))?;
    let src = find_source(name).ok_or_else(|| Error::Config(format!("unknown source `{name}`")))?;
    if src.components() != dump.components {
        return Err(Error::Config(format!(
            "source `{name}` has {} components, the grid dump has {}",
            src.components(),
            dump.components
        )));
    }
    let fields = match dump.kind {
        CoefficientKind::Mean => &src.mean,
        CoefficientKind::Variance => &src.variance,
    };
    let exact = GridSamples::of_fields(&dump.grid, fields);
    let report = ErrorReport::compare(&dump.samples, &exact, dump.max_imag_residual)?;
    let row = ErrorRow::new(name, dump.kind, &report);
    let mut provenance = Header::new();
    for key in PROVENANCE_KEYS {
        provenance.push(key, dump.header.get(key).unwrap_or("unknown"));
    }
    formats::write_errors(out, &provenance, std::slice::from_ref(&row))?;
    Ok(row)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// 10⁵ realizations.
    Desk,
    /// 10⁶ realizations.
    Paper,
}

impl Scale {
    pub fn realizations(self) -> u64 {
        match self {
            Scale::Desk => 100_000,
            Scale::Paper => 1_000_000,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Paper => "paper",
        }
    }
}

/// Reproduce one of the error tables: table 1 uses the acoustic source,
/// table 2 the elastic one.
///
/// `base` supplies seed, workers, mesh, block size and output directory;
/// its model, source, noise level and order are replaced per column, and its
/// realization count is replaced by the scale unless `realizations` is given.
/// The table file is rewritten after every column, so finished columns
/// survive a later failure.
pub fn reproduce(table: u8, scale: Scale, base: &ExperimentConfig, realizations: Option<u64>) -> Result<(PathBuf, ErrorTable)> {
    let model = match table {
        1 => ModelName::Acoustic,
        2 => ModelName::Elastic,
        t => return Err(Error::Config(format!("no table {t}; expected 1 or 2"))),
    };
    let r = realizations.unwrap_or(scale.realizations());
    let mut cfg = ExperimentConfig { model, source: None, order: None, realizations: r, ..base.clone() };
    let orders = TABLE_DELTAS
        .iter()
        .map(|&d| Ok(ExperimentConfig { delta: d, ..cfg.clone() }.resolved_order()?.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let deltas = TABLE_DELTAS.map(|d| d.to_string());

    let mut header = Header::new();
    header
        .push("config_hash", ExperimentConfig { delta: 0.0, ..cfg.clone() }.hash())
        .push("seed", cfg.seed)
        .push("realizations", r)
        .push("mesh", cfg.mesh)
        .push("order", orders.join(";"))
        .push("delta", deltas.join(";"))
        .push("format", "stochsource-table/1")
        .push("table", table)
        .push("scale", scale.as_str())
        .push("model", Model::from(model));
    let mut out = ErrorTable { header, metrics: TABLE_METRICS.map(String::from).to_vec(), deltas: Vec::new(), values: Vec::new() };
    std::fs::create_dir_all(&cfg.output).map_err(Error::io(&cfg.output))?;
    let path = cfg.output.join(format!("table{table}.csv"));
    let source = cfg.test_source()?;

    for &delta in &TABLE_DELTAS {
        cfg.delta = delta;
        let set = simulate(&cfg, &[delta])?.remove(0);
        let inversion = Inversion::of(&set, None)?;
        let grid = EvalGrid::standard(cfg.side)?;
        let mut column = Vec::with_capacity(4);
        for (coeffs, kind) in inversion.parts() {
            let report = score(coeffs, kind, &source, &grid)?;
            column.extend([report.rel_l2, report.rel_h1]);
        }
        out.deltas.push(delta);
        out.values.push(column);
        out.write(&path)?;
    }
    Ok((path, out))
}
