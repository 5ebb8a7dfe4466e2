//! CSV file formats.
//!
//! Every file starts with `# key=value` header lines. Floating-point data
//! columns use 17 significant digits, which round-trips `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use stochsource_core::domain::lattice_len;
use stochsource_core::measurement::PAIR_LABELS;
use stochsource_core::{
    AdmissiblePoint, ChannelStat, CoefficientKind, CoefficientSet, ErrorReport, EvalGrid, FourierIndex, GridSamples,
    LameParams, MeasurementSet, Measurements, Metadata, Mode, Model,
};

use crate::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Ordered `key=value` header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    /// Run identification required at the top of every output file.
    pub fn provenance(config_hash: &str, meta: &Metadata) -> Self {
        let mut h = Self::new();
        h.push("config_hash", config_hash);
        h.push("seed", meta.seed);
        h.push("realizations", meta.realizations);
        h.push("mesh", meta.mesh);
        h.push("order", meta.order);
        h.push("delta", meta.noise_level);
        h
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn require(&self, path: &Path, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::format(path, format!("header lacks `{key}`")))
    }

    fn parse<T: std::str::FromStr>(&self, path: &Path, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.require(path, key)?.parse().map_err(|e| Error::format(path, format!("header `{key}`: {e}")))
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out
    }

    fn read(path: &Path, text: &str) -> Result<Self> {
        let mut h = Self::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let (k, v) = line[1..]
                .trim_start()
                .split_once('=')
                .ok_or_else(|| Error::format(path, format!("malformed header line `{line}`")))?;
            h.push(k.trim(), v);
        }
        Ok(h)
    }
}

fn write_csv<R: Serialize>(path: &Path, header: &Header, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut buf = header.render().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r).map_err(|e| Error::format(path, e))?;
        }
        w.flush().map_err(Error::io(path))?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    std::fs::write(path, buf).map_err(Error::io(path))
}

fn read_csv<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<(Header, Vec<R>)> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let header = Header::read(path, &text)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<Result<Vec<R>, _>>().map_err(|e| Error::format(path, e))?;
    Ok((header, rows))
}

// ---------------------------------------------------------------- measurements

#[derive(Serialize)]
struct MeasurementRowOut<'a> {
    model: &'a str,
    mode: &'a str,
    l1: i32,
    l2: i32,
    freq: String,
    dir_x: String,
    dir_y: String,
    component: usize,
    stat: &'a str,
    re: String,
    im: String,
    se: String,
}

#[derive(Deserialize)]
struct MeasurementRowIn {
    model: String,
    mode: String,
    l1: i32,
    l2: i32,
    freq: f64,
    dir_x: f64,
    dir_y: f64,
    component: usize,
    stat: String,
    re: f64,
    im: f64,
    se: f64,
}

fn stat_groups(m: &Measurements) -> Vec<(String, Vec<ChannelStat<2>>, usize)> {
    let widen = |v: &[ChannelStat<1>]| -> Vec<ChannelStat<2>> {
        v.iter()
            .map(|c| ChannelStat {
                point: c.point,
                value: [c.value[0], Complex64::new(0.0, 0.0)],
                std_error: [c.std_error[0], 0.0],
                samples: c.samples,
            })
            .collect()
    };
    match m {
        Measurements::Acoustic { mean, covariance } => {
            vec![("E".into(), widen(mean), 1), ("C".into(), widen(covariance), 1)]
        }
        Measurements::Elastic { mean_p, mean_s, covariance, pair_covariance } => {
            let mut out = vec![
                ("E_p".into(), mean_p.clone(), 2),
                ("E_s".into(), mean_s.clone(), 2),
                ("C".into(), covariance.clone(), 2),
            ];
            for (label, chans) in PAIR_LABELS.iter().zip(pair_covariance) {
                out.push((format!("C_{label}"), chans.clone(), 2));
            }
            out
        }
    }
}

fn measurement_header(set: &MeasurementSet, config_hash: &str) -> Header {
    let m = &set.metadata;
    let mut h = Header::provenance(config_hash, m);
    h.push("format", "stochsource-measurements/1")
        .push("model", m.model)
        .push("side", m.side)
        .push("zero_mode_offset", m.zero_mode_offset)
        .push("baseline", m.baseline)
        .push("zero_direction_x", m.zero_direction[0])
        .push("zero_direction_y", m.zero_direction[1])
        .push("source", &m.source)
        .push("block_size", m.block_size);
    if let Some(lame) = m.lame {
        h.push("lame_lambda", lame.lambda()).push("lame_mu", lame.mu());
    }
    h
}

#[derive(Serialize)]
struct Sidecar<'a> {
    format: &'a str,
    config_hash: &'a str,
    model: &'a str,
    side: f64,
    delta: f64,
    realizations: u64,
    seed: u64,
    mesh: usize,
    order: u32,
    zero_mode_offset: f64,
    baseline: f64,
    lame: Option<[f64; 2]>,
    zero_direction: [f64; 2],
    source: &'a str,
    block_size: u64,
    channels: Vec<(String, usize)>,
}

pub fn sidecar_path(csv: &Path) -> std::path::PathBuf {
    csv.with_extension("json")
}

/// Write `set` to `path` plus a JSON metadata sidecar next to it.
pub fn write_measurements(path: &Path, set: &MeasurementSet, config_hash: &str) -> Result<()> {
    let model = set.metadata.model.as_str();
    let groups = stat_groups(&set.measurements);
    let mut rows = Vec::new();
    for (stat, chans, comps) in &groups {
        for c in chans {
            for k in 0..*comps {
                rows.push(MeasurementRowOut {
                    model,
                    mode: c.point.mode.as_str(),
                    l1: c.point.index.l1,
                    l2: c.point.index.l2,
                    freq: fmt_f64(c.point.frequency),
                    dir_x: fmt_f64(c.point.direction[0]),
                    dir_y: fmt_f64(c.point.direction[1]),
                    component: if *comps == 1 { 0 } else { k + 1 },
                    stat,
                    re: fmt_f64(c.value[k].re),
                    im: fmt_f64(c.value[k].im),
                    se: fmt_f64(c.std_error[k]),
                });
            }
        }
    }
    write_csv(path, &measurement_header(set, config_hash), rows)?;

    let m = &set.metadata;
    let sidecar = Sidecar {
        format: "stochsource-measurements/1",
        config_hash,
        model,
        side: m.side,
        delta: m.noise_level,
        realizations: m.realizations,
        seed: m.seed,
        mesh: m.mesh,
        order: m.order,
        zero_mode_offset: m.zero_mode_offset,
        baseline: m.baseline,
        lame: m.lame.map(|l| [l.lambda(), l.mu()]),
        zero_direction: m.zero_direction,
        source: &m.source,
        block_size: m.block_size,
        channels: groups.iter().map(|(s, c, _)| (s.clone(), c.len())).collect(),
    };
    let mut json = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::format(path, e))?;
    json.push('\n');
    let side = sidecar_path(path);
    std::fs::write(&side, json).map_err(Error::io(side))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFile {
    pub header: Header,
    pub set: MeasurementSet,
}

impl MeasurementFile {
    pub fn config_hash(&self) -> Option<&str> {
        self.header.get("config_hash")
    }
}

fn metadata_from_header(path: &Path, h: &Header) -> Result<Metadata> {
    let model: Model = h.parse(path, "model")?;
    let lame = match model {
        Model::Elastic => Some(LameParams::new(h.parse(path, "lame_lambda")?, h.parse(path, "lame_mu")?)?),
        Model::Acoustic => None,
    };
    Ok(Metadata {
        model,
        side: h.parse(path, "side")?,
        noise_level: h.parse(path, "delta")?,
        realizations: h.parse(path, "realizations")?,
        seed: h.parse(path, "seed")?,
        mesh: h.parse(path, "mesh")?,
        order: h.parse(path, "order")?,
        zero_mode_offset: h.parse(path, "zero_mode_offset")?,
        baseline: h.parse(path, "baseline")?,
        lame,
        zero_direction: [h.parse(path, "zero_direction_x")?, h.parse(path, "zero_direction_y")?],
        source: h.require(path, "source")?.to_string(),
        block_size: h.parse(path, "block_size")?,
    })
}

pub fn read_measurements(path: &Path) -> Result<MeasurementFile> {
    let (header, rows) = read_csv::<MeasurementRowIn>(path)?;
    let metadata = metadata_from_header(path, &header)?;
    let model = metadata.model;
    let comps = match model {
        Model::Acoustic => 1,
        Model::Elastic => 2,
    };
    let stats: &[&str] = match model {
        Model::Acoustic => &["E", "C"],
        Model::Elastic => &["E_p", "E_s", "C", "C_pp", "C_ps", "C_sp", "C_ss"],
    };
    let mut groups: Vec<Vec<ChannelStat<2>>> = vec![Vec::new(); stats.len()];
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1;
        let bad = |msg: String| Error::format(path, format!("row {line}: {msg}"));
        if row.model != model.as_str() {
            return Err(bad(format!("model `{}` in a {model} file", row.model)));
        }
        let g = stats.iter().position(|s| *s == row.stat).ok_or_else(|| bad(format!("unknown stat `{}`", row.stat)))?;
        let mode: Mode = row.mode.parse().map_err(|e| bad(format!("{e}")))?;
        let index = FourierIndex::new(row.l1, row.l2);
        let value = Complex64::new(row.re, row.im);
        let slot = match (comps, row.component) {
            (1, 0) | (2, 1) => {
                groups[g].push(ChannelStat {
                    point: AdmissiblePoint { index, frequency: row.freq, direction: [row.dir_x, row.dir_y], mode },
                    value: [Complex64::new(0.0, 0.0); 2],
                    std_error: [0.0; 2],
                    samples: metadata.realizations,
                });
                0
            }
            (2, 2) => 1,
            (_, c) => return Err(bad(format!("component {c} in a {model} file"))),
        };
        let ch = groups[g].last_mut().filter(|c| c.point.index == index).ok_or_else(|| bad("component 2 without component 1".into()))?;
        ch.value[slot] = value;
        ch.std_error[slot] = row.se;
    }
    let narrow = |v: &[ChannelStat<2>]| -> Vec<ChannelStat<1>> {
        v.iter()
            .map(|c| ChannelStat { point: c.point, value: [c.value[0]], std_error: [c.std_error[0]], samples: c.samples })
            .collect()
    };
    let measurements = match model {
        Model::Acoustic => Measurements::Acoustic { mean: narrow(&groups[0]), covariance: narrow(&groups[1]) },
        Model::Elastic => {
            let mut g = groups.into_iter();
            let mut next = || g.next().unwrap();
            Measurements::Elastic {
                mean_p: next(),
                mean_s: next(),
                covariance: next(),
                pair_covariance: [next(), next(), next(), next()],
            }
        }
    };
    Ok(MeasurementFile { header, set: MeasurementSet { metadata, measurements } })
}

// ---------------------------------------------------------------- coefficients

#[derive(Serialize, Deserialize)]
struct CoefficientRow {
    l1: i32,
    l2: i32,
    component: usize,
    re: String,
    im: String,
}

/// Scalar or vector coefficient set read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Scalar(CoefficientSet<1>),
    Vector(CoefficientSet<2>),
}

impl Coefficients {
    pub fn kind(&self) -> CoefficientKind {
        match self {
            Coefficients::Scalar(c) => c.kind(),
            Coefficients::Vector(c) => c.kind(),
        }
    }

    pub fn components(&self) -> usize {
        match self {
            Coefficients::Scalar(_) => 1,
            Coefficients::Vector(_) => 2,
        }
    }
}

pub fn write_coefficients<const D: usize>(path: &Path, coeffs: &CoefficientSet<D>, provenance: &Header) -> Result<()> {
    let mut h = provenance.clone();
    h.push("format", "stochsource-coefficients/1")
        .push("kind", coeffs.kind())
        .push("side", coeffs.side())
        .push("components", D);
    let rows = coeffs.iter().flat_map(|(l, c)| {
        (0..D).map(move |k| CoefficientRow {
            l1: l.l1,
            l2: l.l2,
            component: if D == 1 { 0 } else { k + 1 },
            re: fmt_f64(c[k].re),
            im: fmt_f64(c[k].im),
        })
    });
    write_csv(path, &h, rows)
}

pub fn read_coefficients(path: &Path) -> Result<(Header, Coefficients)> {
    let (header, rows) = read_csv::<CoefficientRow>(path)?;
    let kind: CoefficientKind = header.parse(path, "kind")?;
    let side: f64 = header.parse(path, "side")?;
    let comps: usize = header.parse(path, "components")?;
    let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::format(path, format!("`{s}`: {e}")));
    let mut entries = Vec::with_capacity(rows.len());
    let mut order = 0;
    for r in &rows {
        let l = FourierIndex::new(r.l1, r.l2);
        order = order.max(l.sup_norm());
        entries.push((l, r.component, Complex64::new(parse(&r.re)?, parse(&r.im)?)));
    }
    if order == 0 || rows.len() != comps * lattice_len(order) {
        return Err(Error::format(path, format!("{} rows do not fill an order-{order} lattice", rows.len())));
    }
    fn fill<const D: usize>(
        order: u32,
        kind: CoefficientKind,
        side: f64,
        entries: &[(FourierIndex, usize, Complex64)],
    ) -> Result<CoefficientSet<D>, stochsource_core::Error> {
        let mut set = CoefficientSet::<D>::zeros(order, kind, side);
        for &(l, comp, v) in entries {
            let mut c = *set.get(l).expect("index within order");
            c[comp.saturating_sub(1)] = v;
            set.set(l, c)?;
        }
        Ok(set)
    }
    let coeffs = match comps {
        1 => Coefficients::Scalar(fill::<1>(order, kind, side, &entries)?),
        2 => Coefficients::Vector(fill::<2>(order, kind, side, &entries)?),
        n => return Err(Error::format(path, format!("unsupported component count {n}"))),
    };
    Ok((header, coeffs))
}

// ---------------------------------------------------------------- grid dumps

#[derive(Debug, Clone, PartialEq)]
pub struct GridDump {
    pub header: Header,
    pub kind: CoefficientKind,
    pub grid: EvalGrid,
    pub components: usize,
    pub samples: GridSamples,
    pub max_imag_residual: f64,
}

/// Reconstructed values and gradients on `grid`, one row per point and
/// component in row-major order.
pub fn write_grid(
    path: &Path,
    provenance: &Header,
    kind: CoefficientKind,
    grid: &EvalGrid,
    components: usize,
    samples: &GridSamples,
    max_imag_residual: f64,
) -> Result<()> {
    if samples.values.len() != grid.len() * components || samples.gradients.len() != samples.values.len() {
        return Err(stochsource_core::Error::ShapeMismatch { expected: grid.len() * components, found: samples.values.len() }.into());
    }
    let mut h = provenance.clone();
    h.push("format", "stochsource-grid/1")
        .push("kind", kind)
        .push("side", grid.side())
        .push("points_per_side", grid.points_per_side())
        .push("components", components)
        .push("max_imag_residual", max_imag_residual);
    let mut out = h.render();
    out.push_str(if components == 1 { "x1,x2,value,grad_x1,grad_x2\n" } else { "x1,x2,component,value,grad_x1,grad_x2\n" });
    for (idx, x) in grid.points().enumerate() {
        for k in 0..components {
            let i = idx * components + k;
            let g = samples.gradients[i];
            let (x1, x2) = (fmt_f64(x[0]), fmt_f64(x[1]));
            let (v, g0, g1) = (fmt_f64(samples.values[i]), fmt_f64(g[0]), fmt_f64(g[1]));
            if components == 1 {
                writeln!(out, "{x1},{x2},{v},{g0},{g1}").unwrap();
            } else {
                writeln!(out, "{x1},{x2},{},{v},{g0},{g1}", k + 1).unwrap();
            }
        }
    }
    std::fs::write(path, out).map_err(Error::io(path))
}

pub fn read_grid(path: &Path) -> Result<GridDump> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let header = Header::read(path, &text)?;
    let kind: CoefficientKind = header.parse(path, "kind")?;
    let grid = EvalGrid::new(header.parse(path, "side")?, header.parse(path, "points_per_side")?)?;
    let components: usize = header.parse(path, "components")?;
    let max_imag_residual = header.parse(path, "max_imag_residual")?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let width = if components == 1 { 5 } else { 6 };
    let mut values = Vec::with_capacity(grid.len() * components);
    let mut gradients = Vec::with_capacity(grid.len() * components);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e))?;
        if rec.len() != width {
            return Err(Error::format(path, format!("row {}: expected {width} columns", i + 1)));
        }
        let f = |j: usize| rec[j].parse::<f64>().map_err(|e| Error::format(path, format!("row {}: {e}", i + 1)));
        let off = width - 3;
        values.push(f(off)?);
        gradients.push([f(off + 1)?, f(off + 2)?]);
    }
    if values.len() != grid.len() * components {
        return Err(Error::format(path, format!("expected {} rows, found {}", grid.len() * components, values.len())));
    }
    Ok(GridDump { header, kind, grid, components, samples: GridSamples { values, gradients }, max_imag_residual })
}

// ---------------------------------------------------------------- error tables

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub source: String,
    pub target: String,
    pub rel_l2: f64,
    pub rel_h1: f64,
    pub max_imag_residual: f64,
}

impl ErrorRow {
    pub fn new(source: &str, kind: CoefficientKind, report: &ErrorReport) -> Self {
        Self {
            source: source.to_string(),
            target: kind.as_str().to_string(),
            rel_l2: report.rel_l2,
            rel_h1: report.rel_h1,
            max_imag_residual: report.max_imag_residual,
        }
    }
}

pub fn write_errors(path: &Path, provenance: &Header, rows: &[ErrorRow]) -> Result<()> {
    let mut h = provenance.clone();
    h.push("format", "stochsource-errors/1");
    write_csv(path, &h, rows)
}

pub fn read_errors(path: &Path) -> Result<(Header, Vec<ErrorRow>)> {
    read_csv(path)
}

/// Metrics by noise level; rows are metrics and columns are noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub header: Header,
    pub metrics: Vec<String>,
    pub deltas: Vec<f64>,
    /// `values[column][row]`
    pub values: Vec<Vec<f64>>,
}

impl ErrorTable {
    pub fn render(&self) -> String {
        let mut out = self.header.render();
        out.push_str("metric");
        for d in &self.deltas {
            write!(out, ",delta={d}").unwrap();
        }
        out.push('\n');
        for (i, m) in self.metrics.iter().enumerate() {
            out.push_str(m);
            for col in &self.values {
                write!(out, ",{}", fmt_f64(col[i])).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(Error::io(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        let header = Header::read(path, &text)?;
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let cols = r.headers().map_err(|e| Error::format(path, e))?.clone();
        let deltas = cols
            .iter()
            .skip(1)
            .map(|c| {
                c.strip_prefix("delta=")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::format(path, format!("bad column `{c}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut metrics = Vec::new();
        let mut values = vec![Vec::new(); deltas.len()];
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::format(path, e))?;
            metrics.push(rec[0].to_string());
            for (j, col) in values.iter_mut().enumerate() {
                col.push(rec[j + 1].parse().map_err(|e| Error::format(path, format!("{e}")))?);
            }
        }
        Ok(Self { header, metrics, deltas, values })
    }
}
