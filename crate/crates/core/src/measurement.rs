//! Far-field statistics at admissible points, as produced by a campaign or
//! loaded from disk.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::domain::{AdmissiblePoint, FourierIndex, Point};
use crate::elastic::LameParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Acoustic,
    Elastic,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Acoustic => "acoustic",
            Model::Elastic => "elastic",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "acoustic" => Ok(Model::Acoustic),
            "elastic" => Ok(Model::Elastic),
            other => Err(Error::WrongModel(other.to_string())),
        }
    }
}

/// One estimated statistic at one admissible point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStat<const D: usize> {
    pub point: AdmissiblePoint,
    pub value: [Complex64; D],
    pub std_error: [f64; D],
    pub samples: u64,
}

/// Index of each four-channel diagnostic in
/// [`Measurements::Elastic::pair_covariance`].
pub const PAIR_LABELS: [&str; 4] = ["pp", "ps", "sp", "ss"];

#[derive(Debug, Clone, PartialEq)]
pub enum Measurements {
    Acoustic {
        /// `E[u∞(x̂_l; k_l)]`
        mean: Vec<ChannelStat<1>>,
        /// `C[u∞(x̂_l; k₀ + τ_l), u∞(x̂_l; k₀)]`
        covariance: Vec<ChannelStat<1>>,
    },
    Elastic {
        /// `E[u_p∞(x̂_l; c_p ω_l)]`
        mean_p: Vec<ChannelStat<2>>,
        /// `E[u_s∞(x̂_l; c_s ω_l)]`
        mean_s: Vec<ChannelStat<2>>,
        /// `C[U(x̂_l; ω₀ + τ_l), U(x̂_l; ω₀)]` of the combined normalized field
        covariance: Vec<ChannelStat<2>>,
        /// `C[U_α(ω₀ + τ_l), U_β(ω₀)]` for `αβ` in `pp, ps, sp, ss`
        pair_covariance: [Vec<ChannelStat<2>>; 4],
    },
}

impl Measurements {
    pub fn model(&self) -> Model {
        match self {
            Measurements::Acoustic { .. } => Model::Acoustic,
            Measurements::Elastic { .. } => Model::Elastic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub model: Model,
    pub side: f64,
    pub noise_level: f64,
    pub realizations: u64,
    pub seed: u64,
    pub mesh: usize,
    pub order: u32,
    /// `lambda0` (acoustic) or `xi0` (elastic).
    pub zero_mode_offset: f64,
    /// `k₀` (acoustic) or `ω₀` (elastic).
    pub baseline: f64,
    pub lame: Option<LameParams>,
    pub zero_direction: Point,
    pub source: String,
    pub block_size: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub metadata: Metadata,
    pub measurements: Measurements,
}

/// Look up channels for every `|l|_∞ <= order`, reporting all absent indices.
pub(crate) fn gather<'a, const D: usize>(
    channels: &'a [ChannelStat<D>],
    order: u32,
) -> Result<Vec<&'a ChannelStat<D>>> {
    let mut slots: Vec<Option<&ChannelStat<D>>> = alloc::vec![None; crate::domain::lattice_len(order)];
    for ch in channels {
        if let Some(pos) = crate::domain::lattice_position(ch.point.index, order) {
            slots[pos] = Some(ch);
        }
    }
    let missing: Vec<FourierIndex> = crate::domain::lattice(order)
        .zip(&slots)
        .filter(|(_, s)| s.is_none())
        .map(|(l, _)| l)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingChannels(missing));
    }
    Ok(slots.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Mode;

    fn stat(l: FourierIndex) -> ChannelStat<1> {
        ChannelStat {
            point: AdmissiblePoint { index: l, frequency: 1.0, direction: [1.0, 0.0], mode: Mode::AcousticMean },
            value: [Complex64::new(0.0, 0.0)],
            std_error: [0.0],
            samples: 1,
        }
    }

    #[test]
    fn gather_lists_missing_indices() {
        let all: Vec<_> = crate::domain::lattice(1).map(stat).collect();
        assert_eq!(gather(&all, 1).unwrap().len(), 9);
        let partial: Vec<_> = all.iter().copied().filter(|c| c.point.index != FourierIndex::new(0, 1)).collect();
        match gather(&partial, 1) {
            Err(Error::MissingChannels(m)) => assert_eq!(m, [FourierIndex::new(0, 1)]),
            other => panic!("{other:?}"),
        }
        let msg = gather(&partial[..3], 1).unwrap_err().to_string();
        assert!(msg.contains("(0, 1)") && msg.contains("(1, -1)"));
    }

    #[test]
    fn model_names_round_trip() {
        for m in [Model::Acoustic, Model::Elastic] {
            assert_eq!(m.as_str().parse::<Model>().unwrap(), m);
        }
        assert!("optical".parse::<Model>().is_err());
    }
}
