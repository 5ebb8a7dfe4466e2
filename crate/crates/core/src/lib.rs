#![no_std]

//! Forward simulation and Fourier-coefficient inversion of random sources
//! driven by additive white noise.
//!
//! The crate covers two wave models on the square `Ω = (-a/2, a/2)²`:
//!
//! * scalar acoustic sources `f = g + σẆ` radiating Helmholtz far fields, and
//! * vector elastic sources `F = g + diag(σ₁, σ₂)Ẇ` radiating compressional and
//!   shear far fields of the Navier equation.
//!
//! Monte Carlo campaigns ([`campaign`]) synthesize mean and covariance
//! statistics of the far field at admissible frequency/direction pairs
//! ([`domain`]); the inversion modules turn those statistics into Fourier
//! coefficients of the mean and variance and synthesize truncated series;
//! [`evaluation`] scores reconstructions with discrete relative L²/H¹ errors.
//!
//! Everything here is allocation-only `no_std`. IO, threads and file formats
//! live in the companion `stochsource` crate.

extern crate alloc;

pub mod acoustic;
pub mod campaign;
pub mod domain;
pub mod elastic;
pub mod error;
pub mod evaluation;
pub mod field;
pub mod inversion;
pub mod measurement;
pub mod noise;
pub mod stats;
pub mod transform;

pub use acoustic::{
    add_noise, deterministic_farfield, farfield_constant, farfield_kernel, realize_farfield,
    SampledScalarSource, ScalarSourceModel,
};
pub use campaign::{run_campaign, Campaign, CampaignConfig, CampaignSource, CampaignTally};
pub use domain::{
    acoustic_mean_points, acoustic_variance_points, basis_eval, elastic_mean_points,
    elastic_variance_points, truncation_order, AdmissiblePoint, Domain, FourierIndex, Mode, Point,
};
pub use elastic::{
    elastic_measurement_frequency, projections, realize_elastic_farfields, LameParams,
    SampledVectorSource, VectorSourceModel, Wave,
};
pub use error::{Error, Result};
pub use evaluation::{find_source, registry, relative_h1, relative_l2, score, ErrorReport, EvalGrid, GridSamples, TestSource};
pub use field::{Field, FnField};
pub use inversion::{CoefficientKind, CoefficientSet, GridEvaluation};
pub use measurement::{ChannelStat, MeasurementSet, Measurements, Metadata, Model};
pub use noise::{sample_noise, stochastic_integral, stochastic_integral_matrix, NoiseGrid, QuadratureMesh, SeedSpec};
pub use stats::{CovarianceAccumulator, CovarianceEstimate, MeanAccumulator, MeanEstimate};
pub use transform::PhaseSumPlan;

pub use num_complex::Complex64;
