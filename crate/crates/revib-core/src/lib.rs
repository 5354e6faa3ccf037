//! Vibration-decomposed trajectory forecasting.
//!
//! Trajectories are predicted as the superposition of three terms: a
//! least-squares linear base, a sampled self-sourced vibration bias, and a
//! sampled social-sourced (resonance) vibration bias. The crate contains
//! the numeric core (tensors, reverse-mode differentiation, Transformer
//! blocks), the trajectory transforms, data loading and synthetic scene
//! generation, the forecasting model with its best-of-K training loop,
//! displacement-error metrics, and the analysis/diagnostics suite.

pub mod adam;
pub mod config;
pub mod dataio;
pub mod diagnostics;
pub mod error;
pub mod interp;
pub mod linear_base;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod params;
pub mod resonance;
pub mod rng;
pub mod self_vibration;
pub mod spectrum;
pub mod tape;
pub mod tensor;

pub use config::RunConfig;
pub use dataio::{DatasetConfig, Sample, Scene};
pub use error::{Error, Result};
pub use metrics::MetricReport;
pub use model::{BiasSet, Model, TrainConfig};
pub use nn::TransformerConfig;
pub use params::ParamStore;
pub use spectrum::{TrajectorySpectrum, TransformKind};
pub use tape::{Tape, Var};
pub use tensor::Tensor;
