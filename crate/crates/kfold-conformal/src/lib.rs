//! Distribution-free prediction intervals for regression via split
//! conformal and k-fold cross-validation conformal construction, wrapped
//! around a from-scratch multilayer-perceptron regressor.
//!
//! The crate ships four layers:
//!
//! * numeric foundations: splittable deterministic RNG streams ([`rng`])
//!   and small dense linear algebra ([`linalg`]);
//! * the regressor: an MLP trained with hand-coded backpropagation and
//!   Adam ([`mlp`]);
//! * the interval machinery: residual quantiles, split conformal and
//!   k-fold conformal models ([`conformal`]);
//! * the study harness: synthetic data generation ([`simgen`]), the
//!   coverage/width evaluation loops ([`evalharness`]), CSV and manifest
//!   I/O ([`dataio`]) and table/SVG reporting ([`report`]).
//!
//! Everything stochastic is keyed to derived RNG streams, so a run is a
//! pure function of its configuration and master seed regardless of how
//! many worker threads execute it. The `kfold-conformal` binary (see
//! [`cli`]) exposes the simulation study, the real-data protocol and a
//! fast self-test suite.

pub mod cli;
pub mod conformal;
pub mod dataio;
pub mod evalharness;
pub mod linalg;
pub mod mlp;
pub mod report;
pub mod rng;
pub mod simgen;

pub use conformal::{
    conformal_quantile, kfold_conformal, predict_interval, split_conformal, ConformalModel,
    Dataset, PredictionInterval,
};
pub use rng::{derive_stream, RngStream};
