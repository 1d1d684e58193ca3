//! Extractable qubit-reservoir concurrence for a qubit coupled to a
//! Lorentzian reservoir, with two independent numerical oracles.
//!
//! The kernels are generic over the scalar type ([`scalar::Real`]); the
//! aliases below fix them to `f64`, which is what the sweep engine and the
//! command-line tool use.

// `!(x > 0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod entanglement;
pub mod error;
mod linalg;
pub mod lindblad;
pub mod model;
pub mod multimode;
pub mod ode;
pub mod optimize;
pub mod scalar;
pub mod sideband;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::EigenReal;

pub type Params = model::ModelParams<f64>;
pub type Tau = model::RescaledTime<f64>;
pub type Amplitudes = model::PureAmplitudes<f64>;
pub type Density = model::DensityMatrix3<f64>;
pub type Density4 = entanglement::TwoQubitDensity<f64>;
pub type Optimum = analytic::OptimumRecord<f64>;
pub type Lindblad = lindblad::LindbladConfig<f64>;
pub type Bath = multimode::DiscretizedBath<f64>;
pub type BathState = multimode::MultimodeState<f64>;
pub type Sideband = sideband::SidebandConfig<f64>;
