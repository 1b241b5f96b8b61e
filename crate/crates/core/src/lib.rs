//! Outage analysis of power-splitting SWIPT two-way amplify-and-forward
//! relaying with transceiver hardware impairments over Nakagami-m fading.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod specfun;
pub mod system;

pub use analysis::{Engine, SweepAxis, SweepRow};
pub use analytic::{OutageResult, P4Case, Regime};
pub use channel::{FadingDraw, GammaChannel};
pub use error::{Error, Result};
pub use montecarlo::{McEstimate, T2tLink};
pub use system::{DerivedConstants, Geometry, Protocol, SystemParams, Terminal};
