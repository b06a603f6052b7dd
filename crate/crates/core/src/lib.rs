//! Wireless-powered full-duplex MIMO relaying: beamformer design, time-split
//! optimization, outage analysis and a Monte Carlo cross-check engine.
//!
//! All quantities are in SI units (watts, meters). Conversion from dBm happens
//! at the CLI boundary.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod beamforming;
pub mod error;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod outage;
pub mod quad;
pub mod rng;
pub mod sdr;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{ChannelRealization, LinkBudget, Scheme, SystemConfig};
pub use rng::RngStream;
