//! Temporal spectrum analysis for ground-space visibility networks.
//!
//! This crate models the line-of-sight contact structure between ground
//! station networks and satellite constellations as binary pulse trains
//! ("temporal spectra") and exposes three layers of analysis on top:
//!
//! * [`catalog`] and [`propagator`]: TLE parsing, SGP4 propagation, and the
//!   Earth-frame geometry that turns orbital state into elevation angles.
//! * [`visibility`]: access window extraction over a common analysis span,
//!   sampling of windows into binary spectra, and the quantized bookkeeping
//!   shared by the higher layers.
//! * [`spectra`] and [`interaction`]: intra-constellation structure through
//!   the spectrum-strength matrix `H` and its Gram matrix `J = H Hᵀ`, and
//!   inter-constellation structure through pulse statistics, hourly pulse
//!   count distributions, and the interaction matrix `P` with its complex
//!   eigen decomposition.
//!
//! [`pipeline`] wires a parsed [`catalog::Scenario`] to the analysis layers
//! and is the entry point used by the command line tool.

pub mod catalog;
pub mod error;
pub mod interaction;
pub mod linalg;
pub mod pipeline;
pub mod propagator;
pub mod spectra;
pub mod time;
pub mod visibility;

pub use error::{Error, Result};
