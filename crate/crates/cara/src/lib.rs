//! Stability analysis and simulation of channel-aware slotted random access.
//!
//! Two bursty sources share a common receiver over independently fading
//! two-state channels. Each node only sees a noisy estimate of its own
//! channel and transmits with some probability when the estimate is good and
//! its queue is backlogged; the receiver may decode simultaneous
//! transmissions with state-dependent probabilities. This crate provides
//!
//! - exact closed forms for the stability region of that protocol at fixed
//!   transmit probabilities and for its closure over all of them
//!   ([`analysis`]),
//! - the no-CSI baseline region and the centralized
//!   longest-connected-queue scheduler region, with subset tests between
//!   them,
//! - a slotted-time Monte-Carlo simulator with counter-based random streams
//!   that reproduces every closed form and supports exact sample-path
//!   coupling for dominance checks ([`sim`]),
//! - a batch front-end for region export, simulation sweeps and
//!   analysis-vs-simulation comparisons ([`cli`], `cara` binary).
//!
//! Start with the runnable examples (`cargo run --example
//! stability_regions`), or dive into [`analysis::closure_boundary`] and
//! [`sim::run`].

pub mod analysis;
pub mod cli;
pub mod model;
pub mod presets;
pub mod sim;

pub use model::{
    ArrivalRates, LcqNodeParams, LcqSystemParams, NodeChannelParams, ReceptionProbs2,
    SystemParams, TransmitProbs, ValidationOptions, ValidationReport,
};
