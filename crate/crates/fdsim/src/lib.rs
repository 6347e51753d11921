//! System-level simulator for two-tier cellular networks in which the pico
//! tier can operate in full-duplex (FD) mode: every pico base station may
//! transmit downlink and receive uplink on the same band at the same time,
//! at the cost of residual self-interference and UE-to-UE cross interference.
//!
//! The crate is organised along the simulation pipeline:
//!
//! * [`topology`]: hexagonal macro layout, pico/UE drops, cell association.
//! * [`channel`]: per-link-class pathloss, log-normal shadowing, the cached
//!   gain matrix, receiver noise and the self-interference model.
//! * [`sumrate`]: the two-node UL+DL sum-rate objective, binary power
//!   control and its exhaustive-search oracle.
//! * [`scheduling`]: proportional-fair state and the five scheduler
//!   variants (HD baseline, FD, and FD with power control and UE pairing).
//! * [`engine`]: per-TTI simulation loop, SINR/interference accounting,
//!   throughput, energy and the drop/campaign drivers.
//! * [`experiment`]: pre-packaged studies (scheduler comparison, SIC sweep,
//!   pico-density sweep, single-cell study, power-map study) plus CSV/JSON
//!   reporting.
//!
//! Every run is reproducible bit-exactly from its configuration and seed;
//! see [`rng`] for the seed-derivation scheme.

pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod rng;
pub mod scheduling;
pub mod sumrate;
pub mod topology;

pub use config::SimConfig;
pub use error::{Error, Result};
