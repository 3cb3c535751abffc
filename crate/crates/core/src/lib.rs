//! Symbol-level simulator for the two-user symmetric Gaussian interference
//! channel with a cooperative-jamming helper.
//!
//! The crate covers the whole pipeline at finite SNR: PAM constellations,
//! the power-of-two channel model, the α-regime transmit design with
//! jamming alignment, the successive and joint receivers, minimum-distance
//! and outage-measure analysis, and GDoF/leakage accounting. The `harness`
//! module drives sweeps and renders CSV/JSON results.

pub mod analysis;
pub mod channel;
pub mod constellation;
pub mod decoder;
pub mod diophantine;
pub mod error;
pub mod harness;
pub mod ratio;
pub mod rng;
pub mod scheme;

pub use analysis::{empirical_gdof, gdof_theorem, GdofPoint};
pub use channel::{ChannelGains, RxObservation, Rx, StrengthConfig, Tx};
pub use constellation::{make_pam, PamSet, PamSymbol, SumSet};
pub use decoder::{decode, DecodeOutcome, GainSource};
pub use diophantine::{LinearFormSpec, OutageReport};
pub use error::{Error, Result};
pub use harness::{Command, RunConfig};
pub use scheme::{params_for, Design, Regime, RegimeParams, TxBundle};
