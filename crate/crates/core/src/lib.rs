//! Gossip-based publish-subscribe dissemination over unstructured overlays.
//!
//! The crate has two halves that are meant to be compared against each other:
//!
//! * a generating-function coverage model ([`analytic`]) that predicts the
//!   mean number of nodes reached by an event from the overlay's degree
//!   distribution ([`degree_dist`]), the subscription probability `sigma` and
//!   the gossip probability `gamma`;
//! * a discrete-event simulator ([`sim`]) of the subscription and
//!   dissemination protocols running on configuration-model overlays
//!   ([`overlay`]).
//!
//! [`harness`] drives parameter sweeps over both and writes CSV reports.

pub mod analytic;
pub mod degree_dist;
pub mod error;
pub mod harness;
pub mod overlay;
pub mod rng;
pub mod sim;

pub use analytic::{CoverageParams, CoveragePrediction, MeanCount};
pub use degree_dist::{DegreeDistribution, DistributionKind, Moments};
pub use error::{Error, Result};
pub use overlay::OverlayGraph;
pub use sim::{DisseminationResult, Ttl};
