//! Adaptive inspection sampling for low-risk pathways.
//!
//! A pathway is a stream of inspectable items (containers, parcels) with an
//! unknown contamination rate. This crate answers the recurring operational
//! question: how many items must be inspected next period to stay confident
//! the pathway is still low risk, and to notice promptly when it is not?
//!
//! The method keeps a Beta belief over the rate, classifies it on a
//! green/orange/red scale against two thresholds (a tunable change-detection
//! level and a hard risk ceiling), and sizes the next period's sample so
//! that, were the true rate above the ceiling, the pathway would escalate
//! out of green with the target probability, averaged over the prior's
//! tail above the ceiling.
//!
//! # Quick start
//!
//! ```
//! use pathwatch::{
//!     belief::EvidenceWindow, belief::InspectionBatch,
//!     sizing::{min_sample_size, SizingOptions},
//!     status::Thresholds,
//! };
//!
//! // two past quarters: 5000 inspections with 3 detections each
//! let window = EvidenceWindow::new(
//!     vec![
//!         InspectionBatch::new(1, 5000, 3).unwrap(),
//!         InspectionBatch::new(2, 5000, 3).unwrap(),
//!     ],
//!     2,
//! )
//! .unwrap();
//! let thresholds = Thresholds::tuned(&window.belief(), 0.005, 0.95).unwrap();
//! let result = min_sample_size(&window, &thresholds, &SizingOptions::default()).unwrap();
//! assert!((result.n_min as i64 - 756).unsigned_abs() <= 23);
//! ```
//!
//! The `examples/` directory walks through each capability: sizing,
//! classification, method comparison, scenario simulation, and the
//! sensitivity sweeps. The `pathwatch` binary wraps the same library
//! calls for operators working against a persistent state file.

pub mod belief;
pub mod comparators;
pub mod error;
pub mod report;
pub mod simulator;
pub mod sizing;
pub mod status;
pub mod store;

mod quad;
mod search;
mod special;

pub use belief::{BetaParams, EvidenceWindow, InspectionBatch, TailMode};
pub use error::{Error, Result};
pub use sizing::{min_sample_size, SizingOptions, SizingResult};
pub use status::{classify, ColourStatus, Thresholds};
