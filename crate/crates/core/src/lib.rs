//! Storage-fleet reliability toolkit.
//!
//! Reconstructs SSD/HDD lifecycles from daily telemetry, computes the fleet
//! characterization statistics (censored lifetime CDFs, failure-rate curves,
//! rank correlations, pre-failure error incidence) and trains/evaluates
//! interpretable failure predictors with lookahead labeling, drive-grouped
//! cross-validation and attribute-based partitioning.
//!
//! Module map:
//!
//! - [`ingest`]: Backblaze-style HDD CSV and canonical SSD CSV parsing.
//! - [`lifecycle`]: failure/swap/repair timelines with explicit censoring.
//! - [`charstats`]: correlations, failure-rate curves, wear and error statistics.
//! - [`featurize`]: feature rows, lookahead labels and dataset partitioning.
//! - [`learners`]: CART tree, random forest, logistic regression.
//! - [`eval`]: undersampling, grouped k-fold CV, ROC/AUROC and the experiment drivers.
//! - [`synthgen`]: seeded synthetic fleets with planted effects.

pub mod charstats;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod ingest;
pub mod learners;
pub mod lifecycle;
pub mod seed;
pub mod stats;
pub mod synthgen;

pub use error::{Error, Result};
pub use ingest::{DriveId, Family, FleetDataset};
