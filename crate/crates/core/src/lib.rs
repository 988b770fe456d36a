//! Consistent labeling as an evolutionary game.
//!
//! Objects to be labeled are players on a weighted similarity graph, labels
//! are pure strategies, and the label-compatibility matrix supplies the
//! payoffs of every pairwise game. Discrete replicator dynamics drive the
//! population of mixed strategies toward a Nash equilibrium, and each player
//! takes the label with the highest final probability.
//!
//! The crate instantiates this engine for knowledge-based word sense
//! disambiguation:
//!
//! * [`contingency`]: corpus association measures over 2x2 co-occurrence tables.
//! * [`graph`]: the player graph built from association scores, with n-gram
//!   proximity augmentation.
//! * [`senses`]: sense inventories and mixed-strategy initialization.
//! * [`payoff`]: sense similarity (taxonomy and gloss-vector measures) and
//!   per-game payoff slices.
//! * [`dynamics`]: the replicator solver and a Nash-equilibrium check.
//! * [`eval`]: precision/recall/F1 scoring and the most-frequent-sense baseline.
//! * [`pipeline`]: file-driven orchestration used by the `wsd-games` binary.

pub mod contingency;
pub mod demo;
pub mod dynamics;
pub mod error;
pub mod eval;
pub mod graph;
mod io;
pub mod payoff;
pub mod pipeline;
pub mod senses;

pub use contingency::{AssociationMeasure, ContingencyTable, CountStore};
pub use dynamics::{Game, GameConfig, GameOutcome};
pub use error::{Error, Result};
pub use graph::{NgramPolicy, Occurrence, WordGraph};
pub use payoff::{PayoffStore, Provider};
pub use senses::{Initialization, SenseInventory, StrategyState};
