//! Galton–Watson trees with concave recursions: p-conductance of trees and
//! the wired random cluster model.

pub mod asymptotics;
pub mod cli;
pub mod concave;
pub mod conductance;
pub mod error;
pub mod montecarlo;
pub mod offspring;
pub mod rcm;
pub mod rng;
pub mod tree;

pub use concave::{KernelKind, RecursionFunction};
pub use error::{Error, Result};
pub use offspring::{OffspringDistribution, OffspringKind, OffspringSpec};
pub use rcm::RCMParams;
pub use rng::Stream;
pub use tree::{evaluate_root, ExplicitTree, RSchedule, RecursionConfig, RootEvaluation};
