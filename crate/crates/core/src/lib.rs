//! Exact iterated elimination of strictly dominated strategies for
//! qualitative games with finite or interval strategy spaces.

pub mod analysis;
pub mod engine;
pub mod gamespec;
pub mod lab;
pub mod reduction;
pub mod regions;
pub mod sets;

pub use gamespec::{parse_game, serialize_game, QualitativeGame};
pub use sets::{LabelSet, Pairing, Strategy, StrategySet};

/// Directory of the shipped fixture corpus, for tests and tools.
pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}
