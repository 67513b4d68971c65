//! Diagram calculus for broken Lefschetz fibrations (BLFs) over the
//! two-sphere: an embedded/immersed round image decorated with fiber data,
//! Lefschetz points, fold surgeries, plus the moves that relate such
//! diagrams.

pub mod arrangement;
pub mod diagram;
pub mod fiber;
pub mod format;
pub mod generate;
pub mod ids;
pub mod mcg;
pub mod moves;

pub use diagram::BlfDiagram;
