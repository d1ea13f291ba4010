//! Graph-limit laboratory.
//!
//! Randomly growing graph models (uniform, ranked and prefix attachment,
//! preferential attachment on fixed nodes, prescribed-limit growth), the
//! graphons they converge to, homomorphism and injective densities, and
//! cut/edit distance estimation between graphs and kernels. Pixel pictures
//! of all of these can be written as portable graymaps.

pub mod density;
pub mod distance;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod growth;
pub mod math;
pub mod pattern;
pub mod rng;
pub mod stats;
pub mod viz;

pub use error::{Error, Result};
pub use graph::{Graph, Multigraph};
pub use graphon::{BuiltinGraphon, Kernel, StepGraphon};
pub use pattern::PatternGraph;
pub use rng::Seed;
