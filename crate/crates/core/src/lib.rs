//! Half-integral perfect matching covers of r-graphs.
//!
//! For an r-graph `G` with edge/perfect-matching incidence matrix `A`, this
//! crate constructs a solution of `A x = 1` whose entries are integers or
//! exactly `+1/2`, supported on linearly independent perfect matchings. The
//! construction runs a tight cut decomposition, solves braces, Petersen
//! bricks and other bricks separately, and merges the leaf solutions back
//! across the tight cuts. An independent verifier re-checks every claim.

pub mod certificate;
pub mod cover;
pub mod decomposition;
pub mod generate;
pub mod graph;
pub mod graph_file;
pub mod linalg;
pub mod matching;
pub mod merge;
pub mod named;
pub mod solvers;

pub use cover::{CoverSolution, HalfInt, Term};
pub use decomposition::{decompose, DecompositionTree, LeafClass};
pub use graph::{Cut, EdgeId, MultiGraph};
pub use matching::PerfectMatching;
pub use merge::{solve_r_graph, SolveOptions};
