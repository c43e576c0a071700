//! Safe strategies for two-player competitive diffusion on trees.
//!
//! Two players each pick a starting vertex of a tree; colors spread one hop
//! per round and vertices reached by both colors at once turn grey. The safe
//! game is the zero-sum game on Player 1's payoff matrix, and its value is the
//! best expected gain Player 1 can guarantee with a mixed strategy.
//!
//! The crate is organized by concern:
//!
//! - [`tree`]: tree representation, branch weights and centroids.
//! - [`game`]: diffusion simulation, pure and mixed gains, the game matrix.
//! - [`zerosum`]: exact safety values and maxmin/minmax strategies.
//! - [`special`]: closed-form strategies for spiders and complete m-ary trees.
//! - [`css`]: the centroidal safe strategy heuristic for arbitrary trees.
//! - [`experiment`]: seeded random-tree evaluation of the heuristic.
//! - [`io`]: JSON and CSV documents shared with the command-line tool.

pub mod cli;
pub mod css;
pub mod error;
pub mod experiment;
pub mod game;
pub mod io;
pub mod ratio;
pub mod special;
pub mod tree;
pub mod zerosum;

mod dsu;

pub use error::{Error, Result};
pub use game::{Coloring, GameMatrix, MixedStrategy};
pub use ratio::Ratio;
pub use tree::{CentroidInfo, CentroidKind, Tree, WeightTable};
