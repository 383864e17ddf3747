//! Schulze method toolkit.
//!
//! The crate covers the whole pipeline from ranked ballots to winners:
//!
//! * [`ballots`]: weak-order profiles, the ballot file format, rank encoding
//!   and pairwise tallies.
//! * [`majority_graph`]: weighted majority graphs and general comparison
//!   graphs, built naively or through a dominance product.
//! * [`dominance`]: dominance products (brute force and a blocked,
//!   bitset-accelerated variant) and dominating-pair detection.
//! * [`bottleneck`]: widest-path baselines (all-pairs and single-source),
//!   winner verification and the Schulze ranking.
//! * [`dscc`]: a decremental strongly-connected-components structure for
//!   complete digraphs.
//! * [`winners`]: near-quadratic single-winner and all-winners algorithms
//!   driven by edge deletions in increasing weight order.
//! * [`reductions`]: generators that embed dominance-product and
//!   dominating-pairs instances into elections.
//! * [`cli`]: the command-line front end.

pub mod ballots;
pub mod bottleneck;
pub mod cli;
pub mod dominance;
pub mod dscc;
pub mod majority_graph;
pub mod reductions;
pub mod winners;

mod bits;

pub use ballots::{PreferenceProfile, RankMatrix, TallyMatrix, WeakOrder};
pub use bottleneck::BottleneckMatrix;
pub use dominance::{DominanceInstance, Matrix};
pub use dscc::SccState;
pub use majority_graph::{ComparisonGraph, Strength};
