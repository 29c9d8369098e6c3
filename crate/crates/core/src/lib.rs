//! Cayley balls, cone types and spectral bounds for `PSL(2,Z)` with the
//! generators `r = (0 1; -1 0)` and `u = (1 1; 0 1)`.
//!
//! * [`group`]: exact matrix arithmetic and the three letters `r, u, ū`.
//! * [`words`]: word combinatorics, relators, and path decompositions.
//! * [`cayley`]: breadth-first balls, word norms, geodesic suffixes, the
//!   Laplacian.
//! * [`typing`]: the six-type cone structure and its verification.
//! * [`bounds`]: edge valuations, the minimax lower bound, and Dirichlet
//!   upper bounds.

pub mod bounds;
pub mod cayley;
pub mod error;
pub mod group;
pub mod typing;
pub mod words;

pub use error::{Error, Result};
