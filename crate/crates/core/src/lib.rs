//! Exact dyadic arithmetic and relative-pose estimation.
//!
//! Pixel coordinates are encoded as truncated 2-adic integers through
//! hierarchical interval subdivision; the 8-, 7-, and 5-point relative pose
//! problems are then solved by Hensel lifting over `Z/2^N`, producing
//! essential-matrix candidates as residues together with exact verification
//! of every constraint. No floating point is involved anywhere.

pub mod encoding;
pub mod hensel;
pub mod linalg;
pub mod padic;
pub mod poly;
pub mod pose;

pub use padic::{PadicNorm, TruncatedPadic};
