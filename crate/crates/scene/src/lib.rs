//! Synthetic scene generation and the command-line front end for the exact
//! dyadic relative-pose solvers.

pub mod cli;
pub mod files;
pub mod perturb;
pub mod scene;
