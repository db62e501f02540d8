//! Exact tools for first-order difference operators on triangulated
//! surfaces: discrete connections and their holonomy, the black/white
//! boundary value problem, and discrete holomorphic functions on the
//! triangular lattice.

pub mod connection;
pub mod fixtures;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod mesh;
pub mod opalgebra;
pub mod par;
pub mod sample;
pub mod scalar;
pub mod simplicial;
pub mod solver;

pub use scalar::{frac, rat, Rational};
