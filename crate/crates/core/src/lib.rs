//! Computations with filtered φ-modules over `W(k)[[Y]][1/p]`, the Breuil
//! modules attached to their lattices, and the `(B_dR^+, B_cris)` model used
//! to decide admissibility.

pub mod bpair;
pub mod breuil;
pub mod doc;
pub mod error;
pub mod filmod;
pub mod linalg;
pub mod padic;
pub mod profile;
pub mod ring;
pub mod series;
pub mod verdict;

pub use error::{Error, Result};
