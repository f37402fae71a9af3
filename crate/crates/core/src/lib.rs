//! Odd, even and unified Khovanov homology of link diagrams, signed
//! Burnside functors, cobordism maps and s-type concordance invariants.

pub mod algebra;
pub mod concordance;
pub mod burnside;
pub mod cli;
pub mod complexes;
pub mod corpus;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod jones;
pub mod linalg;
pub mod moves;
pub mod resolution;
pub mod verify;

pub use error::{Error, Result};
