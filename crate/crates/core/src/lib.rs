//! Counting rational points of bounded height on two split singular quartic
//! del Pezzo surfaces, through their universal torsors, with an independent
//! brute-force oracle and an exact toolkit for every factor of the conjectured
//! leading constant.

pub mod arith;
pub mod asymptotics;
pub mod error;
pub mod kloosterman;
pub mod oracle;
pub mod peyre;
pub mod polytope;
pub mod quad;
pub mod regions;
pub mod sieve;
pub mod surfaces;
pub mod torsor;

pub use error::{Error, Result};
pub use surfaces::{SurfaceId, SurfacePoint};
