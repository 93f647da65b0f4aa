//! Galois ring arithmetic, character sums, and Jacobi-sum codebooks.

pub mod arith;
pub mod characters;
pub mod codebook;
pub mod error;
pub mod poly;
pub mod ring;
pub mod sums;
pub mod verify;

pub use error::{Error, Result};
pub use ring::{GaloisRing, RingElement, RingParams};
