//! Hand-rolled R1CS gadgets over the BN254 scalar field.
//!
//! Values are tracked next to their linear combinations so that witness
//! generation never has to re-evaluate the constraint system.

pub mod bits;
pub mod curve;
pub mod num;
pub mod poseidon;
pub mod sha256;

pub use bits::{Bit, MultiEq, UInt32};
pub use num::Num;
