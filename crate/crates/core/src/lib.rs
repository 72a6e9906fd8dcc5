pub mod circuit;
pub mod codec;
pub mod commitments;
pub mod error;
pub mod evidence;
pub mod gadgets;
pub mod poseidon;
pub mod privacy;
pub mod session;
pub mod snark;

pub use error::{Error, Result};
