//! Availability codes for private information retrieval and batch requests:
//! multiplicity codes read along lines, and binary diagonal-parity array
//! codes, together with a certification layer that checks recovering sets
//! against the generator matrix of the encoder.

pub mod array_code;
pub mod batch_mult;
pub mod code;
pub mod curves;
pub mod descriptor;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod mpoly;
pub mod multiplicity;
pub mod pir;
pub mod verify;

pub use code::{AvailabilityCode, RestrictedWord, SymbolSource};
pub use descriptor::Descriptor;
pub use error::{Error, Result};
