pub mod choi;
pub mod error;
pub mod linalg;
pub mod schmidt;
pub mod search;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
