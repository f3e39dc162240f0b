pub mod bounds;
pub mod concavity;
pub mod ensemble;
pub mod error;
pub mod gap;
pub mod hermitian;
pub mod ktrace;
pub mod linalg;
pub mod mixed;
pub mod random;
pub mod sim;
pub mod suites;
pub mod wedge;

pub use error::{Error, Result};
pub use hermitian::HermitianMatrix;
