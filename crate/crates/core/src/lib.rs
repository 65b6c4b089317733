//! Exact solution of the Lipkin-Meshkov-Glick model through the Bethe
//! ansatz, shallow one-hot state-preparation circuits for its eigenstates,
//! a state-vector simulator and a VQE benchmark built on top of them.

pub mod bethe;
pub mod circuit;
pub mod ego;
pub mod error;
pub mod exec;
pub mod model;
pub mod optim;
pub mod sim;
pub mod verify;
pub mod vqe;

pub use error::{Error, Result};
pub use exec::Exec;
