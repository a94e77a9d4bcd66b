pub mod error;
pub mod par;
pub mod potentials;
pub mod rootfind;
pub mod specfun;
pub mod tracer;
pub mod verify;

pub use error::EvalError;
