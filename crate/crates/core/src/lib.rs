//! Operational toolkit for nonlinear "boxes" embedded in otherwise linear
//! quantum mechanics: which preparations a box acts on, how remote ensemble
//! preparation leads to signaling, and how to test whether observed
//! statistics admit any linear description.

pub mod boxes;
pub mod error;
pub mod preparations;
pub mod protocols;
pub mod quantum;
pub mod scenario;
pub mod steering;
pub mod witness;

pub use error::{Error, Result};
