pub mod bootstrap;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod events;
pub mod experiments;
pub mod histogram;
pub mod init;
pub mod intensity;
pub mod kernel;
pub mod metrics;
pub mod rng;
pub mod selection;
pub mod simulator;
pub mod sparse;
pub mod variational;
pub mod vem;

pub use error::{PpsbmError, Result};
