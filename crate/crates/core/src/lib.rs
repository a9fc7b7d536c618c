pub mod bench;
pub mod ddd;
pub mod error;
pub mod events;
pub mod fixtures;
pub mod formulations;
pub mod fragments;
pub mod gen;
pub mod instance;
pub mod milp;
pub mod schedule;
pub mod solution;
pub mod timespace;
pub mod validate;

pub use error::{Error, Result};
