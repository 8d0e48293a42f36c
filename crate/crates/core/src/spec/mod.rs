//! The specification model and its loader.

mod loader;
mod model;

pub use loader::{load_spec, load_spec_file, SpecError};
pub use model::*;
