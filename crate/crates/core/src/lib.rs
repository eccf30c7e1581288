pub mod batch;
pub mod canon2;
pub mod error;
pub mod logmap;
pub mod matcore;
pub mod metric;
pub mod oscsim;
pub mod pseudospec;
pub mod sympl;
pub mod synth;

pub use error::{Error, Result};
pub use matcore::{CMatrix, DEFAULT_TOL};
