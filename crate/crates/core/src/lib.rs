pub mod data;
pub mod error;
pub mod estimate;
pub mod gmo;
pub mod baseline;
pub mod bgmo;
pub mod cli;
pub mod optim;
pub mod quad;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
