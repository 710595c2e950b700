pub mod analysis;
pub mod config;
pub mod curves;
pub mod error;
pub mod game;
pub mod hyperbolicity;
pub mod space;

pub use error::{Error, Result};
