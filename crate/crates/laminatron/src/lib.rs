pub mod curves;
pub mod error;
pub mod estimates;
pub mod exactnum;
pub mod family;
pub mod limitset;
pub mod measures;
pub mod timeline;
pub mod verify;

pub use error::{Error, Result};
