#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod expr;
pub mod catalog;
pub mod connections;
pub mod fields;
pub mod golden;
pub mod linalg;
pub mod scalar;
pub mod tape;
pub mod verify;

pub use error::{Error, ParseError, Result};
