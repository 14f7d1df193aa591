pub mod bigdet;
pub mod cli;
pub mod decoder;
pub mod detector;
pub mod error;
pub mod experiment;
pub mod isolation;
pub mod matching;
pub mod oracle;
pub mod seeds;
pub mod selftest;
pub mod tables;
pub mod window;

pub use error::{Error, Result};
