//! Command-line driver and HTTP service for the argdec engine.

pub mod cli;
pub mod render;
pub mod repl;
pub mod service;

pub use cli::{run, Failure, Io};
