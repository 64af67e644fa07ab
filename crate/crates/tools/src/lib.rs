//! Std companion to `oneshot-pir`: text formats, scheme configuration,
//! audits of correctness and privacy, and the command-line driver.

pub mod audit;
pub mod cli;
pub mod config;
pub mod formats;
pub mod transcript;

pub use config::{Pipeline, SchemeConfig};
