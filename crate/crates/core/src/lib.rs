//! Exact valuations on polynomial rings over valued fields.
pub mod config;
pub mod cuts;
pub mod error;
pub mod field;
pub mod limitfam;
pub mod ordgroup;
pub mod parse;
pub mod poly;
pub mod report;
pub mod selftest;
pub mod valuation;
pub use error::{Error, Result};
