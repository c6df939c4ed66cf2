//! Bar-level tempo data from cumulative lap timestamps.
//!
//! The pipeline runs from lap exports ([`ingest`]) through bar durations and
//! tempi ([`tempo`]), quality control and aggregation ([`analysis`]), tempo
//! distributions ([`distributions`]) and SVG charts ([`render`]).
//! [`jitter`] simulates reaction-time error to check the error model.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod distributions;
pub mod error;
pub mod ingest;
pub mod jitter;
pub mod render;
pub mod tempo;

pub use error::{Error, Result};
