//! IO, wire formats, scripts, views and the HTTP service around `eo-core`.

pub mod documents;
pub mod format;
pub mod script;
pub mod service;
pub mod sim;
pub mod view;

pub use eo_core as core;
