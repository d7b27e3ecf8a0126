//! Std companion to `gdlayout-core`: file formats, batch comparison, and the
//! interactive session service. The `gdlayout` binary wraps all of it.

pub mod compare;
pub mod io;
pub mod service;
pub mod settings;

pub use gdlayout_core;
