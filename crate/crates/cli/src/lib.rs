//! Configuration documents and SVG figures for the `ainf` command.

pub mod config;
pub mod svg;
