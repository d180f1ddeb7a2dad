//! File formats and the run pipeline behind the `markovcad` binary.

pub mod app;
pub mod dto;
