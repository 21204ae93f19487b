//! Scene-file handling shared by the `nevanlinna` binary and its tests.

pub mod scene;
