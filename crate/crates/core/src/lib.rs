pub mod classify;
pub mod bundle;
pub mod coupling;
pub mod duality;
pub mod error;
pub mod exec;
pub mod gallery;
pub mod graph;
mod lp;
pub mod marginal;
pub mod model;
pub mod report;
pub mod scalar;
pub mod solve;
pub mod verify;
