pub mod ambient;
pub mod boundedness;
pub mod catalog;
pub mod classify;
pub mod error;
pub mod expr;
pub mod frontal;
pub mod invariants;
pub mod jet;
pub mod par;
pub mod slicing;
pub mod spec;

pub use error::GeometryError;
