//! Analysis pipeline, report assembly and file output behind the
//! `frontlab` binary.

pub mod mesh;
pub mod output;
pub mod report;
