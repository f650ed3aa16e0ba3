//! Citation-worthiness toolkit.

pub mod corpus;
pub mod dataset;
pub mod eval;
pub mod models;
pub mod nn;
pub mod provenance;
pub mod rng;
