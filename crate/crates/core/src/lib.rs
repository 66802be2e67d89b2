//! Compile a relational EHR database into a knowledge graph, translate SQL
//! queries into equivalent SPARQL, run both, and score question-answering
//! predictions.

pub mod eval;
pub mod fixture;
pub mod kg;
pub mod query;
pub mod relational;
pub mod schema;
pub mod transpile;
pub mod value;
