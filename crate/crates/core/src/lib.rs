//! Graph-guided question-answer generation for procedural text.

pub mod amr;
pub mod augment;
pub mod backend;
pub mod dataset;
pub mod flowgraph;
pub mod metrics;
pub mod pipeline;
pub mod qgen;
pub mod realize;
