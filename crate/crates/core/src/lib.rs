//! Offline dependency inference for Python snippets.
//!
//! A knowledge graph of packages, the resources they export, their dependency
//! hints and mined co-installation rules is built from wheels, probe logs,
//! Dockerfiles and requirements files. Given a snippet, [`inference::infer`]
//! maps its imports onto packages, recovers transitive dependencies in install
//! order and [`emitter::render`] turns the plan into a Dockerfile.

pub mod acquisition;
pub mod cli;
pub mod emitter;
pub mod graph;
pub mod inference;
pub mod mining;
pub mod package;
pub mod registry;
pub mod snippet;

pub use graph::KnowledgeGraph;
pub use package::{PackageKey, System};
