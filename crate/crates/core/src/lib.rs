//! Concept lattices and their line diagrams: additive placements, the
//! orthogonal projection into the additive space, force-directed refinement,
//! realizer-embedded layouts via minimal two-dimensional extensions, and the
//! combined pipeline.

pub mod additive;
pub mod bitset;
pub mod catalog;
pub mod config;
pub mod context;
pub mod diagram;
pub mod dimdraw;
pub mod error;
pub mod examples;
pub mod forces;
pub mod lattice;
pub mod pipeline;
pub mod render;
pub mod sat;

pub use additive::{AdditiveBasis, AdditivityCheck, Element, ElementVectors, RepresentationKind};
pub use bitset::BitSet;
pub use context::FormalContext;
pub use diagram::{Layout, Point, QualityMetrics, ValidityReport};
pub use error::{Error, Result};
pub use lattice::{Concept, ConceptLattice};
pub use dimdraw::{ExtensionBudget, ExtensionResult, Realizer};
pub use forces::{ForceConfig, ForceMode};
pub use pipeline::{Algorithm, PipelineConfig, PipelineResult};
