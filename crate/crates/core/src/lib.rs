//! Example-based generation of proportion infographics.
//!
//! A proportion statement ("More than 74% of users are female") is segmented,
//! turned into several concrete queries sampled from the design choices seen
//! in a labeled example library, matched against that library, and each
//! retrieved example's design is transferred onto the statement. The resulting
//! drafts are refined by a Metropolis-style chain whose acceptance ratio comes
//! from a recursive neural layout scorer, then snapped and rendered to SVG.
//!
//! Module map:
//!
//! - [`corpus`]: example library data model, validation, synthetic corpus,
//!   design-choice distribution
//! - [`statement`]: rule-based statement segmentation
//! - [`assets`]: icon lookup plus chart and pictograph geometry
//! - [`retrieval`]: example index, query sampling, assignment distance
//! - [`init`]: design transfer onto query content ([`init::Draft`])
//! - [`scorer`]: guillotine tree builder, recursive scorer, training
//! - [`adapt`]: proposal dynamics, acceptance, refinement, snapping
//! - [`render`]: SVG output

pub mod adapt;
pub mod assets;
pub mod corpus;
pub mod geometry;
pub mod init;
pub mod render;
pub mod retrieval;
pub mod rng;
pub mod scorer;
pub mod statement;
pub mod text;

pub use corpus::{Example, ExampleLibrary, ElementType, VisualElement};
pub use geometry::BoundingBox;
pub use init::Draft;
pub use scorer::ScorerModel;
