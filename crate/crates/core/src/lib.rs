//! Ontology-driven recommendation of editorial products for conferences.
//!
//! The batch side lives here: load a topic taxonomy ([`ontology`]), group
//! chapter metadata into products ([`corpus`]), annotate products with topic
//! distributions ([`annotator`]), score conference/product pairs
//! ([`simeng`]), and persist everything as a catalog ([`store`]).
//! [`pipeline`] runs the whole chain.

pub mod annotator;
pub mod corpus;
pub mod ontology;
pub mod pipeline;
pub mod simeng;
pub mod store;
pub mod text;

pub use annotator::{LabelMatcher, ReducedTopicList, TopicDistribution};
pub use corpus::{ChapterRecord, ProductDescriptor, ProductKind};
pub use ontology::{OntologyGraph, TopicId};
pub use simeng::{SimEngConfig, SimilarityRecord, TopicVector};
pub use store::{Catalog, RecommendationQuery};
