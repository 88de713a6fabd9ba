//! Mining cognitive and metacognitive strategies from knowledge-map based
//! learning logs.
//!
//! The pipeline runs in layers:
//!
//! 1. [`km`] loads a course knowledge map and resolves core items to core
//!    knowledge units.
//! 2. [`submap`] searches thinking-map shaped submaps around those units.
//! 3. [`log`] turns raw learner event logs into learning activity sequences.
//! 4. [`metrics`] tracks per-event submap coverage and recognizes threshold
//!    crossings as cognitive strategies.
//! 5. [`codec`] quantizes coverage vectors into integer codewords, [`gsp`]
//!    mines frequent codeword sequences, and [`strategy`] lifts both the
//!    per-learner and the mined views into abstract metacognitive strategy
//!    sequences.
//!
//! [`pipeline`] wires the layers together and [`sim`] generates synthetic
//! learner logs for end-to-end checks.

pub mod codec;
pub mod fixtures;
pub mod gsp;
pub mod km;
pub mod log;
pub mod metrics;
pub mod pipeline;
pub mod rate;
pub mod sim;
pub mod strategy;
pub mod submap;

pub use codec::{CoverageState, EncodedCcm, QuantizedCcm};
pub use gsp::{FrequentPattern, SequenceDatabase};
pub use km::{Direction, KnowledgeMap, KnowledgeUnit, RelationKind, SemanticEdge, UnitId};
pub use log::{LearningActivitySequence, LearningEvent, LogFormat};
pub use metrics::{Ccm, CognitionControlSequence, CognitiveStrategyInstance, SubmapSet, TrackedSubmap};
pub use pipeline::{MineOutcome, PipelineConfig, PipelineError, Report};
pub use rate::Rate;
pub use sim::{Archetype, SimConfig};
pub use strategy::{MetacognitiveStrategySequence, PatternReport, StrategyKind, StrategyLabel};
pub use submap::{Submap, ThinkingMapKind};
