//! Face-off classification, aggregation, and player-impact metrics for
//! spatio-temporal hockey event logs.
//!
//! The pipeline runs ingest → classify → aggregate → metrics/report, with a
//! seeded synthetic-season generator (plus analytic oracles) for validating
//! the estimators end to end.

pub mod aggregate;
pub mod classify;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod rink;
pub mod synth;

pub use aggregate::{BucketKey, BucketStats, Eq1Denominator, LeagueBaselines, Tally};
pub use classify::{ClassifiedFaceoff, ClassifiedPair, ClassifyConfig, ClassifyError};
pub use ingest::{FaceoffRecord, IngestError, SequenceEvent, Team, ValidationReport};
pub use metrics::{MetricsError, MetricsOptions, PlayerMetrics, QualificationRule};
pub use rink::{
    Deployment, DirectionSector, DotId, Handedness, ModelError, RinkSpec, Side, TakerFrame,
    ZoneSection,
};
pub use synth::{SynthError, SynthParams};
