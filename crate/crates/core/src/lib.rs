//! Object-detection evaluation with optimal detection-label association.
//!
//! The engine associates detections to labels by solving a maximum-weight
//! assignment over a scaled IoU matrix, which always yields the association
//! with the most true positives (and, among those, the highest total
//! overlap). Filtered metrics are computed on that one association, so no
//! filter can ever add errors.

pub mod error;
pub mod filters;
pub mod fixtures;
pub mod frame;
pub mod geometry;
pub mod ingest;
pub mod matching;
pub mod metrics;
pub mod report;

pub use error::{FilterError, GeometryError, IngestError, MatchError, MetricsError};
pub use frame::{Attributes, Detection, Frame, Label};
pub use geometry::{expected_stereo_depth_error, iou, overlap_over_area, Box2D};
