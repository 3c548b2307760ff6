//! Closed-form bubble terms and their superpositions.

mod field;
mod sampling;
mod terms;

pub use field::{PointEval, SolutionField};
pub use sampling::{curvature_bounds, CurvatureBounds, SamplingPlan};
pub use terms::{flat_bubble_curvature, AmplitudeMode, BubbleTerm, FlatBubbleTerm, TermEval};
