pub mod analysis;
pub mod construct;
pub mod dimension;
pub mod error;
pub mod fowler;
pub mod fields;
pub mod quadrature;
pub mod special;

pub use dimension::{make_context, DimensionContext};
pub use error::{Error, Result};
pub use fields::{BubbleTerm, FlatBubbleTerm, PointEval, SolutionField};
