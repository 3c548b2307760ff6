//! The unbounded-peak construction and the prescribed-growth ring construction.

mod build;
mod lambda;
mod params;

pub use build::{
    build_prescribed_growth, build_unbounded, ring_centers, Check, Construction, ConstructionReport,
    Relation, ScaleRecord,
};
pub use lambda::{
    choose_lambda_ring, choose_lambda_unbounded, domination_sup, median_mass_radius, ring_count,
    ring_radius, DominationSup,
};
pub use params::{ConstructionAParams, ConstructionBParams, GrowthTable, SeqRule, Sequences};
