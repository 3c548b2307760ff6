//! Measured functionals: Pohozaev forms, volume growth, cylinder quantities, diagnostics.

mod csv;
mod cylinder;
mod diagnostics;
mod growth;
mod pohozaev;

pub use csv::{format_number, CsvTable};
pub use cylinder::{CylinderEval, CylinderField, ResidualParts, SphereTerms, WIdentity};
pub use diagnostics::{diagnostics, DiagnosticsParams, DiagnosticsReport, DiagnosticsRow};
pub use growth::{
    ball_volume, default_settings, growth_settings, probe_directions, slow_decay_measure, sphere_lp, volume_growth,
    DecayRow, GrowthRow, SphereLp,
};
pub use pohozaev::{pohozaev_report, pohozaev_surface, pohozaev_volume, PohozaevReport};
