//! Sphere and ball integration in R^n for integrands built from bubble fields.
//!
//! Sharply peaked bubbles are handled with a smooth partition of unity: each
//! off-origin bubble center owns a ball `B(c, ρ)` on which a bump `χ` is supported.
//! `f χ` is integrated in coordinates centered at the bubble (geometric radial
//! panels down to the bubble scale, exact treatment of the cut by the outer
//! sphere), and `f (1 - Σ χ)` is integrated in origin-centered spherical
//! coordinates where it is smooth on the scale of `ρ`.

mod adapt;
pub mod cubature;
pub mod gauss;
mod integrate;
pub mod sphere;

pub use adapt::{Integral, QuadSettings};
pub use gauss::GaussRule;
pub use integrate::{
    ball_integrate, ball_integrate_split, bump, radial_panels, integrate_profile, radial_mass_fraction, sphere_integrate,
    sphere_integrate_fixed, Geometry, Peak, SplitIntegrand,
};
pub use sphere::{orthonormal_frame, SphereRule};
