//! The autonomous radial ODE on the cylinder and its necksize family.

mod dopri;
mod orbit;

pub use orbit::{
    acceleration, energy, family_csv, fixed_point, homoclinic, integrate, necksize_family, necksize_orbit,
    ode_residual_bounded_derivative, rescaling_factor, turning_point, DerivativeBound, FamilyRow, FowlerOrbit,
    Sample,
};
