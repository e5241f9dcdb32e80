//! Legendre, T- and polar transforms, planar support bodies, and the
//! level-set comparisons between a transform of `f` and of `f_*`.

mod body;
mod checks;
mod legendre;
mod polar;

pub use body::{
    polar_body, polar_complement_check, santalo_set_check, BodyPairs, PolarComplementReport, SantaloSetReport,
    SupportBody2D,
};
pub use checks::{
    polar_identity_check, rearrangement_grid, transform_comparison_check, transform_comparison_check_with,
    PolarIdentityRow, TransformKind, TransformReport,
};
pub use legendre::{
    legendre_bruteforce, legendre_grid, legendre_grid_with, legendre_profile, legendre_profile_samples, max_affine_1d,
    ConjugateProfile,
};
pub use polar::{
    polar_profile, polar_profile_scan, polar_transform, polar_transform_with, t_transform, t_transform_with,
    validate_cvx0, PolarScan, PolarTransform, CVX0_TOL,
};
