//! The Bessel semigroup on radial profiles and the monotone flow of the
//! functional Blaschke-Santaló product.

pub mod cordero;
pub mod functional;
pub mod kernel;
pub mod state;

pub use cordero::{
    cordero_residual, integrand_identity_check, CorderoConfig, CorderoReport, IdentityReport, CURVATURE_FLOOR,
};
pub use functional::{check_dimension, dual_mass, product_functional, radial_mass, DualKind};
pub use kernel::{angular_defects, bessel_semigroup, BesselFlow, Jet, KernelConfig};
pub use state::{
    flow_state, flow_trace, FlowConfig, FlowState, FlowTrace, FlowVerdicts, ALPHA_TOL, MASS_TOL, PRODUCT_TOL,
};
