//! Inf-convolution engine, enlargements, Hopf-Lax evolution and the
//! comparison harnesses built on them.

pub mod checks;
pub mod cost;
pub mod engine;
pub mod set;

pub use checks::{
    comparison_theorem_check, comparison_theorem_check_levels, comparison_theorem_check_with, decomposition_check,
    decomposition_check_with, hopf_lax_comparison, interior_levels, ComparisonReport, ComparisonRow,
    ComparisonTheoremReport, DecompositionReport,
};
pub use cost::{CostSpec, HopfLaxKernel, MonotoneMap};
pub use engine::{
    hopf_lax, hopf_lax_with, inf_convolution, inf_convolution_auto, inf_convolution_with, lower_envelope_1d,
};
pub use set::{enlarge, SetOnGrid};
