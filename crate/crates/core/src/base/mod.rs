//! Function carriers, profiles, measures and seeded generators.

pub mod extended;
pub mod grid;
pub mod measure;
pub mod profile;
pub mod random;
pub mod serial;

pub use extended::ExtendedValue;
pub use grid::{Axis, Grid, GridFunction, Point};
pub use measure::MeasureSpec;
pub use profile::{ConvexProfile, Quadratic, RadialPotential};
pub use random::{make_radial, random_grid1d, random_grid_nd, random_profile, RandomConvexSpec};
