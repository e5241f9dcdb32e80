//! Normalization to unit mass and a derivative-free search for the radial
//! extremizer of the product functional.

pub mod exact;
pub mod search;

pub use exact::{legendre_product_exact, profile_legendre_mass, profile_mass};
pub use search::{
    gaussian_distance, gaussian_mass, gaussian_scale, normalize_profile, search_extremizer, search_from,
    search_restarts, SearchConfig, SearchResult, TERMINAL_FLOOR,
};
