//! Exact computation on the degree-4 entropy space: polymatroid arithmetic
//! with symbolic prime-logarithm scalars, the facet/ray geometry of the
//! polymatroidal region and its 2-dimensional faces, variable-strength
//! orthogonal arrays and their Latin-object counterparts, Latin square
//! decompositions, and entropic-point classification with constructive
//! witnesses.

pub mod cone;
pub mod designs;
pub mod error;
pub mod exactlog;
pub mod latin;
mod linalg;
pub mod setfn;

pub use error::{Error, Result};
pub use exactlog::{LogValue, Rat};
pub use setfn::{EntropyVector, RankVector, RayType, SetFunction};
