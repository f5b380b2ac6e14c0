//! Exact computation of intersection homology for finite filtered simplicial
//! complexes, under two allowability notions: the polyhedral dimension of
//! stratum preimages and the classical skeleton dimension.
//!
//! Everything is carried out in exact rational arithmetic: polytope
//! intersections, general and strong general position predicates,
//! pseudo-barycentric subdivision, bad-face detection, and Smith normal form
//! homology over `Z` and `Z/p`.

pub mod extint;
pub mod linalg;
pub mod geometry;
pub mod filtered;
pub mod allowability;
pub mod subdivision;
pub mod intalg;
pub mod homology;
pub mod corpus;

pub use extint::ExtInt;
pub use geometry::{GeoSimplex, Point, Polytope, Rat};
