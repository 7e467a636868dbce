//! Exact computational geometry on cotangent space.
//!
//! The crate computes 0-conormal cones and truncated microsupports of
//! polyhedral sets, checks involutivity statements on sampled conic sets,
//! evaluates truncated-microsupport descriptions of stratified constant
//! sheaves, and cross-checks everything against an independent cellular
//! local-cohomology oracle. All set-theoretic verdicts are exact over the
//! rationals.

pub mod cells;
pub mod cone;
pub mod conic;
pub mod error;
pub mod feas;
pub mod fixtures;
pub mod linalg;
pub mod normalcone;
pub mod polyhedron;
pub mod project;
pub mod pset;
pub mod cohoracle;
pub mod rat;
pub mod sample;
pub mod sheaf;
pub mod sweep;
pub mod symplectic;

pub use cone::{is_proper_cone, polar_cone, ConvexCone};
pub use conic::{antipodal, conic_membership, ConicPiece, ConicSubset, CotangentPoint};
pub use error::{Error, Result};
pub use normalcone::{
    conormal0, conormal0_ball_test, conormal0_halfspace_test, embed_conormal, min_principle_check,
    openness_criterion, proper_cone_probe, AffineMap, BallTestParams,
};
pub use polyhedron::{ConvexPolyhedron, Halfspace};
pub use project::dist_to_convex;
pub use pset::{tangent_cone, LocallyClosedPolyhedralSet, PolyhedralSet, TangentCone};
pub use symplectic::expr::ScalarField;
pub use symplectic::{hamiltonian_vector, poisson_bracket, weak_involutivity_check, BracketReport};
