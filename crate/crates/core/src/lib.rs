//! Splines on branched covers of the torus.
//!
//! A branched cover of the gridded torus is described combinatorially by a
//! cut system: grid edges labelled with sheet permutations. Lifting the
//! ordinary biperiodic B-splines through such a cover yields a single spline
//! space on a surface of higher genus. The crate provides
//!
//! * [`base_splines`]: uniform biperiodic B-splines and exact bivariate
//!   polynomials,
//! * [`analyzer`]: smoothing-cofactor checks, the conformality null space and
//!   its closed-form dimension, and a numeric smoothness scanner,
//! * [`cover`]: cut systems, vertex monodromy and Riemann–Hurwitz counts,
//! * [`branched_basis`]: lifted B-spline components and their evaluation,
//! * [`geometry`]: control nets sampled from stacked tori, welded quad
//!   meshes and OBJ export,
//! * [`fvs`]: the Fraeijs de Veubeke–Sander C1 quadrilateral on the cover,
//! * [`pipeline`]: the JSON-configured analyze/build/check/confdim commands
//!   driven by the `branched` binary.

pub mod analyzer;
pub mod base_splines;
pub mod branched_basis;
pub mod cover;
mod error;
pub mod fvs;
pub mod geometry;
pub mod pipeline;

pub use error::{Error, Result};
