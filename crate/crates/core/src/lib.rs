//! Exact-arithmetic workbench for multi-Gieseker stability.
//!
//! The crate is organised by subsystem:
//!
//! - [`exact`]: rationals, real quadratic fields and polynomials ordered by
//!   their values for `m ≫ 0`.
//! - [`sheaf`]: numerical sheaf surrogates, multi-Hilbert polynomials and
//!   stability verdicts against a supplied family of subsheaf candidates.
//! - [`chamber`]: walls and chambers in the space of stability parameters.
//! - [`quiver`]: representations of the two-layer quiver, King stability,
//!   tight closures, Harder–Narasimhan and Jordan–Hölder filtrations.
//! - [`cone`]: intersection forms, Hodge signature, positive cones and path
//!   certificates for convexity of `C⁺(X)`.
//! - [`kahler`]: decomposing a real ample class into rational ample classes
//!   with positive weights.
//! - [`vgit`]: tracing semistable sets of sample representations along paths
//!   in parameter space.
//! - [`scenario`]: the versioned JSON input format used by the CLI.

pub mod chamber;
pub mod cone;
pub mod exact;
pub mod feasibility;
pub mod field;
pub mod kahler;
pub mod linalg;
pub mod quiver;
pub mod scenario;
pub mod sheaf;
pub mod vgit;

pub use exact::{poly_compare, FieldKind, Poly, Scalar};
