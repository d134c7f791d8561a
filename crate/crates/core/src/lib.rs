//! Numerical toolkit for groups of `C^k` diffeomorphisms of the interval and
//! the circle.
//!
//! Diffeomorphisms are stored as jet grids: values and derivatives up to order
//! `k` at `N + 1` uniform nodes. On top of that representation the crate
//! provides the logarithmic-derivative coordinates `φ_j` and `Φ_k`, the metrics
//! `ρ_k`, `d_k` and `σ_1`, exact polynomial identities for derivatives of
//! compositions and inverses, and the coarse-geometric constructions
//! (boundedness reports, ε-ball factorizations, geodesic chains).

pub mod circle;
pub mod config;
pub mod diffeo;
pub mod error;
pub mod funcspace;
pub mod geometry;
pub mod interval;
pub mod io;
pub mod polyengine;
pub mod taylor;
pub mod verify;

pub use circle::{circle_distance, wrap01, CircleDiffeo, CircleFamily};
pub use config::Tolerances;
pub use diffeo::{Diffeomorphism, FamilyTag, Manifold, PhiCoords};
pub use error::{Error, Result};
pub use funcspace::{GridFunction, JetSource, SmoothFunction};
pub use interval::{IntervalDiffeo, IntervalFamily};
pub use io::Diffeo;
pub use polyengine::{build_p, build_q, build_r, CompiledPoly, FormalPoly, Var};
