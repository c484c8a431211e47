//! Periodic quantum graphs: Schrödinger operators on metric graphs, their
//! dispersion functions as Laurent polynomials in the Floquet multipliers,
//! and band-structure / Fermi-surface component analysis for stacked
//! graphene models.
//!
//! The crate is organized bottom-up:
//!
//! - [`edge`]: transfer matrices and Dirichlet-to-Neumann data for
//!   `-d²/dx² + q(x)` on an interval with piecewise-constant `q`.
//! - [`laurent`]: sparse multivariate Laurent polynomials over complex
//!   coefficients, determinants of Laurent matrices, structure fitting in a
//!   composite variable, and a bounded factorization probe.
//! - [`graph`]: the periodic-graph data model and the three graph
//!   surgeries (Dirichlet severing, single-vertex join, edge subdivision).
//! - [`spectral`]: assembly of the spectral matrix, dispersion functions,
//!   and spectrum scans.
//! - [`reduce`]: reducibility machinery — the join calculus, fitting the
//!   dispersion as a polynomial in a composite Floquet variable, the
//!   tridiagonal fast path for stacks coupled by edges, pole-move
//!   verification, and the irreducible bilayer fixtures.
//! - [`graphene`]: builders for single and stacked graphene layers, band
//!   tables, conical-point detection, and dispersion-surface export.
//! - [`config`]: JSON-compatible config-file parsing for graphs, stacks,
//!   and potentials.

pub mod config;
pub mod edge;
pub mod error;
pub mod graph;
pub mod graphene;
pub mod laurent;
pub mod reduce;
pub mod spectral;

pub use error::QgError;
