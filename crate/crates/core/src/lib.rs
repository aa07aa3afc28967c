//! Finite quasigroup approximations of locally compact groups.
//!
//! The crate is organized bottom-up:
//!
//! * [`group_models`]: coordinatized groups (cyclic, integers, circle, torus,
//!   affine, Heisenberg) with metrics and lattices.
//! * [`covering`]: grids, covers and covering numbers `(A:O)`.
//! * [`matching`]: Hopcroft–Karp matching and systems of distinct representatives.
//! * [`latin`]: latin squares, rectangle extension and embedding of partial tables.
//! * [`approximation`]: the grid → candidate sets → row matchings pipeline that
//!   produces finite left (or right) quasigroup approximations, plus a verifier.
//! * [`haar`]: the counting functional `Δ·Σ f(j(h))` and shift diagnostics.
//! * [`semigroup`]: ideal chains, quotients, Rees semigroups and group extraction.

pub mod approximation;
pub mod covering;
pub mod group_models;
pub mod haar;
pub mod latin;
pub mod matching;
pub mod semigroup;
mod spatial;

pub use group_models::{CompactRegion, GroupElement, GroupModel, ModelKind, Neighborhood, Side};
