//! Linear algebra over the Gaussian rationals and over complex floats for
//! polarized Hodge structures of weight -1 on a symplectic lattice, their
//! nilpotent degenerations (limiting mixed Hodge structures, SL(2)-orbits),
//! and the induced boundary maps into Satake and toroidal boundary components
//! of Siegel spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`symplin`] -- scalars, matrices, subspaces, and the symplectic form;
//! * [`hodge`] -- Hodge filtrations, the compact dual, and the period domain;
//! * [`degeneration`] -- weight filtrations, Deligne bigradings, R-split
//!   mixed Hodge structures, and SL(2)-triples;
//! * [`cyclespace`] -- cycle space points and the boundary maps onto Satake
//!   and Siegel-orbit data;
//! * [`case1111`] -- the rank-4 case with Hodge numbers (1,1,1,1): charts,
//!   closed forms for the two rank-one degeneration types, and continuity
//!   experiments along schedules approaching the boundary;
//! * [`verify`] -- a deterministic battery of self-checks used by the CLI and
//!   the acceptance tests.

pub mod error;
pub mod tol;

pub mod symplin;

pub mod hodge;

pub mod degeneration;

pub mod cyclespace;

pub mod case1111;

pub mod sampling;

pub mod verify;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
