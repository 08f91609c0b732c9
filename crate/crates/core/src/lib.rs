//! Numerics for quantum thermodynamics with coherence.
//!
//! The crate models finite-dimensional systems in contact with a heat bath:
//! generalized free energies built from quantum Rényi divergences, free
//! coherences (time-translation asymmetry monotones), a constructive
//! thermal-operation sampler with second-law checkers, the classical
//! embedding/majorization layer, and fast tensor-power coherence formulas.
//!
//! Conventions: β is an inverse energy (kT = 1/β), every entropic quantity
//! is in nats, and composite indices are row-major with the left tensor
//! factor most significant.

pub mod divergences;
pub mod error;
pub mod io;
pub mod linops;
pub mod purity;
pub mod states;
pub mod tensorpower;
pub mod thermalops;
pub mod tol;

pub use error::{Error, Result};
