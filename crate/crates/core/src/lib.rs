//! Trivialised Tulczyjew triples on principal bundles with connection, their
//! reduction to the Atiyah algebroid, and the dynamics of an axially
//! symmetric rigid body confined to a sphere.

pub mod base;
pub mod bundle;
pub mod check;
pub mod error;
pub mod lie;
pub mod reduce;
pub mod sim;
pub mod dynamics;
pub mod tol;
pub mod triple;

pub use error::{Error, Result};

/// Dense real vector used for all coordinate slots.
pub type Vector = nalgebra::DVector<f64>;
