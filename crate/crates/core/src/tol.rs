//! Numerical tolerances shared by preconditions.

/// Base-point and projection agreement required by binary operations.
pub const BASE_MATCH: f64 = 1e-9;

/// Constraint residual accepted on inputs, scaled by the slot magnitudes.
pub const CONSTRAINT: f64 = 1e-9;

/// Residual accepted by the reducibility predicates.
pub const REDUCIBLE: f64 = 1e-9;

/// Relative central-difference step.
pub const FD_STEP: f64 = 1e-5;
