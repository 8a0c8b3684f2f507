//! Numerical tolerances shared across modules.

/// Relative tolerance for definiteness and subspace checks in real space.
pub const REAL_TOL: f64 = 1e-10;

/// Sign margin when resolving metaplectic square root branches at `2i`.
pub const BRANCH_MARGIN: f64 = 1e-9;

/// Default absolute truncation tolerance for theta sums.
pub const THETA_TOL: f64 = 1e-12;

/// Safety factor applied to the analytic tail bound.
pub const TAIL_SAFETY: f64 = 10.0;

/// Default cap on enumerated lattice points per evaluation.
pub const POINT_BUDGET: usize = 10_000_000;

/// Default finite difference step.
pub const FD_STEP: f64 = 1e-4;
