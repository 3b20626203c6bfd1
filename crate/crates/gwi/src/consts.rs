//! Centralized tolerance constants.

/// Tolerance for structural checks (normalization, unit Bloch vectors,
/// hermiticity, trace).
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Tolerance for numerical results (expectation values, probabilities).
pub const NUMERICAL_TOL: f64 = 1e-10;

/// Default tolerance on LP constraint residuals.
pub const LP_TOL: f64 = 1e-9;

/// Density-matrix eigenvalues may dip this far below zero before a state is
/// rejected as non-positive.
pub const EIGENVALUE_TOL: f64 = 1e-10;
