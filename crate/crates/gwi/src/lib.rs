//! Construction, evaluation and optimization of generalized Wigner
//! inequalities for N-partite qubit systems.
//!
//! The crate covers the full pipeline: building the inequality as a symbolic
//! expression over joint probabilities, expanding it exactly into correlator
//! form, evaluating either form on pure or noisy quantum states, certifying
//! the local-realist bound by exhaustive enumeration of deterministic
//! hidden-variable strategies, deciding joint-probability-distribution
//! feasibility by linear programming, and maximizing the quantum violation
//! over measurement angles.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod consts;
pub mod error;
pub mod expression;
pub mod lhv;
pub mod observables;
pub mod optimize;
pub mod qstate;
pub mod report;
mod simplex;

pub use error::GwiError;
pub use expression::{build_gwi, build_gwi_signed, build_wigner_original, InequalityExpression};
pub use observables::{Plane, SettingSet};
pub use qstate::{MixedState, Observable, PureState, QState, Sign};
