//! Numerical q-calculus on an interval: the q-derivative, the Jackson
//! q-integral, and the quantum Montgomery identity in its original and
//! lattice-corrected forms.
//!
//! ```
//! use qmont_core::{check_identity, QContext, RealFn, SeriesControl};
//!
//! let ctx = QContext::new(0.5, 0.0, 1.0).unwrap();
//! let f = RealFn::new("t", |t| t);
//! let report = check_identity(&f, &ctx, 0.3, &SeriesControl::default()).unwrap();
//! assert_eq!(report.node, 0.25);
//! assert!(report.residual_corrected.abs() < 1e-10);
//! assert!((report.residual_original - 0.05).abs() < 1e-10);
//! ```

pub mod error;
pub mod funcexpr;
pub mod montgomery;
mod par;
pub mod qcore;
pub mod realfn;

pub use error::{EvalError, QError, Result};
pub use funcexpr::{as_realfn, parse, Expr, SyntaxError};
pub use montgomery::{
    check_identity, convexity_step_check, corrected_lhs, kernel_eval, m_index, m_index_capped,
    montgomery_rhs, node_tie_width, original_lhs, q_node, residual_scan, residual_scan_sequential,
    unit_grid, ConvexityReport, IdentityReport, NodeIndex, Violation,
};
pub use qcore::{
    classical_derivative_fd, jackson_integral, jackson_integral_sub, q_derivative,
    q_derivative_at_a, q_derivative_limit, riemann_integral_oracle, LimitEstimate, QContext,
    SeriesControl, SeriesResult,
};
pub use realfn::RealFn;
