//! Basic q-calculus on an interval `[a, b]`: the q-derivative anchored at `a`,
//! the Jackson q-integral, and the classical oracles they converge to as
//! `q -> 1`.
//!
//! Every series here is summed over the geometric lattice `a + q^k (x - a)`,
//! `k = 0, 1, 2, ...`, with `q^k` produced by repeated multiplication so that
//! all callers see bit-identical nodes.

mod derivative;
mod integral;
mod oracle;

pub use derivative::{q_derivative, q_derivative_at_a, q_derivative_limit, LimitEstimate};
pub use integral::{jackson_integral, jackson_integral_sub};
pub use oracle::{classical_derivative_fd, riemann_integral_oracle};

use crate::error::{QError, Result};

/// Deformation parameter `q` together with the interval `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    a: f64,
    b: f64,
}

impl QContext {
    /// Requires `0 < q < 1` and finite `a < b`.
    pub fn new(q: f64, a: f64, b: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QError::InvalidParameter(format!(
                "q must lie strictly between 0 and 1, got {q}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(QError::InvalidParameter(format!(
                "interval must satisfy a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { q, a, b })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Same interval, different `q`.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(q, self.a, self.b)
    }

    /// Lattice point `a + q^k (b - a)`, with `q^k` by repeated multiplication.
    pub fn node(&self, k: usize) -> f64 {
        self.a + q_pow(self.q, k) * self.width()
    }
}

/// `q^k` by repeated multiplication, matching the iteration used by the
/// series loops.
pub(crate) fn q_pow(q: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..k {
        p *= q;
    }
    p
}

/// Truncation policy for the infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    tol: f64,
    max_terms: usize,
    consecutive_small: usize,
}

impl SeriesControl {
    pub const DEFAULT_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 1_000_000;
    pub const DEFAULT_CONSECUTIVE_SMALL: usize = 3;

    pub fn new(tol: f64, max_terms: usize, consecutive_small: usize) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "tolerance must be positive and finite, got {tol}"
            )));
        }
        if max_terms == 0 {
            return Err(QError::InvalidParameter(
                "max_terms must be at least 1".into(),
            ));
        }
        if consecutive_small == 0 {
            return Err(QError::InvalidParameter(
                "consecutive_small must be at least 1".into(),
            ));
        }
        Ok(Self {
            tol,
            max_terms,
            consecutive_small,
        })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn consecutive_small(&self) -> usize {
        self.consecutive_small
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
            consecutive_small: Self::DEFAULT_CONSECUTIVE_SMALL,
        }
    }
}

/// Truncated value of an infinite series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Geometric bound on the neglected tail, `|last term| * q / (1 - q)`.
    pub tail_estimate: f64,
    pub converged: bool,
}

impl SeriesResult {
    pub(crate) fn empty() -> Self {
        Self {
            value: 0.0,
            terms_used: 0,
            tail_estimate: 0.0,
            converged: true,
        }
    }
}

/// Stopping rule shared by the series loops: stop once `needed` successive
/// terms fall below `tol * (1 - q)` in magnitude.
#[derive(Debug)]
pub(crate) struct StopRule {
    threshold: f64,
    needed: usize,
    run: usize,
}

impl StopRule {
    pub(crate) fn new(control: &SeriesControl, q: f64) -> Self {
        Self {
            threshold: control.tol * (1.0 - q),
            needed: control.consecutive_small,
            run: 0,
        }
    }

    /// Records one term; returns true when the series may stop.
    pub(crate) fn observe(&mut self, term: f64) -> bool {
        if term.abs() < self.threshold {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= self.needed
    }
}

pub(crate) fn tail_bound(last_term: f64, q: f64) -> f64 {
    last_term.abs() * q / (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_bad_parameters() {
        assert!(QContext::new(0.0, 0.0, 1.0).is_err());
        assert!(QContext::new(1.0, 0.0, 1.0).is_err());
        assert!(QContext::new(-0.5, 0.0, 1.0).is_err());
        assert!(QContext::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(QContext::new(0.5, 1.0, 1.0).is_err());
        assert!(QContext::new(0.5, 2.0, 1.0).is_err());
        assert!(QContext::new(0.5, 0.0, f64::INFINITY).is_err());
        assert!(QContext::new(0.5, 0.0, 1.0).is_ok());
    }

    #[test]
    fn control_rejects_bad_parameters() {
        assert!(SeriesControl::new(0.0, 10, 1).is_err());
        assert!(SeriesControl::new(-1.0, 10, 1).is_err());
        assert!(SeriesControl::new(1e-9, 0, 1).is_err());
        assert!(SeriesControl::new(1e-9, 10, 0).is_err());
        let c = SeriesControl::default();
        assert_eq!(c.tol(), 1e-12);
        assert_eq!(c.max_terms(), 1_000_000);
        assert_eq!(c.consecutive_small(), 3);
    }

    #[test]
    fn nodes_follow_iterated_powers() {
        let ctx = QContext::new(0.5, 2.0, 4.0).unwrap();
        assert_eq!(ctx.node(0), 4.0);
        assert_eq!(ctx.node(1), 3.0);
        assert_eq!(ctx.node(2), 2.5);
    }

    #[test]
    fn stop_rule_needs_a_run() {
        let control = SeriesControl::new(1.0, 10, 2).unwrap();
        let mut rule = StopRule::new(&control, 0.5);
        assert!(!rule.observe(0.1));
        assert!(!rule.observe(0.9));
        assert!(!rule.observe(0.1));
        assert!(rule.observe(0.0));
    }
}
