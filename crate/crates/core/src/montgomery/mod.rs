//! The Montgomery kernel on the q-lattice and both forms of the quantum
//! Montgomery identity.
//!
//! The kernel-weighted q-integral of `D_q f` telescopes to
//! `f(a + q^{m+1}(b - a)) - (1/(b - a)) * int_a^b f d_q t`, where `m` is the
//! lattice index bracketing `x`. The right-hand side therefore matches
//! `f(x)` minus the q-average only when `x` is itself a lattice node; the
//! corrected identity evaluates `f` at the projected node instead.

mod convexity;
mod identity;

pub use convexity::{convexity_step_check, unit_grid, ConvexityReport, Violation};
pub use identity::{
    check_identity, corrected_lhs, montgomery_rhs, original_lhs, residual_scan,
    residual_scan_sequential, IdentityReport,
};

use crate::error::{QError, Result};
use crate::qcore::{QContext, SeriesControl};

/// Relative tie tolerance when comparing `q^{m+1}` with `(x - a)/(b - a)`.
/// Points within this distance of a lattice node are treated as the node.
pub const NODE_TIE_TOLERANCE: f64 = 1e-12;

/// Absolute tie width for the ratio `(x - a)/(b - a)`: the relative tolerance,
/// or the rounding error of `x - a` when that is larger (deep nodes next to a
/// nonzero `a`).
pub fn node_tie_width(ctx: &QContext, x: f64) -> f64 {
    let ratio = (x - ctx.a()) / ctx.width();
    let rounding = 4.0 * f64::EPSILON * x.abs().max(ctx.a().abs()) / ctx.width();
    (NODE_TIE_TOLERANCE * ratio).max(rounding)
}

/// Lattice index `m >= 0` with `q^{m+1} <= (x - a)/(b - a) < q^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeIndex {
    pub m: usize,
    /// `q^{m+1}`, obtained by the same repeated multiplication as the series.
    pub node_power: f64,
}

fn interior_ratio(ctx: &QContext, x: f64) -> Result<f64> {
    if !(x > ctx.a() && x < ctx.b()) {
        return Err(QError::domain(format!(
            "x must lie in the open interval ({}, {}), got {x}",
            ctx.a(),
            ctx.b()
        )));
    }
    Ok((x - ctx.a()) / ctx.width())
}

/// Montgomery kernel: `q t` for `0 <= t <= (x - a)/(b - a)`, `q t - 1` above.
pub fn kernel_eval(ctx: &QContext, x: f64, t: f64) -> Result<f64> {
    let ratio = interior_ratio(ctx, x)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(QError::domain(format!(
            "kernel argument must lie in [0, 1], got {t}"
        )));
    }
    let qt = ctx.q() * t;
    Ok(if t <= ratio { qt } else { qt - 1.0 })
}

/// Lattice index of `x`, searched up to [`SeriesControl::DEFAULT_MAX_TERMS`].
pub fn m_index(ctx: &QContext, x: f64) -> Result<NodeIndex> {
    m_index_capped(ctx, x, SeriesControl::DEFAULT_MAX_TERMS)
}

/// Lattice index of `x` by repeated multiplication of `q`.
///
/// Returns [`QError::Cap`] when `m` would exceed `cap`.
pub fn m_index_capped(ctx: &QContext, x: f64, cap: usize) -> Result<NodeIndex> {
    let ratio = interior_ratio(ctx, x)?;
    let q = ctx.q();
    let target = ratio + node_tie_width(ctx, x);
    let mut power = q;
    let mut m = 0;
    while power > target {
        if m >= cap {
            return Err(QError::Cap { cap });
        }
        power *= q;
        m += 1;
    }
    Ok(NodeIndex {
        m,
        node_power: power,
    })
}

/// Projection of `x` onto the lattice: `a + q^{m+1}(b - a)`.
pub fn q_node(ctx: &QContext, x: f64) -> Result<f64> {
    let idx = m_index(ctx, x)?;
    Ok(node_from_index(ctx, &idx))
}

pub(crate) fn node_from_index(ctx: &QContext, idx: &NodeIndex) -> f64 {
    ctx.a() + idx.node_power * ctx.width()
}
