use crate::error::{QError, Result};
use crate::qcore::{q_derivative, q_derivative_limit, QContext, SeriesControl};
use crate::realfn::RealFn;

/// A grid point where `lhs` exceeds the convex-combination bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub lhs: f64,
    pub bound: f64,
}

/// Grid check of the convexity step for `|D_q f|^r`.
///
/// The corrected bound is `t |D_q f(b)|^r + (1 - t) |D_q f(a)|^r`; the
/// erroneous one has the endpoint values exchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub r: f64,
    pub t_grid: Vec<f64>,
    pub derivative_at_a: f64,
    pub derivative_at_b: f64,
    /// Absolute slack below which a bound counts as satisfied.
    pub tol: f64,
    pub corrected_violations: Vec<Violation>,
    pub erroneous_violations: Vec<Violation>,
}

/// Checks `|D_q f(t b + (1 - t) a)|^r` against both bounds on `t_grid`.
///
/// `D_q f(a)` comes from the lattice limit and `D_q f(b)` from the quotient at
/// `b`. A point is a violation when `lhs > bound + slack`, where the slack
/// combines `tol` (scaled by the magnitudes involved) with the first-order
/// effect of the error in the limit `D_q f(a)`.
pub fn convexity_step_check(
    f: &RealFn,
    ctx: &QContext,
    r: f64,
    t_grid: &[f64],
    control: &SeriesControl,
) -> Result<ConvexityReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(QError::InvalidParameter(format!(
            "exponent r must be >= 1, got {r}"
        )));
    }
    if let Some(&t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(QError::domain(format!(
            "grid point t = {t} is outside [0, 1]"
        )));
    }
    let (a, b) = (ctx.a(), ctx.b());
    let limit = q_derivative_limit(f, ctx, control)?;
    let da = limit.value;
    let db = q_derivative(f, ctx, b)?;
    let pa = da.abs().powf(r);
    let pb = db.abs().powf(r);
    // d/dD |D|^r = r |D|^{r-1}
    let limit_slack = r * da.abs().powf(r - 1.0) * limit.error;

    let mut corrected_violations = Vec::new();
    let mut erroneous_violations = Vec::new();
    for &t in t_grid {
        let point = (t * b + (1.0 - t) * a).min(b);
        let lhs = if point > a {
            q_derivative(f, ctx, point)?.abs().powf(r)
        } else {
            pa
        };
        let corrected = t * pb + (1.0 - t) * pa;
        let erroneous = t * pa + (1.0 - t) * pb;
        for (bound, weight_a, out) in [
            (corrected, 1.0 - t, &mut corrected_violations),
            (erroneous, t, &mut erroneous_violations),
        ] {
            let slack = control.tol() * (1.0 + lhs.abs().max(bound.abs())) + weight_a * limit_slack;
            if lhs > bound + slack {
                out.push(Violation { t, lhs, bound });
            }
        }
    }
    Ok(ConvexityReport {
        r,
        t_grid: t_grid.to_vec(),
        derivative_at_a: da,
        derivative_at_b: db,
        tol: control.tol(),
        corrected_violations,
        erroneous_violations,
    })
}

/// `n` evenly spaced points covering `[0, 1]`, both ends included.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}
