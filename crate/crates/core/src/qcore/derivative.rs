use super::{QContext, SeriesControl};
use crate::error::{QError, Result};
use crate::realfn::RealFn;

/// q-derivative anchored at `a`:
/// `(f(x) - f(a + q (x - a))) / ((1 - q) (x - a))` for `a < x <= b`.
pub fn q_derivative(f: &RealFn, ctx: &QContext, x: f64) -> Result<f64> {
    let (a, q) = (ctx.a(), ctx.q());
    if !(x > a && x <= ctx.b()) {
        return Err(QError::domain(format!(
            "q-derivative needs a < x <= b, got x = {x} on [{a}, {}]",
            ctx.b()
        )));
    }
    let h = x - a;
    let inner = a + q * h;
    Ok((f.eval(x)? - f.eval(inner)?) / ((1.0 - q) * h))
}

/// Result of the limit `D_q f(a) = lim_{x -> a} D_q f(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// Last successive difference accepted by the stopping rule.
    pub error: f64,
    pub iterations: usize,
}

/// `D_q f(a)` as the limit of `D_q f` along `a + (b - a) q^j`, `j = 1, 2, ...`.
pub fn q_derivative_at_a(f: &RealFn, ctx: &QContext, control: &SeriesControl) -> Result<f64> {
    q_derivative_limit(f, ctx, control).map(|est| est.value)
}

/// Same limit as [`q_derivative_at_a`], with the accepted difference and the
/// iteration count.
///
/// Successive iterates are compared against `tol`, or against the rounding
/// floor of the difference quotient when that is larger: close to `a` the
/// numerator cancels and the quotient carries noise of order
/// `eps * (|f| + |x| |D_q f|) / ((1 - q)(x - a))`, which no absolute
/// tolerance can beat.
pub fn q_derivative_limit(
    f: &RealFn,
    ctx: &QContext,
    control: &SeriesControl,
) -> Result<LimitEstimate> {
    const NOISE_FACTOR: f64 = 8.0;
    let (a, q, width) = (ctx.a(), ctx.q(), ctx.width());

    let mut p = 1.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut run = 0;
    for j in 1..=control.max_terms() {
        p *= q;
        let x = a + width * p;
        let h = x - a;
        if h <= 0.0 {
            return Err(QError::Convergence {
                iterations: j - 1,
                message: format!("lattice collapsed onto a = {a} before the limit settled"),
            });
        }
        let inner = a + q * h;
        let (fx, fi) = (f.eval(x)?, f.eval(inner)?);
        let d = (fx - fi) / ((1.0 - q) * h);
        // rounding in the two values of f, plus the rounding of the two
        // sample positions (about eps * |x| each) carried through the slope
        let scale = (1.0 - q) * h;
        let noise = f64::EPSILON
            * ((fx.abs() + fi.abs()) / scale
                + d.abs() * (1.0 + 2.0 * x.abs().max(a.abs()) / scale));
        if !d.is_finite() {
            return Err(QError::Convergence {
                iterations: j,
                message: format!("difference quotient overflowed at x = {x:e}"),
            });
        }
        if let Some((d_prev, noise_prev)) = prev {
            let diff = (d - d_prev).abs();
            let threshold = control.tol().max(NOISE_FACTOR * (noise + noise_prev));
            if diff < threshold {
                run += 1;
                if run >= control.consecutive_small() {
                    return Ok(LimitEstimate {
                        value: d,
                        error: diff,
                        iterations: j,
                    });
                }
            } else {
                run = 0;
            }
        }
        prev = Some((d, noise));
    }
    Err(QError::Convergence {
        iterations: control.max_terms(),
        message: "successive q-derivative iterates did not settle".into(),
    })
}
