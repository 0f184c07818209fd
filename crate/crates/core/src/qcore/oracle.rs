//! Classical calculus references for the `q -> 1` limits.

use crate::error::{QError, Result};
use crate::realfn::RealFn;

/// Central difference `(f(x + h) - f(x - h)) / (2h)`.
pub fn classical_derivative_fd(f: &RealFn, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(QError::InvalidParameter(format!(
            "step must be positive, got {h}"
        )));
    }
    Ok((f.eval(x + h)? - f.eval(x - h)?) / (2.0 * h))
}

/// Composite Simpson rule on `[a, x]` with `n` panels (`n` even).
pub fn riemann_integral_oracle(f: &RealFn, a: f64, x: f64, n: usize) -> Result<f64> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(QError::InvalidParameter(format!(
            "Simpson rule needs a positive even panel count, got {n}"
        )));
    }
    if a.is_nan() || x.is_nan() || a >= x {
        return Err(QError::domain(format!(
            "Simpson rule needs a < x, got [{a}, {x}]"
        )));
    }
    let h = (x - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let y = f.eval(a + i as f64 * h)?;
        if i % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    Ok(h / 3.0 * (f.eval(a)? + 4.0 * odd + 2.0 * even + f.eval(x)?))
}
