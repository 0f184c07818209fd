use super::{tail_bound, QContext, SeriesControl, SeriesResult, StopRule};
use crate::error::{QError, Result};
use crate::realfn::RealFn;

/// Jackson q-integral over `[a, x]`:
/// `(1 - q)(x - a) * sum_{k >= 0} q^k f(a + q^k (x - a))`.
///
/// Hitting `max_terms` is not an error; the result comes back with
/// `converged == false`.
pub fn jackson_integral(
    f: &RealFn,
    ctx: &QContext,
    x: f64,
    control: &SeriesControl,
) -> Result<SeriesResult> {
    let (a, q) = (ctx.a(), ctx.q());
    if !(x >= a && x <= ctx.b()) {
        return Err(QError::domain(format!(
            "Jackson integral needs a <= x <= b, got x = {x} on [{a}, {}]",
            ctx.b()
        )));
    }
    if x == a {
        return Ok(SeriesResult::empty());
    }

    let h = x - a;
    let prefactor = (1.0 - q) * h;
    let mut rule = StopRule::new(control, q);
    let mut sum = 0.0;
    let mut p = 1.0;
    let mut last = 0.0;
    for k in 0..control.max_terms() {
        let node = if k == 0 { x } else { a + p * h };
        let weighted = p * f.eval(node)?;
        sum += weighted;
        last = prefactor * weighted;
        if rule.observe(last) {
            return Ok(SeriesResult {
                value: prefactor * sum,
                terms_used: k + 1,
                tail_estimate: tail_bound(last, q),
                converged: true,
            });
        }
        p *= q;
    }
    Ok(SeriesResult {
        value: prefactor * sum,
        terms_used: control.max_terms(),
        tail_estimate: tail_bound(last, q),
        converged: false,
    })
}

/// q-integral over `[c, x]` with `a < c < x <= b`, defined as the difference
/// of the two integrals anchored at `a`. It therefore samples `f` below `c`.
pub fn jackson_integral_sub(
    f: &RealFn,
    ctx: &QContext,
    c: f64,
    x: f64,
    control: &SeriesControl,
) -> Result<SeriesResult> {
    let a = ctx.a();
    if !(a < c && c < x && x <= ctx.b()) {
        return Err(QError::domain(format!(
            "subinterval integral needs a < c < x <= b, got c = {c}, x = {x} on [{a}, {}]",
            ctx.b()
        )));
    }
    let upper = jackson_integral(f, ctx, x, control)?;
    let lower = jackson_integral(f, ctx, c, control)?;
    Ok(SeriesResult {
        value: upper.value - lower.value,
        terms_used: upper.terms_used.max(lower.terms_used),
        tail_estimate: upper.tail_estimate + lower.tail_estimate,
        converged: upper.converged && lower.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: f64, a: f64, b: f64) -> QContext {
        QContext::new(q, a, b).unwrap()
    }

    /// Brute-force partial sum with `powi` nodes, independent of the loop above.
    fn partial_sum(f: impl Fn(f64) -> f64, q: f64, a: f64, x: f64, n: i32) -> f64 {
        (0..n)
            .map(|k| q.powi(k) * f(a + q.powi(k) * (x - a)))
            .sum::<f64>()
            * (1.0 - q)
            * (x - a)
    }

    #[test]
    fn constant_integrates_to_length() {
        let r = jackson_integral(
            &RealFn::constant(1.0),
            &ctx(0.5, 0.0, 1.0),
            1.0,
            &Default::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_integrates_to_two_thirds() {
        let f = RealFn::new("t", |t| t);
        let r = jackson_integral(&f, &ctx(0.5, 0.0, 1.0), 1.0, &Default::default()).unwrap();
        let oracle = partial_sum(|t| t, 0.5, 0.0, 1.0, 200);
        assert!((oracle - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn monomials_match_geometric_closed_form() {
        for q in [0.3, 0.7] {
            for n in 1..=5 {
                let f = RealFn::new("t^n", move |t: f64| t.powi(n));
                let r = jackson_integral(&f, &ctx(q, 0.0, 1.0), 1.0, &Default::default()).unwrap();
                let closed = (1.0 - q) / (1.0 - q.powi(n + 1));
                let oracle = partial_sum(|t| t.powi(n), q, 0.0, 1.0, 2000);
                assert!((oracle - closed).abs() < 1e-14, "q={q} n={n}");
                assert!((r.value - closed).abs() < 1e-10, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn zero_length_interval() {
        let f = RealFn::new("t", |t| t);
        let r = jackson_integral(&f, &ctx(0.5, 1.0, 2.0), 1.0, &Default::default()).unwrap();
        assert_eq!(r, SeriesResult::empty());
    }

    #[test]
    fn out_of_range_upper_limit() {
        let f = RealFn::new("t", |t| t);
        let c = ctx(0.5, 0.0, 1.0);
        assert!(matches!(
            jackson_integral(&f, &c, 1.5, &Default::default()),
            Err(QError::Domain(_))
        ));
        assert!(matches!(
            jackson_integral(&f, &c, -0.5, &Default::default()),
            Err(QError::Domain(_))
        ));
    }

    #[test]
    fn term_cap_reports_non_convergence() {
        let f = RealFn::constant(1.0);
        let control = SeriesControl::new(1e-12, 10, 3).unwrap();
        let r = jackson_integral(&f, &ctx(0.9, 0.0, 1.0), 1.0, &control).unwrap();
        assert!(!r.converged);
        assert_eq!(r.terms_used, 10);
        assert!(r.tail_estimate > 0.0);
    }

    #[test]
    fn tail_estimate_is_geometric_bound() {
        let f = RealFn::new("t", |t| t);
        let r = jackson_integral(&f, &ctx(0.5, 0.0, 1.0), 1.0, &Default::default()).unwrap();
        assert!(r.tail_estimate >= 0.0);
        assert!(r.tail_estimate <= 1e-12);
        assert!((r.value - 2.0 / 3.0).abs() <= r.tail_estimate + 1e-15);
    }

    #[test]
    fn eval_error_propagates() {
        // second node is t = 0
        let f = RealFn::new("ln", f64::ln);
        let r = jackson_integral(&f, &ctx(0.5, -1.0, 1.0), 1.0, &Default::default());
        assert!(matches!(r, Err(QError::Eval(_))));
    }

    #[test]
    fn subinterval_constant() {
        let r = jackson_integral_sub(
            &RealFn::constant(1.0),
            &ctx(0.5, 0.0, 1.0),
            0.25,
            0.75,
            &Default::default(),
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subinterval_identity() {
        // c^2 / (1 + q) below, 1 / (1 + q) above
        let f = RealFn::new("t", |t| t);
        let r =
            jackson_integral_sub(&f, &ctx(0.5, 0.0, 1.0), 0.5, 1.0, &Default::default()).unwrap();
        let oracle =
            partial_sum(|t| t, 0.5, 0.0, 1.0, 200) - partial_sum(|t| t, 0.5, 0.0, 0.5, 200);
        assert!((oracle - 0.5).abs() < 1e-15);
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn subinterval_sees_values_below_c() {
        // c must not be a node of the [a, x] lattice, otherwise both lattices
        // coincide below c and the two integrals agree
        let (c, x) = (0.4, 1.0);
        let zero = RealFn::constant(0.0);
        let ramp = RealFn::new("max(0, c - t)", move |t: f64| (c - t).max(0.0));
        let cx = ctx(0.5, 0.0, 1.0);
        let control = SeriesControl::default();
        let r0 = jackson_integral_sub(&zero, &cx, c, x, &control).unwrap();
        let r1 = jackson_integral_sub(&ramp, &cx, c, x, &control).unwrap();
        let oracle = partial_sum(|t| (c - t).max(0.0), 0.5, 0.0, x, 200)
            - partial_sum(|t| (c - t).max(0.0), 0.5, 0.0, c, 200);
        assert_eq!(r0.value, 0.0);
        assert!((r1.value - oracle).abs() < 1e-12);
        assert!((r1.value - r0.value).abs() > control.tol());
    }

    #[test]
    fn subinterval_requires_ordered_limits() {
        let f = RealFn::constant(1.0);
        let c = ctx(0.5, 0.0, 1.0);
        let control = SeriesControl::default();
        assert!(jackson_integral_sub(&f, &c, 0.0, 0.5, &control).is_err());
        assert!(jackson_integral_sub(&f, &c, 0.6, 0.5, &control).is_err());
        assert!(jackson_integral_sub(&f, &c, 0.5, 0.5, &control).is_err());
        assert!(jackson_integral_sub(&f, &c, 0.5, 1.5, &control).is_err());
    }
}
