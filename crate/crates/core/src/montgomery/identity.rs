use super::{interior_ratio, m_index_capped, node_from_index, NodeIndex};
use crate::error::{QError, Result};
use crate::par;
use crate::qcore::{jackson_integral, tail_bound, QContext, SeriesControl, SeriesResult, StopRule};
use crate::realfn::RealFn;

/// Kernel-weighted q-integral `(b - a) int_0^1 K(t) D_q f(a + t(b - a)) d_q t`,
/// expanded over the lattice as
/// `(b - a)(1 - q) sum_k q^k K(q^k) D_q f(a + q^k (b - a))`.
///
/// The kernel branch at `t = q^k` is picked by comparing `k` with the lattice
/// index of `x` (`q^{k+1} - 1` for `k <= m`, `q^{k+1}` after), never by
/// comparing floats against the breakpoint.
pub fn montgomery_rhs(
    f: &RealFn,
    ctx: &QContext,
    x: f64,
    control: &SeriesControl,
) -> Result<SeriesResult> {
    let idx = m_index_capped(ctx, x, control.max_terms())?;
    rhs_series(f, ctx, &idx, control)
}

fn rhs_series(
    f: &RealFn,
    ctx: &QContext,
    idx: &NodeIndex,
    control: &SeriesControl,
) -> Result<SeriesResult> {
    let (a, b, q) = (ctx.a(), ctx.b(), ctx.q());
    let width = ctx.width();
    let prefactor = width * (1.0 - q);
    let mut rule = StopRule::new(control, q);
    let mut sum = 0.0;
    let mut p = 1.0;
    let mut last = 0.0;
    for k in 0..control.max_terms() {
        let node = if k == 0 { b } else { a + p * width };
        let h = node - a;
        if h <= 0.0 {
            return Err(QError::Convergence {
                iterations: k,
                message: format!("lattice collapsed onto a = {a} before the series settled"),
            });
        }
        let dq = (f.eval(node)? - f.eval(a + q * h)?) / ((1.0 - q) * h);
        let kernel = if k <= idx.m { q * p - 1.0 } else { q * p };
        let weighted = p * kernel * dq;
        sum += weighted;
        last = prefactor * weighted;
        // the stopping rule only applies once the kernel is on its tail branch
        if rule.observe(last) && k > idx.m {
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

fn average(f: &RealFn, ctx: &QContext, control: &SeriesControl) -> Result<(f64, SeriesResult)> {
    let series = jackson_integral(f, ctx, ctx.b(), control)?;
    Ok((series.value / ctx.width(), series))
}

/// `f(x) - (1/(b - a)) int_a^b f d_q t`, the left side of the uncorrected
/// identity.
pub fn original_lhs(f: &RealFn, ctx: &QContext, x: f64, control: &SeriesControl) -> Result<f64> {
    interior_ratio(ctx, x)?;
    let (avg, _) = average(f, ctx, control)?;
    Ok(f.eval(x)? - avg)
}

/// `f(q_node(x)) - (1/(b - a)) int_a^b f d_q t`, the left side of the
/// corrected identity.
pub fn corrected_lhs(f: &RealFn, ctx: &QContext, x: f64, control: &SeriesControl) -> Result<f64> {
    let idx = m_index_capped(ctx, x, control.max_terms())?;
    let (avg, _) = average(f, ctx, control)?;
    Ok(f.eval(node_from_index(ctx, &idx))? - avg)
}

/// Both identities evaluated at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub x: f64,
    pub m: usize,
    /// Projected lattice point `a + q^{m+1}(b - a)`.
    pub node: f64,
    /// `(1/(b - a)) int_a^b f d_q t`.
    pub avg_integral: f64,
    pub lhs_original: f64,
    pub lhs_corrected: f64,
    pub rhs: f64,
    pub residual_original: f64,
    pub residual_corrected: f64,
    /// Series behind `rhs`.
    pub series: SeriesResult,
    /// Series behind `avg_integral`.
    pub avg_series: SeriesResult,
    /// Pass/fail threshold for the residuals:
    /// `100 * max(tail estimates, tol)`.
    pub tolerance: f64,
}

impl IdentityReport {
    pub fn converged(&self) -> bool {
        self.series.converged && self.avg_series.converged
    }

    pub fn corrected_holds(&self) -> bool {
        self.residual_corrected.abs() <= self.tolerance
    }

    pub fn original_holds(&self) -> bool {
        self.residual_original.abs() <= self.tolerance
    }

    /// The amount the uncorrected identity is off by, `f(x) - f(node)`.
    pub fn failure_amount(&self) -> f64 {
        self.lhs_original - self.lhs_corrected
    }
}

/// Evaluates both identities at `x` with one average and one kernel series.
pub fn check_identity(
    f: &RealFn,
    ctx: &QContext,
    x: f64,
    control: &SeriesControl,
) -> Result<IdentityReport> {
    let idx = m_index_capped(ctx, x, control.max_terms())?;
    let node = node_from_index(ctx, &idx);
    let (avg_integral, avg_series) = average(f, ctx, control)?;
    let series = rhs_series(f, ctx, &idx, control)?;

    let lhs_original = f.eval(x)? - avg_integral;
    let lhs_corrected = f.eval(node)? - avg_integral;
    let rhs = series.value;
    let tolerance = 100.0
        * series
            .tail_estimate
            .max(avg_series.tail_estimate)
            .max(control.tol());
    Ok(IdentityReport {
        x,
        m: idx.m,
        node,
        avg_integral,
        lhs_original,
        lhs_corrected,
        rhs,
        residual_original: lhs_original - rhs,
        residual_corrected: lhs_corrected - rhs,
        series,
        avg_series,
        tolerance,
    })
}

/// [`check_identity`] over a grid of points. Order is preserved and a failing
/// point does not stop the scan. Runs on the rayon pool when the `parallel`
/// feature is enabled.
pub fn residual_scan(
    f: &RealFn,
    ctx: &QContext,
    xs: &[f64],
    control: &SeriesControl,
) -> Vec<Result<IdentityReport>> {
    par::map_ordered(xs, |&x| check_identity(f, ctx, x, control))
}

/// Single-threaded [`residual_scan`].
pub fn residual_scan_sequential(
    f: &RealFn,
    ctx: &QContext,
    xs: &[f64],
    control: &SeriesControl,
) -> Vec<Result<IdentityReport>> {
    xs.iter()
        .map(|&x| check_identity(f, ctx, x, control))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montgomery::kernel_eval;

    fn ctx(q: f64, a: f64, b: f64) -> QContext {
        QContext::new(q, a, b).unwrap()
    }

    fn id() -> RealFn {
        RealFn::new("t", |t| t)
    }

    /// Direct lattice sum with `powi`, kernel from the float comparison,
    /// D_q f from its quotient; up to 400 terms, until the nodes reach `a`.
    fn rhs_oracle(f: impl Fn(f64) -> f64, q: f64, a: f64, b: f64, x: f64) -> f64 {
        let ratio = (x - a) / (b - a);
        (0..400)
            .take_while(|&k| a + q.powi(k) * (b - a) > a)
            .map(|k| {
                let t = q.powi(k);
                let kern = if t <= ratio { q * t } else { q * t - 1.0 };
                let node = a + t * (b - a);
                let d = (f(node) - f(a + q * (node - a))) / ((1.0 - q) * (node - a));
                t * kern * d
            })
            .sum::<f64>()
            * (b - a)
            * (1.0 - q)
    }

    #[test]
    fn rhs_worked_example() {
        let c = ctx(0.5, 0.0, 1.0);
        let oracle = rhs_oracle(|t| t, 0.5, 0.0, 1.0, 0.3);
        assert!((oracle + 5.0 / 12.0).abs() < 1e-14);
        let r = montgomery_rhs(&id(), &c, 0.3, &Default::default()).unwrap();
        assert!(r.converged);
        assert!((r.value + 5.0 / 12.0).abs() < 1e-10, "{}", r.value);
        // same lattice index, same series
        let r25 = montgomery_rhs(&id(), &c, 0.25, &Default::default()).unwrap();
        assert_eq!(r.value, r25.value);
    }

    #[test]
    fn rhs_of_constant_vanishes() {
        let f = RealFn::constant(2.5);
        let r = montgomery_rhs(&f, &ctx(0.6, -1.0, 3.0), 0.7, &Default::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn rhs_matches_oracle_for_smooth_functions() {
        for (q, a, b, x) in [
            (0.5, 0.0, 1.0, 0.7),
            (0.3, 2.0, 4.0, 2.2),
            (0.8, -1.0, 1.0, 0.1),
        ] {
            let f = RealFn::new("exp", f64::exp);
            let r = montgomery_rhs(&f, &ctx(q, a, b), x, &Default::default()).unwrap();
            let oracle = rhs_oracle(f64::exp, q, a, b, x);
            assert!(
                (r.value - oracle).abs() < 1e-10,
                "q={q} x={x}: {} vs {oracle}",
                r.value
            );
        }
    }

    #[test]
    fn lhs_examples() {
        let c = ctx(0.5, 0.0, 1.0);
        let control = SeriesControl::default();
        let o = original_lhs(&id(), &c, 0.3, &control).unwrap();
        assert!((o - (0.3 - 2.0 / 3.0)).abs() < 1e-12);
        let o25 = original_lhs(&id(), &c, 0.25, &control).unwrap();
        assert!((o25 + 5.0 / 12.0).abs() < 1e-12);
        let k = corrected_lhs(&id(), &c, 0.3, &control).unwrap();
        assert!((k + 5.0 / 12.0).abs() < 1e-12);
        assert_eq!(corrected_lhs(&id(), &c, 0.25, &control).unwrap(), o25);
        let f = RealFn::constant(-4.0);
        assert!(original_lhs(&f, &c, 0.3, &control).unwrap().abs() < 1e-12);
        assert!(corrected_lhs(&f, &c, 0.3, &control).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lhs_requires_interior_point() {
        let c = ctx(0.5, 0.0, 1.0);
        assert!(original_lhs(&id(), &c, 1.0, &Default::default()).is_err());
        assert!(corrected_lhs(&id(), &c, 0.0, &Default::default()).is_err());
    }

    #[test]
    fn check_identity_worked_example() {
        let rep = check_identity(&id(), &ctx(0.5, 0.0, 1.0), 0.3, &Default::default()).unwrap();
        assert_eq!(rep.node, 0.25);
        assert_eq!(rep.m, 1);
        assert!(rep.converged());
        assert!(rep.residual_corrected.abs() < 1e-10);
        assert!((rep.residual_original - 0.05).abs() < 1e-10);
        assert!(rep.corrected_holds());
        assert!(!rep.original_holds());
        assert_eq!(rep.residual_original, rep.lhs_original - rep.rhs);
        assert_eq!(rep.residual_corrected, rep.lhs_corrected - rep.rhs);
    }

    #[test]
    fn check_identity_at_node_and_for_constants() {
        let c = ctx(0.4, 1.0, 2.0);
        let f = RealFn::new("sin", f64::sin);
        let rep = check_identity(&f, &c, c.node(3), &Default::default()).unwrap();
        assert!(rep.residual_original.abs() < 1e-10);
        let g = RealFn::constant(9.0);
        let rep = check_identity(&g, &c, 1.77, &Default::default()).unwrap();
        assert!(rep.residual_original.abs() < 1e-10);
        assert!(rep.residual_corrected.abs() < 1e-10);
    }

    #[test]
    fn scan_preserves_order_and_records_errors() {
        let c = ctx(0.5, 0.0, 1.0);
        let xs = [0.3, 1.5, 0.6, 0.0];
        let out = residual_scan(&id(), &c, &xs, &Default::default());
        assert_eq!(out.len(), 4);
        assert_eq!(out[0].as_ref().unwrap().x, 0.3);
        assert!(out[1].is_err());
        assert_eq!(out[2].as_ref().unwrap().x, 0.6);
        assert!(out[3].is_err());
        assert!(residual_scan(&id(), &c, &[], &Default::default()).is_empty());
    }

    #[test]
    fn scan_nodes_and_midpoints() {
        let c = ctx(0.5, 0.0, 1.0);
        let nodes: Vec<f64> = (1..=5).map(|k| c.node(k)).collect();
        for rep in residual_scan(&id(), &c, &nodes, &Default::default()) {
            assert!(rep.unwrap().residual_original.abs() < 1e-12);
        }
        let mids: Vec<f64> = (0..5).map(|k| 0.5 * (c.node(k) + c.node(k + 1))).collect();
        for rep in residual_scan(&id(), &c, &mids, &Default::default()) {
            assert!(rep.unwrap().residual_original > 0.0);
        }
    }

    #[test]
    fn parallel_and_sequential_scans_agree() {
        let c = ctx(0.7, 2.0, 4.0);
        let f = RealFn::new("exp", f64::exp);
        let xs: Vec<f64> = (1..40).map(|i| 2.0 + 2.0 * i as f64 / 40.0).collect();
        let par = residual_scan(&f, &c, &xs, &Default::default());
        let seq = residual_scan_sequential(&f, &c, &xs, &Default::default());
        assert_eq!(par, seq);
    }

    #[test]
    fn kernel_agrees_with_integer_split() {
        let c = ctx(0.6, 0.0, 1.0);
        let x = 0.3;
        let idx = m_index_capped(&c, x, 100).unwrap();
        let mut p = 1.0;
        for k in 0..60 {
            let split = if k <= idx.m { 0.6 * p - 1.0 } else { 0.6 * p };
            assert_eq!(kernel_eval(&c, x, p).unwrap(), split, "k={k}");
            p *= 0.6;
        }
    }
}
