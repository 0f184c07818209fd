use std::io::Write;

use qmont_core::{
    check_identity, classical_derivative_fd, convexity_step_check, jackson_integral,
    jackson_integral_sub, q_derivative, q_derivative_limit, residual_scan, riemann_integral_oracle,
    unit_grid, IdentityReport, QContext, QError, SeriesResult, Violation,
};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::format::{csv_rows, json_line, sig17, sig6, table_columns, table_pairs, Num, Output};
use crate::{CliError, Config};

/// Step for the central-difference oracle in limit-check.
const FD_STEP: f64 = 1e-6;
/// Simpson panels for the integral oracle in limit-check.
const SIMPSON_PANELS: usize = 256;
/// Exact lattice nodes appended to every disprove scan.
const NODE_ROWS: usize = 5;

/// Writes a flat record in the requested encoding. `fields` pairs each column
/// with its value; strings and numbers are told apart so JSON stays typed.
fn emit_record(
    out: &mut impl Write,
    output: Output,
    fields: &[(&str, Field)],
) -> Result<(), CliError> {
    match output {
        Output::Table => {
            let pairs: Vec<(&str, String)> = fields.iter().map(|(k, v)| (*k, v.table())).collect();
            table_pairs(out, &pairs)?;
        }
        Output::Csv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields.iter().map(|(_, v)| v.machine()).collect();
            csv_rows(out, &header, &[row])?;
        }
        Output::Json => json_line(out, &Record(fields))?,
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Field {
    Num(f64),
    Int(usize),
    Bool(bool),
    Text(String),
}

impl Field {
    fn table(&self) -> String {
        match self {
            Field::Num(v) => sig6(*v),
            Field::Int(n) => n.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(s) => s.clone(),
        }
    }

    fn machine(&self) -> String {
        match self {
            Field::Num(v) => sig17(*v),
            _ => self.table(),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Num(v) => Num(*v).serialize(s),
            Field::Int(n) => n.serialize(s),
            Field::Bool(b) => b.serialize(s),
            Field::Text(t) => t.serialize(s),
        }
    }
}

/// JSON object with keys in column order.
struct Record<'a>(&'a [(&'a str, Field)]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

fn context_fields(cfg: &Config, ctx: &QContext) -> Vec<(&'static str, Field)> {
    vec![
        ("function", Field::Text(cfg.source.clone())),
        ("q", Field::Num(ctx.q())),
        ("a", Field::Num(ctx.a())),
        ("b", Field::Num(ctx.b())),
    ]
}

fn series_fields(s: &SeriesResult) -> Vec<(&'static str, Field)> {
    vec![
        ("value", Field::Num(s.value)),
        ("terms_used", Field::Int(s.terms_used)),
        ("tail_estimate", Field::Num(s.tail_estimate)),
        ("converged", Field::Bool(s.converged)),
    ]
}

pub fn qderiv(
    cfg: &Config,
    x: Option<f64>,
    at_a: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let ctx = cfg.ctx()?;
    let mut fields = context_fields(cfg, &ctx);
    if at_a {
        let est = q_derivative_limit(&cfg.f, &ctx, &cfg.control)?;
        fields.push(("x", Field::Num(ctx.a())));
        fields.push(("value", Field::Num(est.value)));
        fields.push(("iterations", Field::Int(est.iterations)));
        fields.push(("last_difference", Field::Num(est.error)));
    } else {
        let x = x.ok_or_else(|| CliError::Usage("-x is required without --at-a".into()))?;
        let value = q_derivative(&cfg.f, &ctx, x)?;
        fields.push(("x", Field::Num(x)));
        fields.push(("value", Field::Num(value)));
    }
    emit_record(out, cfg.output, &fields)
}

pub fn qint(
    cfg: &Config,
    x: f64,
    c: Option<f64>,
    strict: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let ctx = cfg.ctx()?;
    let series = match c {
        Some(c) => jackson_integral_sub(&cfg.f, &ctx, c, x, &cfg.control)?,
        None => jackson_integral(&cfg.f, &ctx, x, &cfg.control)?,
    };
    let mut fields = context_fields(cfg, &ctx);
    fields.push(("c", c.map_or(Field::Num(ctx.a()), Field::Num)));
    fields.push(("x", Field::Num(x)));
    fields.extend(series_fields(&series));
    emit_record(out, cfg.output, &fields)?;
    if strict && !series.converged {
        return Err(CliError::NotConverged);
    }
    Ok(())
}

pub fn check(cfg: &Config, x: f64, out: &mut impl Write) -> Result<(), CliError> {
    let ctx = cfg.ctx()?;
    let rep = check_identity(&cfg.f, &ctx, x, &cfg.control)?;
    let mut fields = context_fields(cfg, &ctx);
    fields.extend([
        ("x", Field::Num(rep.x)),
        ("m", Field::Int(rep.m)),
        ("node", Field::Num(rep.node)),
        ("avg_integral", Field::Num(rep.avg_integral)),
        ("lhs_original", Field::Num(rep.lhs_original)),
        ("lhs_corrected", Field::Num(rep.lhs_corrected)),
        ("rhs", Field::Num(rep.rhs)),
        ("residual_original", Field::Num(rep.residual_original)),
        ("residual_corrected", Field::Num(rep.residual_corrected)),
        ("tolerance", Field::Num(rep.tolerance)),
        ("terms_used", Field::Int(rep.series.terms_used)),
        ("converged", Field::Bool(rep.converged())),
        ("corrected_holds", Field::Bool(rep.corrected_holds())),
        ("original_holds", Field::Bool(rep.original_holds())),
    ]);
    emit_record(out, cfg.output, &fields)
}

const SCAN_HEADER: [&str; 6] = [
    "x",
    "node",
    "residual_original",
    "residual_corrected",
    "kind",
    "error",
];

#[derive(Serialize)]
struct ScanRow {
    x: Num,
    node: Option<Num>,
    residual_original: Option<Num>,
    residual_corrected: Option<Num>,
    kind: &'static str,
    error: Option<String>,
}

pub fn disprove(cfg: &Config, points: usize, out: &mut impl Write) -> Result<(), CliError> {
    let ctx = cfg.ctx()?;
    let (a, width) = (ctx.a(), ctx.width());
    let mut xs: Vec<f64> = (1..=points)
        .map(|i| a + width * i as f64 / (points + 1) as f64)
        .collect();
    xs.extend((1..=NODE_ROWS).map(|k| ctx.node(k)));
    let kinds = std::iter::repeat_n("grid", points).chain(std::iter::repeat_n("node", NODE_ROWS));

    let reports = residual_scan(&cfg.f, &ctx, &xs, &cfg.control);
    let rows: Vec<ScanRow> = xs
        .iter()
        .zip(kinds)
        .zip(&reports)
        .map(|((&x, kind), rep)| match rep {
            Ok(r) => ScanRow {
                x: Num(x),
                node: Some(Num(r.node)),
                residual_original: Some(Num(r.residual_original)),
                residual_corrected: Some(Num(r.residual_corrected)),
                kind,
                error: None,
            },
            Err(e) => ScanRow {
                x: Num(x),
                node: None,
                residual_original: None,
                residual_corrected: None,
                kind,
                error: Some(e.to_string()),
            },
        })
        .collect();

    match cfg.output {
        Output::Json => {
            for row in &rows {
                json_line(out, row)?;
            }
        }
        Output::Csv | Output::Table => {
            let (fmt, opt): (fn(f64) -> String, _) = if cfg.output == Output::Csv {
                (sig17, String::new())
            } else {
                (sig6, "-".to_string())
            };
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let o = |v: &Option<Num>| v.map_or(opt.clone(), |n| fmt(n.0));
                    vec![
                        fmt(r.x.0),
                        o(&r.node),
                        o(&r.residual_original),
                        o(&r.residual_corrected),
                        r.kind.to_string(),
                        r.error.clone().unwrap_or_else(|| opt.clone()),
                    ]
                })
                .collect();
            if cfg.output == Output::Csv {
                csv_rows(out, &SCAN_HEADER, &cells)?;
            } else {
                table_columns(out, &SCAN_HEADER, &cells)?;
                summarize_scan(out, &reports)?;
            }
        }
    }
    Ok(())
}

fn summarize_scan(
    out: &mut impl Write,
    reports: &[Result<IdentityReport, QError>],
) -> Result<(), CliError> {
    let ok: Vec<&IdentityReport> = reports.iter().filter_map(|r| r.as_ref().ok()).collect();
    let max_corr = ok
        .iter()
        .map(|r| r.residual_corrected.abs())
        .fold(0.0, f64::max);
    let max_orig = ok
        .iter()
        .map(|r| r.residual_original.abs())
        .fold(0.0, f64::max);
    writeln!(out)?;
    table_pairs(
        out,
        &[
            ("rows", reports.len().to_string()),
            ("errors", (reports.len() - ok.len()).to_string()),
            ("max |residual_corrected|", sig6(max_corr)),
            ("max |residual_original|", sig6(max_orig)),
        ],
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ViolationOut {
    t: Num,
    lhs: Num,
    bound: Num,
}

impl From<&Violation> for ViolationOut {
    fn from(v: &Violation) -> Self {
        Self {
            t: Num(v.t),
            lhs: Num(v.lhs),
            bound: Num(v.bound),
        }
    }
}

#[derive(Serialize)]
struct ConvexityOut {
    function: String,
    q: Num,
    a: Num,
    b: Num,
    r: Num,
    grid: usize,
    derivative_at_a: Num,
    derivative_at_b: Num,
    corrected_violations: Vec<ViolationOut>,
    erroneous_violations: Vec<ViolationOut>,
}

pub fn convexity(cfg: &Config, r: f64, grid: usize, out: &mut impl Write) -> Result<(), CliError> {
    if r.is_nan() || r < 1.0 {
        return Err(CliError::Usage(format!("-r must be at least 1, got {r}")));
    }
    let ctx = cfg.ctx()?;
    let rep = convexity_step_check(&cfg.f, &ctx, r, &unit_grid(grid), &cfg.control)?;
    match cfg.output {
        Output::Json => {
            let body = ConvexityOut {
                function: cfg.source.clone(),
                q: Num(ctx.q()),
                a: Num(ctx.a()),
                b: Num(ctx.b()),
                r: Num(r),
                grid,
                derivative_at_a: Num(rep.derivative_at_a),
                derivative_at_b: Num(rep.derivative_at_b),
                corrected_violations: rep.corrected_violations.iter().map(Into::into).collect(),
                erroneous_violations: rep.erroneous_violations.iter().map(Into::into).collect(),
            };
            json_line(out, &body)?;
        }
        Output::Csv => {
            let rows: Vec<Vec<String>> = rep
                .corrected_violations
                .iter()
                .map(|v| ("corrected", v))
                .chain(rep.erroneous_violations.iter().map(|v| ("erroneous", v)))
                .map(|(which, v)| vec![which.to_string(), sig17(v.t), sig17(v.lhs), sig17(v.bound)])
                .collect();
            csv_rows(out, &["bound", "t", "lhs", "bound_value"], &rows)?;
        }
        Output::Table => {
            table_pairs(
                out,
                &[
                    ("function", cfg.source.clone()),
                    ("r", sig6(r)),
                    ("grid points", grid.to_string()),
                    ("D_q f(a)", sig6(rep.derivative_at_a)),
                    ("D_q f(b)", sig6(rep.derivative_at_b)),
                    (
                        "corrected violations",
                        rep.corrected_violations.len().to_string(),
                    ),
                    (
                        "erroneous violations",
                        rep.erroneous_violations.len().to_string(),
                    ),
                ],
            )?;
            for (name, list) in [
                (
                    "corrected bound  t|Df(b)|^r + (1-t)|Df(a)|^r",
                    &rep.corrected_violations,
                ),
                (
                    "erroneous bound  t|Df(a)|^r + (1-t)|Df(b)|^r",
                    &rep.erroneous_violations,
                ),
            ] {
                if list.is_empty() {
                    continue;
                }
                writeln!(out, "\n{name}")?;
                let rows: Vec<Vec<String>> = list
                    .iter()
                    .map(|v| vec![sig6(v.t), sig6(v.lhs), sig6(v.bound)])
                    .collect();
                table_columns(out, &["t", "lhs", "bound"], &rows)?;
            }
        }
    }
    Ok(())
}

fn default_q_list() -> Vec<f64> {
    (3..=10).map(|j| 1.0 - 0.5f64.powi(j)).collect()
}

const LIMIT_HEADER: [&str; 9] = [
    "q",
    "qderiv",
    "fd_oracle",
    "deriv_error",
    "qint",
    "simpson_oracle",
    "integral_error",
    "terms_used",
    "converged",
];

pub fn limit_check(
    cfg: &Config,
    x: f64,
    q_list: &[f64],
    out: &mut impl Write,
) -> Result<(), CliError> {
    let qs = if q_list.is_empty() {
        default_q_list()
    } else {
        q_list.to_vec()
    };
    let fd = classical_derivative_fd(&cfg.f, x, FD_STEP)?;
    let simpson = riemann_integral_oracle(&cfg.f, cfg.a, cfg.b, SIMPSON_PANELS)?;

    let mut rows = Vec::with_capacity(qs.len());
    for q in qs {
        let ctx = QContext::new(q, cfg.a, cfg.b)?;
        let dq = q_derivative(&cfg.f, &ctx, x)?;
        let int = jackson_integral(&cfg.f, &ctx, cfg.b, &cfg.control)?;
        rows.push([
            Field::Num(q),
            Field::Num(dq),
            Field::Num(fd),
            Field::Num((dq - fd).abs()),
            Field::Num(int.value),
            Field::Num(simpson),
            Field::Num((int.value - simpson).abs()),
            Field::Int(int.terms_used),
            Field::Bool(int.converged),
        ]);
    }

    match cfg.output {
        Output::Json => {
            for row in &rows {
                let fields: Vec<(&str, Field)> = LIMIT_HEADER
                    .iter()
                    .copied()
                    .zip(row.iter().cloned())
                    .collect();
                emit_record(out, Output::Json, &fields)?;
            }
        }
        Output::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(Field::machine).collect())
                .collect();
            csv_rows(out, &LIMIT_HEADER, &cells)?;
        }
        Output::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(Field::table).collect())
                .collect();
            table_columns(out, &LIMIT_HEADER, &cells)?;
        }
    }
    Ok(())
}
