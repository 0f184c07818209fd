use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmont_core::{as_realfn, parse, QContext, QError, RealFn, SeriesControl, SyntaxError};

mod commands;
mod format;

use format::Output;

/// q-calculus numerics: q-derivatives, Jackson integrals and the quantum
/// Montgomery identity.
#[derive(Debug, Parser)]
#[command(name = "qmont", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// q-derivative D_q f(x), or its limit at x = a with --at-a
    Qderiv {
        #[command(flatten)]
        common: Common,
        #[arg(
            short = 'x',
            allow_negative_numbers = true,
            required_unless_present = "at_a"
        )]
        x: Option<f64>,
        /// Evaluate the limit of D_q f at the left endpoint
        #[arg(long)]
        at_a: bool,
    },
    /// Jackson q-integral over [a, x], or over [c, x] with -c
    Qint {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_negative_numbers = true)]
        x: f64,
        #[arg(short = 'c', allow_negative_numbers = true)]
        c: Option<f64>,
        /// Exit with status 4 when the series hits the term cap
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate the original and corrected Montgomery identities at x
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_negative_numbers = true)]
        x: f64,
    },
    /// Residual scan over uniform points plus the first five lattice nodes
    Disprove {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Grid check of both convexity bounds for |D_q f|^r
    Convexity {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'r', allow_negative_numbers = true, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
    /// Errors against the classical derivative and integral as q -> 1
    LimitCheck {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'x', allow_negative_numbers = true)]
        x: f64,
        /// Comma-separated q values (default 1 - 2^-j, j = 3..10)
        #[arg(long, value_delimiter = ',')]
        q_list: Vec<f64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Function of t, e.g. "t^2 + sin(t)"
    #[arg(short = 'f', long = "function")]
    function: String,
    #[arg(short = 'q', allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(short = 'a', allow_negative_numbers = true)]
    a: f64,
    #[arg(short = 'b', allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = SeriesControl::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = SeriesControl::DEFAULT_MAX_TERMS)]
    max_terms: usize,
    #[arg(long, value_enum, default_value_t = Output::Table)]
    output: Output,
}

/// Validated command-line configuration.
pub struct Config {
    pub f: RealFn,
    pub source: String,
    pub q: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub control: SeriesControl,
    pub output: Output,
}

impl Config {
    fn from_common(c: Common) -> Result<Self, CliError> {
        let expr = parse(&c.function)?;
        let control =
            SeriesControl::new(c.tol, c.max_terms, SeriesControl::DEFAULT_CONSECUTIVE_SMALL)?;
        let cfg = Config {
            f: as_realfn(expr, c.function.clone()),
            source: c.function,
            q: c.q,
            a: c.a,
            b: c.b,
            control,
            output: c.output,
        };
        if let Some(q) = cfg.q {
            QContext::new(q, cfg.a, cfg.b)?;
        }
        Ok(cfg)
    }

    /// Context built from `-q`, which is required for every command except
    /// limit-check.
    pub fn ctx(&self) -> Result<QContext, CliError> {
        let q = self
            .q
            .ok_or_else(|| CliError::Usage("the -q option is required for this command".into()))?;
        Ok(QContext::new(q, self.a, self.b)?)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Syntax(SyntaxError),
    Core(QError),
    /// Series did not converge under `--strict`; the report was already printed.
    NotConverged,
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Syntax(_) => 2,
            CliError::Core(QError::Convergence { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::NotConverged => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Syntax(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::NotConverged => write!(f, "series did not converge within --max-terms"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Core(e)
    }
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        CliError::Syntax(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    match cli.command {
        Command::Qderiv { common, x, at_a } => {
            commands::qderiv(&Config::from_common(common)?, x, at_a, out)
        }
        Command::Qint {
            common,
            x,
            c,
            strict,
        } => commands::qint(&Config::from_common(common)?, x, c, strict, out),
        Command::Check { common, x } => commands::check(&Config::from_common(common)?, x, out),
        Command::Disprove { common, points } => {
            commands::disprove(&Config::from_common(common)?, points, out)
        }
        Command::Convexity { common, r, grid } => {
            commands::convexity(&Config::from_common(common)?, r, grid, out)
        }
        Command::LimitCheck { common, x, q_list } => {
            commands::limit_check(&Config::from_common(common)?, x, &q_list, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
