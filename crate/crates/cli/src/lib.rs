//! Library half of the `nlsys` command line: argument handling, report
//! rendering and the benchmark runners. `main.rs` only forwards to [`execute`].

pub mod efficiency;
pub mod format;
pub mod run;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use nlsys::convergence::parse_rational;
use nlsys::efficiency::IndexKind;
use nlsys::solvers::MethodParams;
use nlsys::{BuiltinKind, NormKind, Status};

use run::{MethodSpec, RunSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Far beyond anything useful; keeps a typo from allocating gigabytes.
pub const MAX_PRECISION_BITS: u32 = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "nlsys", version, about = "High-order Newton-type solvers for nonlinear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one builtin problem and print its residual history.
    Solve(SolveArgs),
    /// Residual norms of the first three iterates for every problem and method.
    Table2(Table2Args),
    /// Efficiency index of each method as a function of the dimension (CSV).
    Efficiency(EfficiencyArgs),
    /// Check the order conditions of a parameter set and the builtin Jacobians.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Newton,
    M3,
    M4,
    #[value(name = "m4-general")]
    M4General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Md,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormArg {
    Two,
    Inf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Classical,
    Flops,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: String,
    /// Dimension, only for the variable-size problem ex48 (odd, >= 3).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a3: Option<String>,
    #[arg(long, default_value = "1e-150")]
    pub tol: String,
    #[arg(long, default_value_t = nlsys::solvers::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Working precision in bits; defaults to $SOLVER_PREC_BITS, then 512.
    #[arg(long)]
    pub prec_bits: Option<u32>,
    #[arg(long, value_enum, default_value = "two")]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value = "md")]
    pub format: FormatArg,
}

#[derive(Debug, clap::Args)]
pub struct Table2Args {
    /// Comma-separated list of newton, m3, m4.
    #[arg(long, default_value = "m3,m4")]
    pub methods: String,
    /// `all` or a comma-separated list of problem names.
    #[arg(long, default_value = "all")]
    pub problems: String,
    #[arg(long, value_enum, default_value = "md")]
    pub format: FormatArg,
    /// Interleave the published SH4/MN4 rows, marked `reference`.
    #[arg(long)]
    pub with_reference: bool,
    #[arg(long)]
    pub prec_bits: Option<u32>,
}

#[derive(Debug, clap::Args)]
pub struct EfficiencyArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub n_from: u64,
    #[arg(long)]
    pub n_to: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub prec_bits: Option<u32>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// `beta,a1,a2,a3` as integers, decimals or fractions, e.g. `2/3,9/4,-9/4,1`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[arg(long)]
    pub prec_bits: Option<u32>,
}

/// What a command produced; `main` prints it and exits with `code`.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {}\n", message.into()),
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn execute<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}

pub fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Table2(args) => cmd_table2(args),
        Command::Efficiency(args) => cmd_efficiency(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn precision(flag: Option<u32>) -> Result<u32, Outcome> {
    let bits = run::resolve_precision(flag).map_err(Outcome::usage)?;
    if !(nlsys::real::MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&bits) {
        let min = nlsys::real::MIN_PRECISION_BITS;
        return Err(Outcome::usage(format!("precision {bits} bits is outside {min}..={MAX_PRECISION_BITS}")));
    }
    Ok(bits)
}

fn parse_problem(name: &str) -> Result<BuiltinKind, Outcome> {
    name.parse().map_err(|e: nlsys::NlError| Outcome::usage(e.to_string()))
}

fn exact(flag: &str, text: &str) -> Result<BigRational, Outcome> {
    parse_rational(text).ok_or_else(|| Outcome::usage(format!("--{flag}: `{text}` is not a number")))
}

fn method_spec(args: &SolveArgs) -> Result<MethodSpec, Outcome> {
    let given = [("beta", &args.beta), ("a1", &args.a1), ("a2", &args.a2), ("a3", &args.a3)];
    match args.method {
        MethodArg::M4General => {
            let mut values = Vec::with_capacity(4);
            for (flag, value) in given {
                let text = value.as_deref().ok_or_else(|| Outcome::usage(format!("--method m4-general needs --{flag}")))?;
                values.push(exact(flag, text)?);
            }
            let [beta, a1, a2, a3]: [BigRational; 4] = values.try_into().expect("four values");
            Ok(MethodSpec::General(Box::new(MethodParams::new(beta, a1, a2, a3))))
        }
        other => {
            if let Some((flag, _)) = given.iter().find(|(_, v)| v.is_some()) {
                return Err(Outcome::usage(format!("--{flag} only applies to --method m4-general")));
            }
            Ok(match other {
                MethodArg::Newton => MethodSpec::Newton,
                MethodArg::M3 => MethodSpec::M3,
                _ => MethodSpec::M4,
            })
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Outcome {
    let spec = (|| {
        let precision_bits = precision(args.prec_bits)?;
        let tol = exact("tol", &args.tol)?;
        if tol <= BigRational::from_integer(0.into()) {
            return Err(Outcome::usage("--tol must be positive"));
        }
        if args.max_iter == 0 {
            return Err(Outcome::usage("--max-iter must be at least 1"));
        }
        Ok(RunSpec {
            problem: parse_problem(&args.problem)?,
            size: args.size,
            method: method_spec(&args)?,
            tol,
            max_iter: args.max_iter,
            norm: match args.norm {
                NormArg::Two => NormKind::Two,
                NormArg::Inf => NormKind::Inf,
            },
            precision_bits,
        })
    })();
    let spec = match spec {
        Ok(s) => s,
        Err(o) => return o,
    };
    let report = match run::run_case(&spec) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let stdout = match args.format {
        FormatArg::Md => report.to_markdown(),
        FormatArg::Csv => report.to_csv(),
        FormatArg::Json => report.to_json(),
    };
    let code = if report.status == Status::Converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let stderr = report.failure.as_ref().map(|f| format!("{}: {f}\n", report.status)).unwrap_or_default();
    Outcome { code, stdout, stderr }
}

fn split_list(list: &str) -> impl Iterator<Item = &str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn cmd_table2(args: Table2Args) -> Outcome {
    let precision_bits = match precision(args.prec_bits) {
        Ok(b) => b,
        Err(o) => return o,
    };
    let mut methods = Vec::new();
    for name in split_list(&args.methods) {
        methods.push(match name.to_ascii_lowercase().as_str() {
            "newton" => MethodSpec::Newton,
            "m3" => MethodSpec::M3,
            "m4" => MethodSpec::M4,
            other => return Outcome::usage(format!("--methods: unknown method `{other}` (newton, m3, m4)")),
        });
    }
    let problems: Vec<BuiltinKind> = if args.problems.trim().eq_ignore_ascii_case("all") {
        BuiltinKind::ALL.to_vec()
    } else {
        match split_list(&args.problems).map(parse_problem).collect() {
            Ok(p) => p,
            Err(o) => return o,
        }
    };
    if methods.is_empty() || problems.is_empty() {
        return Outcome::usage("empty --methods or --problems");
    }
    let rows = run::run_table2(&problems, &methods, precision_bits, args.with_reference);
    Outcome::ok(match args.format {
        FormatArg::Md => run::table2_markdown(&rows),
        FormatArg::Csv => run::table2_csv(&rows),
        FormatArg::Json => run::table2_json(&rows),
    })
}

fn cmd_efficiency(args: EfficiencyArgs) -> Outcome {
    let precision_bits = match precision(args.prec_bits) {
        Ok(b) => b,
        Err(o) => return o,
    };
    let kind = match args.kind {
        KindArg::Classical => IndexKind::Classical,
        KindArg::Flops => IndexKind::Flops,
    };
    let csv = match efficiency::efficiency_csv(kind, args.n_from, args.n_to, precision_bits) {
        Ok(csv) => csv,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    match args.out {
        None => Outcome::ok(csv),
        Some(path) => match std::fs::write(&path, csv) {
            Ok(()) => Outcome::ok(String::new()),
            Err(e) => Outcome::usage(format!("cannot write {}: {e}", path.display())),
        },
    }
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let precision_bits = match precision(args.prec_bits) {
        Ok(b) => b,
        Err(o) => return o,
    };
    let params = match &args.params {
        None => MethodParams::<BigRational>::fourth_order(),
        Some(text) => {
            let parts: Vec<&str> = text.split(',').collect();
            let parsed = match parts.as_slice() {
                [b, a1, a2, a3] => MethodParams::parse_exact(b, a1, a2, a3),
                _ => None,
            };
            match parsed {
                Some(p) => p,
                None => return Outcome::usage(format!("--params expects beta,a1,a2,a3; got `{text}`")),
            }
        }
    };
    let outcome = match verify::run_verify(params, precision_bits) {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    // the exit status certifies the method as shipped, whatever --params asked about
    let shipped_ok = nlsys::convergence::order_conditions(&MethodParams::<BigRational>::fourth_order()).satisfied_order
        == nlsys::convergence::AchievedOrder::Four;
    let code = if shipped_ok && outcome.all_consistent() { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Outcome { code, stdout: verify::render(&outcome), stderr: String::new() }
}
