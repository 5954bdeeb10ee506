//! Solver runs on the benchmark problems and the residual table.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use nlsys::convergence::{coc, order_conditions, AchievedOrder, CocBasis};
use nlsys::efficiency::{flops_like_index, CostMethod};
use nlsys::reference::TABLE2;
use nlsys::solvers::{solve, Method, MethodParams, SolverConfig, Status};
use nlsys::{with_precision, Builtin, BuiltinKind, NlError, NonlinearSystem, NormKind, Real, Scalar};

use crate::format::{csv_line, fixed_sig, md_header, md_row, opt_fixed};

pub const PRECISION_ENV: &str = "SOLVER_PREC_BITS";

/// Precision from the flag, else `SOLVER_PREC_BITS`, else 512 bits.
pub fn resolve_precision(flag: Option<u32>) -> Result<u32, String> {
    if let Some(bits) = flag {
        return Ok(bits);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{PRECISION_ENV}=`{v}` is not a bit count")),
        Err(_) => Ok(nlsys::DEFAULT_PRECISION_BITS),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Newton,
    M3,
    M4,
    General(Box<MethodParams<BigRational>>),
}

impl MethodSpec {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Newton => "Newton",
            Self::M3 => "M3",
            Self::M4 => "M4",
            Self::General(_) => "M4(general)",
        }
    }

    /// Cost row used for the efficiency column. A general parameter set costs
    /// the same as M3/M4 and is credited with the order its coefficients
    /// guarantee; Newton and schemes of order <= 2 get none.
    pub fn cost_method(&self) -> Option<CostMethod> {
        match self {
            Self::Newton => None,
            Self::M3 => Some(CostMethod::M3),
            Self::M4 => Some(CostMethod::M4),
            Self::General(p) => match order_conditions(p).satisfied_order {
                AchievedOrder::Four => Some(CostMethod::M4),
                AchievedOrder::Three => Some(CostMethod::M3),
                AchievedOrder::AtMostTwo => None,
            },
        }
    }

    fn to_method(&self) -> Method<Real> {
        match self {
            Self::Newton => Method::Newton,
            Self::M3 => Method::M3,
            Self::M4 => Method::M4,
            Self::General(p) => Method::M4General(MethodParams::new(
                rational_to_real(&p.beta),
                rational_to_real(&p.a1),
                rational_to_real(&p.a2),
                rational_to_real(&p.a3),
            )),
        }
    }
}

/// Exact rational rounded once to the working precision.
pub fn rational_to_real(r: &BigRational) -> Real {
    let num = Real::parse_decimal(&r.numer().to_string()).expect("integer");
    let den = Real::parse_decimal(&r.denom().to_string()).expect("integer");
    num / den
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub problem: BuiltinKind,
    pub size: Option<usize>,
    pub method: MethodSpec,
    pub tol: BigRational,
    pub max_iter: usize,
    pub norm: NormKind,
    pub precision_bits: u32,
}

impl RunSpec {
    pub fn new(problem: BuiltinKind, method: MethodSpec) -> Self {
        Self {
            problem,
            size: None,
            method,
            tol: BigRational::new(1.into(), num_bigint::BigInt::from(10u32).pow(150)),
            max_iter: nlsys::solvers::DEFAULT_MAX_ITER,
            norm: NormKind::Two,
            precision_bits: nlsys::DEFAULT_PRECISION_BITS,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationLine {
    pub k: usize,
    pub residual: String,
    pub error: Option<String>,
}

/// One solver run, summarized.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub method: String,
    pub status: Status,
    pub iterations: usize,
    /// `|F(x_k)|` for k = 1, 2, 3 (fewer if the run stopped earlier).
    pub residuals: Vec<String>,
    pub coc: Option<f64>,
    pub efficiency_index: Option<f64>,
    #[serde(skip)]
    pub label: &'static str,
    #[serde(skip)]
    pub dim: usize,
    #[serde(skip)]
    pub failure: Option<String>,
    #[serde(skip)]
    pub lines: Vec<IterationLine>,
}

pub fn run_case(spec: &RunSpec) -> Result<RunReport, NlError> {
    with_precision(spec.precision_bits, || {
        let problem = Builtin::<Real>::new(spec.problem, spec.size)?;
        let tol = rational_to_real(&spec.tol);
        let config = SolverConfig::new(spec.method.to_method(), tol, spec.max_iter, spec.norm)?;
        let trace = solve(&problem, &config);
        let n = problem.dim();
        let lines: Vec<IterationLine> = trace
            .records
            .iter()
            .map(|r| IterationLine {
                k: r.k,
                residual: r.residual_norm.to_sci(5),
                error: r.error_norm.as_ref().map(|e| e.to_sci(5)),
            })
            .collect();
        Ok(RunReport {
            problem: spec.problem.name().to_string(),
            method: spec.method.label().to_string(),
            status: trace.status,
            iterations: trace.iterations(),
            residuals: trace.step_residuals().take(3).map(|r| r.to_sci(5)).collect(),
            coc: coc(&trace, CocBasis::Residual, None).ok().map(|c| c.rho.to_f64()),
            efficiency_index: spec.method.cost_method().map(|m| flops_like_index::<Real>(m, n as u64).to_f64()),
            label: spec.problem.label(),
            dim: n,
            failure: trace.failure.as_ref().map(ToString::to_string),
            lines,
        })
    })?
}

impl RunReport {
    pub fn to_markdown(&self) -> String {
        let mut out = md_header(&["example", "method", "status", "iterations", "|F(x1)|", "|F(x2)|", "|F(x3)|", "COC", "E"]);
        let r = |i: usize| self.residuals.get(i).cloned().unwrap_or_else(|| "-".into());
        out.push_str(&md_row(&[
            self.label.to_string(),
            self.method.clone(),
            self.status.to_string(),
            self.iterations.to_string(),
            r(0),
            r(1),
            r(2),
            opt_fixed(self.coc, 5),
            opt_fixed(self.efficiency_index, 5),
        ]));
        out.push('\n');
        out.push_str(&md_header(&["k", "|F(x_k)|", "|x_k - root|"]));
        for line in &self.lines {
            out.push_str(&md_row(&[line.k.to_string(), line.residual.clone(), line.error.clone().unwrap_or_else(|| "-".into())]));
        }
        if let Some(f) = &self.failure {
            out.push_str(&format!("\nstopped: {f}\n"));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_line(&["problem", "method", "status", "iterations", "F1", "F2", "F3", "coc", "E"]);
        let r = |i: usize| self.residuals.get(i).cloned().unwrap_or_default();
        out.push_str(&csv_line(&[
            self.problem.clone(),
            self.method.clone(),
            self.status.to_string(),
            self.iterations.to_string(),
            r(0),
            r(1),
            r(2),
            self.coc.map(|c| fixed_sig(c, 5)).unwrap_or_default(),
            self.efficiency_index.map(|e| fixed_sig(e, 5)).unwrap_or_default(),
        ]));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSource {
    Computed,
    Reference,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Row {
    pub example: &'static str,
    pub method: String,
    pub residuals: [Option<String>; 3],
    pub efficiency: String,
    pub coc: Option<f64>,
    pub iterations: Option<usize>,
    pub status: String,
    pub source: RowSource,
}

/// Runs every (problem, method) pair, in parallel, and returns the rows in
/// problem order with methods in the given order. Published rows for the
/// schemes without an implementation are interleaved when requested.
pub fn run_table2(problems: &[BuiltinKind], methods: &[MethodSpec], precision_bits: u32, with_reference: bool) -> Vec<Table2Row> {
    let cases: Vec<(BuiltinKind, MethodSpec)> = problems.iter().flat_map(|&p| methods.iter().map(move |m| (p, m.clone()))).collect();
    let computed: Vec<Table2Row> = cases
        .par_iter()
        .map(|(problem, method)| {
            let mut spec = RunSpec::new(*problem, method.clone());
            spec.precision_bits = precision_bits;
            computed_row(*problem, method, run_case(&spec))
        })
        .collect();

    let mut rows = Vec::new();
    for &problem in problems {
        let mine = computed.iter().filter(|r| r.example == problem.label());
        if with_reference {
            // published layout: M3, MN4, SH4, M4
            let (m3, rest): (Vec<_>, Vec<_>) = mine.cloned().partition(|r| r.method == "M3");
            rows.extend(m3);
            for reference in TABLE2.iter().filter(|r| r.problem == problem && (r.method == "MN4" || r.method == "SH4")) {
                rows.push(Table2Row {
                    example: problem.label(),
                    method: reference.method.to_string(),
                    residuals: reference.residuals.map(|s| Some(s.to_string())),
                    efficiency: reference.efficiency.to_string(),
                    coc: None,
                    iterations: None,
                    status: "reference".into(),
                    source: RowSource::Reference,
                });
            }
            rows.extend(rest);
        } else {
            rows.extend(mine.cloned());
        }
    }
    rows
}

fn computed_row(problem: BuiltinKind, method: &MethodSpec, report: Result<RunReport, NlError>) -> Table2Row {
    let n = nlsys::builtin::<f64>(problem.name(), None).map(|p| p.dim() as u64).unwrap_or(0);
    let efficiency = method
        .cost_method()
        .map(|m| fixed_sig(flops_like_index::<f64>(m, n), 5))
        .unwrap_or_else(|| "-".into());
    match report {
        Ok(r) => Table2Row {
            example: problem.label(),
            method: method.label().to_string(),
            residuals: [0, 1, 2].map(|i| r.residuals.get(i).cloned()),
            efficiency,
            coc: r.coc,
            iterations: Some(r.iterations),
            status: r.status.to_string(),
            source: RowSource::Computed,
        },
        Err(e) => Table2Row {
            example: problem.label(),
            method: method.label().to_string(),
            residuals: [None, None, None],
            efficiency,
            coc: None,
            iterations: None,
            status: format!("error: {e}"),
            source: RowSource::Computed,
        },
    }
}

const TABLE2_HEADER: [&str; 10] = ["example", "method", "F1", "F2", "F3", "E", "coc", "iterations", "status", "source"];

fn row_cells(r: &Table2Row, missing: &str) -> Vec<String> {
    let cell = |v: &Option<String>| v.clone().unwrap_or_else(|| missing.to_string());
    vec![
        r.example.to_string(),
        r.method.clone(),
        cell(&r.residuals[0]),
        cell(&r.residuals[1]),
        cell(&r.residuals[2]),
        r.efficiency.clone(),
        r.coc.map(|c| fixed_sig(c, 5)).unwrap_or_else(|| missing.to_string()),
        r.iterations.map(|k| k.to_string()).unwrap_or_else(|| missing.to_string()),
        r.status.clone(),
        match r.source {
            RowSource::Computed => "computed".into(),
            RowSource::Reference => "reference".into(),
        },
    ]
}

pub fn table2_markdown(rows: &[Table2Row]) -> String {
    let mut out = md_header(&TABLE2_HEADER);
    for r in rows {
        out.push_str(&md_row(&row_cells(r, "-")));
    }
    out
}

pub fn table2_csv(rows: &[Table2Row]) -> String {
    let mut out = csv_line(&TABLE2_HEADER);
    for r in rows {
        out.push_str(&csv_line(&row_cells(r, "")));
    }
    out
}

pub fn table2_json(rows: &[Table2Row]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize") + "\n"
}
