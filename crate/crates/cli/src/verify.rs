//! Order-condition and Jacobian-consistency report.

use std::fmt::Write as _;

use num_rational::BigRational;

use nlsys::convergence::{order_conditions, AchievedOrder, OrderConditionReport, OrderField};
use nlsys::problems::check_consistency;
use nlsys::solvers::MethodParams;
use nlsys::{with_precision, Builtin, BuiltinKind, NlError, Real, Scalar};

pub const CONSISTENCY_TRIALS: usize = 3;
pub const CONSISTENCY_SEED: u64 = 2024;

#[derive(Debug, Clone)]
pub struct ConsistencyLine {
    pub problem: &'static str,
    pub dim: usize,
    pub max_deviation: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub params: MethodParams<BigRational>,
    pub report: OrderConditionReport<BigRational>,
    pub consistency: Vec<ConsistencyLine>,
}

impl VerifyOutcome {
    pub fn all_consistent(&self) -> bool {
        self.consistency.iter().all(|c| c.passed)
    }

    pub fn verdict(&self) -> String {
        order_verdict(&self.report)
    }
}

/// One-line classification, e.g. `order 3 (T2 ≠ 0, T3 ≠ 0)`.
pub fn order_verdict(report: &OrderConditionReport<BigRational>) -> String {
    let pretty = |name: &str| match name {
        "1-sum(a)" => "1-Σa".to_string(),
        other => other.to_string(),
    };
    let failing: Vec<String> = report.failing_conditions().into_iter().map(pretty).map(|n| format!("{n} ≠ 0")).collect();
    match report.satisfied_order {
        AchievedOrder::Four => "order 4 conditions satisfied".to_string(),
        AchievedOrder::Three => format!("order 3 ({})", failing.join(", ")),
        AchievedOrder::AtMostTwo if !report.a_sum_minus_one.is_negligible() => {
            format!("order ≤ 2 ({}; linear-term failure)", failing.join(", "))
        }
        AchievedOrder::AtMostTwo => format!("order ≤ 2 ({})", failing.join(", ")),
    }
}

pub fn run_verify(params: MethodParams<BigRational>, precision_bits: u32) -> Result<VerifyOutcome, NlError> {
    let report = order_conditions(&params);
    let consistency = with_precision(precision_bits, || {
        BuiltinKind::ALL
            .iter()
            .map(|&kind| {
                let system = Builtin::<Real>::new(kind, None)?;
                let r = check_consistency(&system, CONSISTENCY_TRIALS, CONSISTENCY_SEED);
                Ok(ConsistencyLine {
                    problem: kind.name(),
                    dim: nlsys::NonlinearSystem::dim(&system),
                    max_deviation: r.max_deviation.to_sci(3),
                    passed: r.passed,
                })
            })
            .collect::<Result<Vec<_>, NlError>>()
    })??;
    Ok(VerifyOutcome { params, report, consistency })
}

pub fn render(outcome: &VerifyOutcome) -> String {
    let p = &outcome.params;
    let r = &outcome.report;
    let mut out = String::new();
    let _ = writeln!(out, "parameters: beta = {}, a1 = {}, a2 = {}, a3 = {}", p.beta, p.a1, p.a2, p.a3);
    let _ = writeln!(out, "{}", outcome.verdict());
    let _ = writeln!(out);
    let _ = writeln!(out, "error-expansion coefficients (exact):");
    for (name, value) in [
        ("1-sum(a)", &r.a_sum_minus_one),
        ("P1", &r.p1),
        ("P2", &r.p2),
        ("P3", &r.p3),
        ("O1", &r.o1),
        ("O2", &r.o2),
        ("O3", &r.o3),
        ("O4", &r.o4),
        ("T1", &r.t1),
        ("T2", &r.t2),
        ("T3", &r.t3),
    ] {
        let _ = writeln!(out, "  {name:<9} {value}");
    }
    let _ = writeln!(out, "fourth-order error term:");
    for (monomial, value) in r.fourth_order_terms() {
        let _ = writeln!(out, "  {monomial:<9} {value}");
    }
    let _ = writeln!(
        out,
        "with the -6*beta*S bracket term instead of -3*S: P2 = {}, T2 = {}",
        r.p2_as_published, r.t2_as_published
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Jacobian consistency (forward differences, {CONSISTENCY_TRIALS} points):");
    for c in &outcome.consistency {
        let verdict = if c.passed { "ok" } else { "FAILED" };
        let _ = writeln!(out, "  {:<5} n={:<3} max deviation {}  {verdict}", c.problem, c.dim, c.max_deviation);
    }
    out
}
