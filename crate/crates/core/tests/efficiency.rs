use proptest::prelude::*;

use nlsys::efficiency::{index_table, model_iteration_flops, CostMethod, IndexKind, MethodCostModel};
use nlsys::problems::BuiltinKind;
use nlsys::reference::table2_row;
use nlsys::solvers::{solve, Method, SolverConfig};
use nlsys::{classical_index, flops_like_index, FlopCounter, FnSystem, Matrix, NonlinearSystem, Real, Scalar, Vector};

fn dim_of(kind: BuiltinKind) -> u64 {
    nlsys::builtin::<f64>(kind.name(), None).unwrap().dim() as u64
}

#[test]
fn efficiency_column_to_four_places() {
    for kind in BuiltinKind::ALL {
        let n = dim_of(kind);
        for m in CostMethod::ALL {
            let published = table2_row(kind, m.name()).unwrap().efficiency;
            let value: Real = flops_like_index(m, n);
            assert_eq!(format!("{:.4}", value.to_f64()), published, "{kind} {m} n={n}");
        }
    }
}

#[test]
fn flops_like_dominance() {
    let rows = index_table::<Real>(&MethodCostModel::all(), 2, 80, IndexKind::Flops).unwrap();
    for row in rows {
        let [sh4, mn4, m3, m4] = [&row.values[0], &row.values[1], &row.values[2], &row.values[3]];
        assert!(m4 > mn4 && mn4 > sh4 && m4 > m3, "n = {}", row.n);
    }
}

#[test]
fn classical_indices_of_fourth_order_methods_coincide() {
    for n in 2..=80 {
        let [sh4, mn4, m3, m4]: [Real; 4] = CostMethod::ALL.map(|m| classical_index(m, n));
        assert!(sh4 == mn4 && mn4 == m4);
        assert!(m3 < m4);
    }
}

proptest! {
    #[test]
    fn indices_decrease_towards_one(n in 2u64..5000) {
        for m in CostMethod::ALL {
            for kind in [IndexKind::Classical, IndexKind::Flops] {
                let at = |n| -> f64 {
                    match kind {
                        IndexKind::Classical => classical_index(m, n),
                        IndexKind::Flops => flops_like_index(m, n),
                    }
                };
                prop_assert!(at(n) > 1.0);
                prop_assert!(at(n + 1) < at(n));
            }
        }
    }
}

/// `x_i x_{i+1} - 1 + (x_i - 1) = 0` cyclically, root all-ones. The plain
/// cyclic system has `det J = prod x_{i+1} - prod x_i = 0` for even `n`; the
/// diagonal term keeps the same sparsity with a nonsingular Jacobian.
fn cyclic(n: usize) -> FnSystem<Real> {
    let x0 = Vector::filled(n, Real::ratio(2, 1));
    FnSystem::new(format!("cyclic{n}"), x0, move |x: &Vector<Real>| {
        Vector::from_vec((0..n).map(|i| x[i].clone() * x[(i + 1) % n].clone() + x[i].clone() - Real::ratio(2, 1)).collect())
    })
    .with_jacobian(move |x: &Vector<Real>| {
        let mut j = Matrix::zeros(n, n);
        for i in 0..n {
            let next = (i + 1) % n;
            j[(i, i)] = x[next].clone() + Real::one();
            j[(i, next)] = x[i].clone();
        }
        j
    })
}

use num_traits::One;

#[test]
fn measured_iteration_cost_matches_model() {
    for n in [5usize, 10, 20] {
        let sys = cyclic(n);
        let trace = solve(&sys, &SolverConfig::with_method(Method::M4));
        assert!(trace.records.len() > 1, "n={n}: {:?} {:?}", trace.status, trace.failure);
        let d: FlopCounter = trace.records[1].counters.since(&trace.records[0].counters);
        let nf = n as f64;
        let (model_lu, model_solves) = model_iteration_flops(n as u64);
        assert!((d.lu_flops as f64 - model_lu).abs() <= 2.0 * nf * nf, "n={n}: {} vs {model_lu}", d.lu_flops);
        assert_eq!((d.lu_count, d.vec_solve_count, d.mat_solve_count), (1, 1, 1));
        assert_eq!(d.scalar_fn_evals, (n + 2 * n * n) as u64);
        // the matrix right-hand side really costs about 2n^3; the model charges n^3
        let actual_solves = d.solve_flops as f64;
        assert!((actual_solves - (2.0 * nf.powi(3) + 2.0 * nf * nf)).abs() <= 2.0 * nf * nf);
        assert!(actual_solves > model_solves);
    }
}
