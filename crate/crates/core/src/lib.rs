pub mod convergence;
pub mod efficiency;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod real;
pub mod reference;
pub mod scalar;
pub mod solvers;

pub use convergence::{coc, order_conditions, AchievedOrder, CocBasis, CocEstimate, OrderConditionReport, OrderField};
pub use efficiency::{classical_index, flops_like_index, CostMethod, IndexKind, MethodCostModel};
pub use error::{NlError, Result};
pub use linalg::{FlopCounter, LuFactors, Matrix, NormKind, Vector};
pub use problems::{builtin, Builtin, BuiltinKind, FnSystem, NonlinearSystem};
pub use real::{with_precision, working_precision, PrecisionGuard, Real, DEFAULT_PRECISION_BITS};
pub use scalar::Scalar;
pub use solvers::{solve, IterationRecord, IterationTrace, Method, MethodParams, SolverConfig, Status};

pub type RealVector = Vector<Real>;
pub type RealMatrix = Matrix<Real>;
