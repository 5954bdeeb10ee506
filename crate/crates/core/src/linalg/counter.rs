use serde::Serialize;

/// Operation counts accumulated over one solver run.
///
/// `flops` counts each scalar multiply, add/subtract and divide as one flop.
/// Comparisons and row swaps are free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlopCounter {
    pub flops: u64,
    /// The share of `flops` spent in LU factorizations.
    pub lu_flops: u64,
    /// The share of `flops` spent in triangular solves.
    pub solve_flops: u64,
    pub lu_count: u64,
    pub vec_solve_count: u64,
    pub mat_solve_count: u64,
    pub scalar_fn_evals: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_flops(&mut self, n: usize) {
        self.flops += n as u64;
    }

    pub(crate) fn add_fn_evals(&mut self, n: usize) {
        self.scalar_fn_evals += n as u64;
    }

    /// Counts accumulated since `earlier`.
    ///
    /// Panics if `earlier` is not a prior snapshot of this counter.
    pub fn since(&self, earlier: &FlopCounter) -> FlopCounter {
        FlopCounter {
            flops: self.flops - earlier.flops,
            lu_flops: self.lu_flops - earlier.lu_flops,
            solve_flops: self.solve_flops - earlier.solve_flops,
            lu_count: self.lu_count - earlier.lu_count,
            vec_solve_count: self.vec_solve_count - earlier.vec_solve_count,
            mat_solve_count: self.mat_solve_count - earlier.mat_solve_count,
            scalar_fn_evals: self.scalar_fn_evals - earlier.scalar_fn_evals,
        }
    }
}
