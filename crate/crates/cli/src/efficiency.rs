//! Index-versus-dimension curves as CSV.

use rayon::prelude::*;

use nlsys::efficiency::{index_row, validate_range, CostMethod, IndexKind, MethodCostModel};
use nlsys::{with_precision, NlError, Real, Scalar};

use crate::format::{csv_line, fixed_sig};

pub const SIGNIFICANT_DIGITS: usize = 10;

/// Header `n,SH4,MN4,M3,M4` then one row per `n` in `n_from..=n_to`.
pub fn efficiency_csv(kind: IndexKind, n_from: u64, n_to: u64, precision_bits: u32) -> Result<String, NlError> {
    validate_range(n_from, n_to)?;
    let models = MethodCostModel::all();
    let rows: Vec<String> = (n_from..=n_to)
        .into_par_iter()
        .map(|n| {
            with_precision(precision_bits, || {
                let row = index_row::<Real>(&models, n, kind);
                let mut cells = vec![n.to_string()];
                cells.extend(row.values.iter().map(|v| fixed_sig(v.to_f64(), SIGNIFICANT_DIGITS)));
                csv_line(&cells)
            })
        })
        .collect::<Result<_, _>>()?;

    let mut header = vec!["n"];
    header.extend(CostMethod::ALL.iter().map(|m| m.name()));
    let mut out = csv_line(&header);
    out.extend(rows);
    Ok(out)
}
