use serde::Serialize;

use crate::bounds::{BoundReport, Separation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    #[serde(flatten)]
    pub report: BoundReport,
    /// Name of the smallest bound in this cell.
    pub smallest: &'static str,
}

/// One [`BoundReport`] per `(N, δ, p)` cell, in grid order.
pub fn compare_bounds(grid: &[(u32, Separation, f64)]) -> Result<Vec<CompareRow>> {
    if grid.is_empty() {
        return Err(Error::Validation("comparison grid is empty".into()));
    }
    grid.iter()
        .map(|(n, delta, p)| {
            let report = BoundReport::compute(*n, delta, *p)?;
            let smallest = report.smallest();
            Ok(CompareRow { report, smallest })
        })
        .collect()
}
