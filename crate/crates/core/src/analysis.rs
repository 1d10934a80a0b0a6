//! Grid-refinement studies of the composite rule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrand::Integrand;
use crate::oracle::{integrate_poly_exact, OracleError, TensorPoly};
use crate::quadrature::{composite_integrate, Cuboid, GridSpec, Limits, QuadError};

/// Errors below `ROUNDOFF_FACTOR · ε · |reference|` are treated as exact and
/// excluded from order estimates.
pub const ROUNDOFF_FACTOR: f64 = 100.0;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("a study needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("base cell count must be >= 1")]
    ZeroBaseCells,
    #[error("reference value {0} is not finite")]
    NonFiniteReference(f64),
    #[error("cell count overflows at level {0}")]
    CellOverflow(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub cells_per_axis: usize,
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub reference: f64,
    pub rows: Vec<StudyRow>,
    /// `log₂(errₗ / errₗ₊₁)` for each consecutive pair of rows that are both
    /// above the round-off floor, in level order.
    pub estimated_orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    /// One line per level: `cells_per_axis,value,abs_error,evaluations`.
    pub fn to_csv(&self) -> Result<String, AnalysisError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn last_order(&self) -> Option<f64> {
        self.estimated_orders.last().copied()
    }
}

/// Where the exact value of a study comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Explicit(f64),
    Poly(TensorPoly),
}

pub fn reference_or_oracle(reference: &Reference, domain: &Cuboid) -> Result<f64, OracleError> {
    match reference {
        Reference::Explicit(v) => Ok(*v),
        Reference::Poly(p) => integrate_poly_exact(p, domain),
    }
}

/// Runs the composite rule with `base_cells · 2^ℓ` cells on every axis for
/// `ℓ = 0..levels` and estimates the convergence order from successive errors.
pub fn convergence_study<F>(
    f: &F,
    domain: &Cuboid,
    reference: f64,
    levels: usize,
    base_cells: usize,
    limits: &Limits,
) -> Result<ConvergenceStudy, AnalysisError>
where
    F: Integrand + ?Sized,
{
    if levels < 2 {
        return Err(AnalysisError::TooFewLevels(levels));
    }
    if base_cells == 0 {
        return Err(AnalysisError::ZeroBaseCells);
    }
    if !reference.is_finite() {
        return Err(AnalysisError::NonFiniteReference(reference));
    }
    let cells: Vec<usize> = (0..levels)
        .map(|l| {
            1usize
                .checked_shl(l as u32)
                .and_then(|s| s.checked_mul(base_cells))
                .filter(|m| m.checked_mul(2).is_some())
                .ok_or(AnalysisError::CellOverflow(l))
        })
        .collect::<Result<_, _>>()?;
    // fail on the budget before doing any work
    let grids: Vec<GridSpec> = cells
        .iter()
        .rev()
        .map(|&m| GridSpec::uniform(domain.dim(), m, limits))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .rev()
        .collect();

    let mut rows = Vec::with_capacity(levels);
    for (grid, &m) in grids.iter().zip(&cells) {
        let r = composite_integrate(f, domain, grid)?;
        rows.push(StudyRow {
            cells_per_axis: m,
            value: r.value,
            abs_error: (r.value - reference).abs(),
            evaluations: r.evaluations,
        });
    }

    let floor = ROUNDOFF_FACTOR * f64::EPSILON * reference.abs();
    let usable = |e: f64| e > 0.0 && e >= floor;
    let estimated_orders = rows
        .windows(2)
        .filter(|w| usable(w[0].abs_error) && usable(w[1].abs_error))
        .map(|w| (w[0].abs_error / w[1].abs_error).log2())
        .collect();

    Ok(ConvergenceStudy {
        reference,
        rows,
        estimated_orders,
    })
}
