//! The lattice stencil, the single-cell rule and the composite tensor rule.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::integrand::{EvalError, Integrand};
use crate::sum::PairwiseSum;

/// Default maximum dimension for stencil-based operations (`3^10 = 59049` nodes).
pub const DEFAULT_MAX_DIM: usize = 10;
/// Default maximum number of grid points for a composite run.
pub const DEFAULT_MAX_POINTS: u64 = 100_000_000;

/// Grid points per parallel work item, as a power of two. Chunks must be
/// aligned to a power of two so the summation tree matches the serial one.
const CHUNK_LEVEL: u32 = 12;
const CHUNK_LEN: u64 = 1 << CHUNK_LEVEL;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a domain needs at least one axis")]
    EmptyDimension,
    #[error("inverted bounds on axis {axis}: lower {lower} > upper {upper}")]
    InvertedBounds { axis: usize, lower: f64, upper: f64 },
    #[error("non-finite value on axis {axis}")]
    NonFinite { axis: usize },
    #[error("negative half-width {value} on axis {axis}")]
    NegativeHalfWidth { axis: usize, value: f64 },
    #[error("dimension {n} outside the supported range 1..={cap}")]
    DimensionOutOfRange { n: usize, cap: usize },
    #[error("axis {axis} needs at least one cell")]
    ZeroCells { axis: usize },
    #[error("grid has {points} points, over the evaluation budget of {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
    #[error("integrand failed: {0}")]
    Integrand(#[from] EvalError),
}

/// Resource caps for stencil and grid construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_dim: usize,
    pub max_points: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

impl Limits {
    pub fn check_dim(&self, n: usize) -> Result<(), QuadError> {
        if n == 0 || n > self.max_dim {
            return Err(QuadError::DimensionOutOfRange {
                n,
                cap: self.max_dim,
            });
        }
        Ok(())
    }
}

/// Axis-aligned box `∏ [αⱼ − Δⱼ, αⱼ + Δⱼ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cuboid {
    centers: Vec<f64>,
    half_widths: Vec<f64>,
}

impl Cuboid {
    pub fn new(centers: Vec<f64>, half_widths: Vec<f64>) -> Result<Self, QuadError> {
        if centers.len() != half_widths.len() {
            return Err(QuadError::DimensionMismatch {
                expected: centers.len(),
                found: half_widths.len(),
            });
        }
        if centers.is_empty() {
            return Err(QuadError::EmptyDimension);
        }
        for (axis, (&c, &h)) in centers.iter().zip(&half_widths).enumerate() {
            if !c.is_finite() || !h.is_finite() {
                return Err(QuadError::NonFinite { axis });
            }
            if h < 0.0 {
                return Err(QuadError::NegativeHalfWidth { axis, value: h });
            }
        }
        Ok(Self {
            centers,
            half_widths,
        })
    }

    /// The unit cube `[0, 1]^n`.
    pub fn unit(n: usize) -> Result<Self, QuadError> {
        Self::new(vec![0.5; n], vec![0.5; n])
    }

    pub fn dim(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn lower(&self) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.half_widths)
            .map(|(c, h)| c - h)
            .collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.half_widths)
            .map(|(c, h)| c + h)
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|h| 2.0 * h).product()
    }
}

/// Builds a cuboid from per-axis lower and upper bounds.
pub fn cuboid_from_bounds(lower: &[f64], upper: &[f64]) -> Result<Cuboid, QuadError> {
    if lower.len() != upper.len() {
        return Err(QuadError::DimensionMismatch {
            expected: lower.len(),
            found: upper.len(),
        });
    }
    let mut centers = Vec::with_capacity(lower.len());
    let mut half_widths = Vec::with_capacity(lower.len());
    for (axis, (&a, &b)) in lower.iter().zip(upper).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            return Err(QuadError::NonFinite { axis });
        }
        if a > b {
            return Err(QuadError::InvertedBounds {
                axis,
                lower: a,
                upper: b,
            });
        }
        centers.push((b + a) / 2.0);
        half_widths.push((b - a) / 2.0);
    }
    Cuboid::new(centers, half_widths)
}

/// One node of the single-cell lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StencilNode {
    /// Offsets in `{-1, 0, 1}`, one per axis.
    pub offset: Vec<i8>,
    /// `4^z` with `z` the number of zero offsets.
    pub coefficient: u64,
}

impl StencilNode {
    pub fn zero_count(&self) -> usize {
        self.offset.iter().filter(|&&j| j == 0).count()
    }
}

/// The `3^n` nodes of the single-cell rule in lexicographic offset order
/// (first axis most significant, `-1 < 0 < 1`).
pub fn stencil(n: usize) -> Result<Vec<StencilNode>, QuadError> {
    stencil_with_limits(n, &Limits::default())
}

pub fn stencil_with_limits(n: usize, limits: &Limits) -> Result<Vec<StencilNode>, QuadError> {
    limits.check_dim(n)?;
    let count = 3usize.pow(n as u32);
    let mut nodes = Vec::with_capacity(count);
    let mut offset = vec![-1i8; n];
    for _ in 0..count {
        let zeros = offset.iter().filter(|&&j| j == 0).count() as u32;
        nodes.push(StencilNode {
            offset: offset.clone(),
            coefficient: 4u64.pow(zeros),
        });
        for j in offset.iter_mut().rev() {
            if *j < 1 {
                *j += 1;
                break;
            }
            *j = -1;
        }
    }
    Ok(nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub evaluations: u64,
}

/// Applies the lattice rule to one cuboid:
/// `(∏ Δⱼ / 3ⁿ) · Σ 4^z · f(α + j ⊙ Δ)`.
pub fn single_cell_integrate<F>(f: &F, domain: &Cuboid) -> Result<QuadratureResult, QuadError>
where
    F: Integrand + ?Sized,
{
    single_cell_integrate_with(f, domain, &Limits::default())
}

pub fn single_cell_integrate_with<F>(
    f: &F,
    domain: &Cuboid,
    limits: &Limits,
) -> Result<QuadratureResult, QuadError>
where
    F: Integrand + ?Sized,
{
    let n = domain.dim();
    let nodes = stencil_with_limits(n, limits)?;
    let mut point = vec![0.0; n];
    let mut acc = PairwiseSum::new();
    for node in &nodes {
        for (k, x) in point.iter_mut().enumerate() {
            *x = domain.centers[k] + f64::from(node.offset[k]) * domain.half_widths[k];
        }
        let w = f.eval(&point)?;
        acc.add(node.coefficient as f64 * w);
    }
    let scale: f64 = domain.half_widths.iter().product::<f64>() / 3f64.powi(n as i32);
    Ok(QuadratureResult {
        value: acc.finish() * scale,
        evaluations: nodes.len() as u64,
    })
}

/// Cells per axis for the composite rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    cells: Vec<usize>,
}

impl GridSpec {
    pub fn new(cells: Vec<usize>, limits: &Limits) -> Result<Self, QuadError> {
        if cells.is_empty() {
            return Err(QuadError::EmptyDimension);
        }
        if let Some(axis) = cells.iter().position(|&m| m == 0) {
            return Err(QuadError::ZeroCells { axis });
        }
        let points = cells
            .iter()
            .fold(1u128, |acc, &m| acc.saturating_mul(2 * m as u128 + 1));
        if points > u128::from(limits.max_points) {
            return Err(QuadError::BudgetExceeded {
                points,
                budget: limits.max_points,
            });
        }
        Ok(Self { cells })
    }

    /// Same cell count on every axis.
    pub fn uniform(dim: usize, cells: usize, limits: &Limits) -> Result<Self, QuadError> {
        Self::new(vec![cells; dim], limits)
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    /// `∏ (2mₖ + 1)`.
    pub fn points(&self) -> u64 {
        self.cells.iter().map(|&m| 2 * m as u64 + 1).product()
    }
}

/// Integer pattern `1, 4, 2, 4, …, 2, 4, 1` of the 1-D composite rule.
fn composite_pattern(m: usize) -> Vec<u8> {
    (0..=2 * m)
        .map(|i| match i {
            0 => 1,
            i if i == 2 * m => 1,
            i if i % 2 == 1 => 4,
            _ => 2,
        })
        .collect()
}

/// Composite Simpson weights for `m` cells on an axis of the given half-width.
pub fn weights_1d(m: usize, half_width: f64) -> Result<Vec<f64>, QuadError> {
    if m == 0 {
        return Err(QuadError::ZeroCells { axis: 0 });
    }
    let h = half_width / m as f64;
    Ok(composite_pattern(m)
        .into_iter()
        .map(|c| h / 3.0 * f64::from(c))
        .collect())
}

/// Tensor composite rule over one shared grid. Each grid point is evaluated
/// once; points are visited in lexicographic order and summed pairwise, so
/// the result does not depend on how the work is split across threads.
pub fn composite_integrate<F>(
    f: &F,
    domain: &Cuboid,
    grid: &GridSpec,
) -> Result<QuadratureResult, QuadError>
where
    F: Integrand + ?Sized,
{
    let n = domain.dim();
    if grid.dim() != n {
        return Err(QuadError::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let axes: Vec<AxisGrid> = (0..n)
        .map(|k| AxisGrid::new(domain.centers[k], domain.half_widths[k], grid.cells[k]))
        .collect();
    let total = grid.points();
    let chunks = total.div_ceil(CHUNK_LEN);

    let partials: Vec<Result<f64, EvalError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_LEN;
            let end = (start + CHUNK_LEN).min(total);
            sum_range(f, &axes, start, end)
        })
        .collect();

    let mut acc = PairwiseSum::new();
    for (c, partial) in partials.into_iter().enumerate() {
        let value = partial?;
        let full = (c as u64 + 1) * CHUNK_LEN <= total;
        if full {
            acc.push_block(CHUNK_LEVEL, value);
        } else {
            acc.add(value);
        }
    }

    let divisor: f64 = grid.cells.iter().map(|&m| 3.0 * m as f64).product();
    let scale = domain.half_widths.iter().product::<f64>() / divisor;
    Ok(QuadratureResult {
        value: acc.finish() * scale,
        evaluations: total,
    })
}

struct AxisGrid {
    coords: Vec<f64>,
    pattern: Vec<u8>,
}

impl AxisGrid {
    fn new(center: f64, half_width: f64, m: usize) -> Self {
        let mf = m as f64;
        let coords = (0..=2 * m)
            .map(|i| center + half_width * ((i as f64 - mf) / mf))
            .collect();
        Self {
            coords,
            pattern: composite_pattern(m),
        }
    }

    fn len(&self) -> usize {
        self.coords.len()
    }
}

/// Pairwise sum of `weight · f(point)` over grid points `start..end`
/// (lexicographic linear indices, last axis fastest).
fn sum_range<F>(f: &F, axes: &[AxisGrid], start: u64, end: u64) -> Result<f64, EvalError>
where
    F: Integrand + ?Sized,
{
    let n = axes.len();
    let mut index = vec![0usize; n];
    let mut rest = start;
    for k in (0..n).rev() {
        let len = axes[k].len() as u64;
        index[k] = (rest % len) as usize;
        rest /= len;
    }
    let mut point: Vec<f64> = (0..n).map(|k| axes[k].coords[index[k]]).collect();
    let mut acc = PairwiseSum::new();
    for _ in start..end {
        let weight: f64 = (0..n)
            .map(|k| f64::from(axes[k].pattern[index[k]]))
            .product();
        acc.add(weight * f.eval(&point)?);
        for k in (0..n).rev() {
            index[k] += 1;
            if index[k] < axes[k].len() {
                point[k] = axes[k].coords[index[k]];
                break;
            }
            index[k] = 0;
            point[k] = axes[k].coords[0];
        }
    }
    Ok(acc.finish())
}

/// Serial reference implementation of [`composite_integrate`] used to check
/// that chunked evaluation reproduces the single-threaded summation tree.
#[cfg(test)]
fn composite_serial<F: Integrand + ?Sized>(f: &F, domain: &Cuboid, grid: &GridSpec) -> f64 {
    let n = domain.dim();
    let axes: Vec<AxisGrid> = (0..n)
        .map(|k| AxisGrid::new(domain.centers[k], domain.half_widths[k], grid.cells[k]))
        .collect();
    let s = sum_range(f, &axes, 0, grid.points()).unwrap();
    let divisor: f64 = grid.cells.iter().map(|&m| 3.0 * m as f64).product();
    s * (domain.half_widths.iter().product::<f64>() / divisor)
}

/// Plain sum of the stencil coefficients, `6^n` in closed form.
pub fn stencil_coefficient_sum(nodes: &[StencilNode]) -> u64 {
    nodes.iter().map(|n| n.coefficient).sum()
}
