//! Exact integration of tensor-quadratic polynomials and the lattice
//! identities behind the single-cell rule.
//!
//! [`integrate_poly_exact`] is the ground truth against which the lattice rule
//! is checked: it integrates each monomial in closed form and never samples
//! the polynomial. [`coefficient_functional`] applies, axis by axis, either the
//! centre pick or the half second difference to lattice samples; on samples of
//! a tensor-quadratic polynomial these recover the coefficient combinations
//! that appear when the exact integral is expanded around the cell centre.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrand::{DomainErrorKind, EvalError, Integrand};
use crate::quadrature::{single_cell_integrate_with, Cuboid, Limits, QuadError};
use crate::sum::pairwise_sum;

/// Highest monomial degree supported by [`monomial_moment`].
pub const MAX_MOMENT_DEGREE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("monomial degree {0} outside 0..=4")]
    DegreeOutOfRange(u32),
    #[error("multi-index entry {0} outside 0..=2")]
    IndexEntryOutOfRange(u8),
    #[error("half-width must be >= 0, got {0}")]
    NegativeHalfWidth(f64),
    #[error("fit spacing must be finite and > 0, got {0}")]
    NonPositiveDelta(f64),
    #[error("expected {expected} values, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Per-axis exponents `i₁…iₙ`, each in `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(entries: Vec<u8>) -> Result<Self, OracleError> {
        if let Some(&bad) = entries.iter().find(|&&e| e > 2) {
            return Err(OracleError::IndexEntryOutOfRange(bad));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Position in the dense lexicographic layout (first axis most significant).
    fn linear(&self) -> usize {
        self.0.iter().fold(0, |acc, &e| acc * 3 + e as usize)
    }

    fn from_linear(n: usize, mut linear: usize) -> Self {
        let mut entries = vec![0u8; n];
        for e in entries.iter_mut().rev() {
            *e = (linear % 3) as u8;
            linear /= 3;
        }
        Self(entries)
    }
}

/// `Σ a_{i₁…iₙ} x₁^{i₁}⋯xₙ^{iₙ}` with every exponent at most 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorPoly {
    dim: usize,
    coeffs: Vec<f64>,
}

impl TensorPoly {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; 3usize.pow(dim as u32)],
        }
    }

    /// Dense coefficients in lexicographic multi-index order.
    pub fn from_dense(dim: usize, coeffs: Vec<f64>) -> Result<Self, OracleError> {
        let expected = 3usize.pow(dim as u32);
        if coeffs.len() != expected {
            return Err(OracleError::WrongLength {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { dim, coeffs })
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// indices accumulate.
    pub fn from_terms<'a, I>(dim: usize, terms: I) -> Result<Self, OracleError>
    where
        I: IntoIterator<Item = (&'a [u8], f64)>,
    {
        let mut p = Self::zeros(dim);
        for (idx, a) in terms {
            let idx = MultiIndex::new(idx.to_vec())?;
            let slot = p.slot(&idx)?;
            p.coeffs[slot] += a;
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dense(&self) -> &[f64] {
        &self.coeffs
    }

    fn slot(&self, idx: &MultiIndex) -> Result<usize, OracleError> {
        if idx.dim() != self.dim {
            return Err(OracleError::DimensionMismatch {
                expected: self.dim,
                found: idx.dim(),
            });
        }
        Ok(idx.linear())
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Result<f64, OracleError> {
        Ok(self.coeffs[self.slot(idx)?])
    }

    pub fn set(&mut self, idx: &MultiIndex, value: f64) -> Result<(), OracleError> {
        let slot = self.slot(idx)?;
        self.coeffs[slot] = value;
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        let n = self.dim;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &a)| (MultiIndex::from_linear(n, i), a))
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.abs()).sum()
    }
}

/// Evaluates `P` at `point`, contracting one axis at a time with Horner's rule.
pub fn eval_poly(p: &TensorPoly, point: &[f64]) -> Result<f64, OracleError> {
    if point.len() != p.dim {
        return Err(OracleError::DimensionMismatch {
            expected: p.dim,
            found: point.len(),
        });
    }
    Ok(contract(p.dim, &p.coeffs, |axis, c| {
        let x = point[axis];
        (c[2] * x + c[1]) * x + c[0]
    }))
}

/// Reduces a dense `3^n` tensor to a scalar by applying `reduce` to each
/// contiguous triple, last axis first.
fn contract<R>(n: usize, values: &[f64], reduce: R) -> f64
where
    R: Fn(usize, &[f64]) -> f64,
{
    debug_assert_eq!(values.len(), 3usize.pow(n as u32));
    let mut buf = values.to_vec();
    let mut len = buf.len();
    let mut axis = n;
    while axis > 0 {
        axis -= 1;
        let next = len / 3;
        for j in 0..next {
            buf[j] = reduce(axis, &buf[3 * j..3 * j + 3]);
        }
        len = next;
    }
    buf[0]
}

impl Integrand for TensorPoly {
    fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        eval_poly(self, point).map_err(|_| {
            EvalError::new(
                DomainErrorKind::DimensionMismatch {
                    expected: self.dim,
                    found: point.len(),
                },
                point,
            )
        })
    }
}

/// `∫_{c−Δ}^{c+Δ} x^d dx`, written around the centre so that no difference of
/// nearly equal powers is formed when `|c| ≫ Δ`.
pub fn monomial_moment(degree: u32, center: f64, half_width: f64) -> Result<f64, OracleError> {
    if half_width.is_nan() || half_width < 0.0 {
        return Err(OracleError::NegativeHalfWidth(half_width));
    }
    let (c, h) = (center, half_width);
    let c2 = c * c;
    let h2 = h * h;
    let body = match degree {
        0 => 1.0,
        1 => c,
        2 => c2 + h2 / 3.0,
        3 => c * (c2 + h2),
        4 => c2 * c2 + 2.0 * c2 * h2 + h2 * h2 / 5.0,
        d => return Err(OracleError::DegreeOutOfRange(d)),
    };
    Ok(2.0 * h * body)
}

/// Exact integral of `P` over `domain`: `Σ a_i ∏ₖ moment(iₖ, αₖ, Δₖ)`.
pub fn integrate_poly_exact(p: &TensorPoly, domain: &Cuboid) -> Result<f64, OracleError> {
    if p.dim != domain.dim() {
        return Err(OracleError::DimensionMismatch {
            expected: p.dim,
            found: domain.dim(),
        });
    }
    let moments: Vec<[f64; 3]> = domain
        .centers()
        .iter()
        .zip(domain.half_widths())
        .map(|(&c, &h)| {
            Ok([
                monomial_moment(0, c, h)?,
                monomial_moment(1, c, h)?,
                monomial_moment(2, c, h)?,
            ])
        })
        .collect::<Result<_, OracleError>>()?;
    let n = p.dim;
    let terms = p.coeffs.iter().enumerate().map(|(i, &a)| {
        let idx = MultiIndex::from_linear(n, i);
        idx.0
            .iter()
            .zip(&moments)
            .fold(a, |acc, (&e, m)| acc * m[e as usize])
    });
    Ok(pairwise_sum(terms))
}

/// Coefficients of `y = p·x² + q·x + r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadFit1D {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl QuadFit1D {
    pub fn eval(&self, x: f64) -> f64 {
        (self.p * x + self.q) * x + self.r
    }

    /// Exact integral over `[center − half_width, center + half_width]`.
    pub fn integral(&self, center: f64, half_width: f64) -> Result<f64, OracleError> {
        Ok(self.p * monomial_moment(2, center, half_width)?
            + self.q * monomial_moment(1, center, half_width)?
            + self.r * monomial_moment(0, center, half_width)?)
    }
}

/// The parabola through `(x_mid − Δ, y_left)`, `(x_mid, y_mid)` and
/// `(x_mid + Δ, y_right)`, in closed form.
pub fn fit_quadratic_1d(
    x_mid: f64,
    delta: f64,
    y_left: f64,
    y_mid: f64,
    y_right: f64,
) -> Result<QuadFit1D, OracleError> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(OracleError::NonPositiveDelta(delta));
    }
    let p = (y_right - 2.0 * y_mid + y_left) / (2.0 * delta * delta);
    let slope = (y_right - y_left) / (2.0 * delta);
    let q = slope - 2.0 * p * x_mid;
    let r = y_mid - slope * x_mid + p * x_mid * x_mid;
    Ok(QuadFit1D { p, q, r })
}

/// Integrand values on the `{-1, 0, 1}^n` lattice of a cuboid, in stencil order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeSamples {
    dim: usize,
    values: Vec<f64>,
}

impl LatticeSamples {
    pub fn from_values(dim: usize, values: Vec<f64>) -> Result<Self, OracleError> {
        let expected = 3usize.pow(dim as u32);
        if values.len() != expected {
            return Err(OracleError::WrongLength {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample at a lattice offset; `None` if the offset is not in `{-1,0,1}^n`.
    pub fn get(&self, offset: &[i8]) -> Option<f64> {
        if offset.len() != self.dim || offset.iter().any(|j| !(-1..=1).contains(j)) {
            return None;
        }
        let slot = offset
            .iter()
            .fold(0usize, |acc, &j| acc * 3 + (j + 1) as usize);
        Some(self.values[slot])
    }
}

/// Evaluates `f` at every lattice point `α + j ⊙ Δ`.
pub fn lattice_samples<F>(f: &F, domain: &Cuboid) -> Result<LatticeSamples, OracleError>
where
    F: Integrand + ?Sized,
{
    lattice_samples_with(f, domain, &Limits::default())
}

pub fn lattice_samples_with<F>(
    f: &F,
    domain: &Cuboid,
    limits: &Limits,
) -> Result<LatticeSamples, OracleError>
where
    F: Integrand + ?Sized,
{
    let n = domain.dim();
    let nodes = crate::quadrature::stencil_with_limits(n, limits)?;
    let mut point = vec![0.0; n];
    let mut values = Vec::with_capacity(nodes.len());
    for node in &nodes {
        for (k, x) in point.iter_mut().enumerate() {
            *x = domain.centers()[k] + f64::from(node.offset[k]) * domain.half_widths()[k];
        }
        values.push(f.eval(&point).map_err(QuadError::from)?);
    }
    Ok(LatticeSamples { dim: n, values })
}

/// Per-axis linear functional on lattice samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisFunctional {
    /// Pick the `j = 0` sample.
    Center,
    /// `(w₋₁ − 2w₀ + w₊₁) / 2`.
    SecondDiff,
}

/// Applies the tensor product of per-axis functionals to lattice samples.
///
/// For samples of a tensor-quadratic polynomial, the all-`Center` mask returns
/// the value at the cell centre and each `SecondDiff` axis `k` selects the
/// `xₖ²` coefficient scaled by `Δₖ²`, with the remaining axes evaluated at
/// their centres.
pub fn coefficient_functional(
    samples: &LatticeSamples,
    mask: &[AxisFunctional],
) -> Result<f64, OracleError> {
    if mask.len() != samples.dim {
        return Err(OracleError::DimensionMismatch {
            expected: samples.dim,
            found: mask.len(),
        });
    }
    Ok(contract(
        samples.dim,
        &samples.values,
        |axis, w| match mask[axis] {
            AxisFunctional::Center => w[1],
            AxisFunctional::SecondDiff => (w[0] - 2.0 * w[1] + w[2]) / 2.0,
        },
    ))
}

/// All `2^n` masks, ordered by the binary counter with `SecondDiff = 1` and the
/// first axis most significant.
pub fn all_masks(n: usize) -> Vec<Vec<AxisFunctional>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|k| {
                    if bits >> (n - 1 - k) & 1 == 1 {
                        AxisFunctional::SecondDiff
                    } else {
                        AxisFunctional::Center
                    }
                })
                .collect()
        })
        .collect()
}

/// Reassembles the cell integral from the functionals:
/// `∏ 2Δₖ · Σ_masks 3^{−#SecondDiff} · functional(mask)`.
pub fn integral_from_functionals(
    samples: &LatticeSamples,
    domain: &Cuboid,
) -> Result<f64, OracleError> {
    if samples.dim != domain.dim() {
        return Err(OracleError::DimensionMismatch {
            expected: samples.dim,
            found: domain.dim(),
        });
    }
    let mut terms = Vec::with_capacity(1 << samples.dim);
    for mask in all_masks(samples.dim) {
        let diffs = mask
            .iter()
            .filter(|&&m| m == AxisFunctional::SecondDiff)
            .count();
        terms.push(coefficient_functional(samples, &mask)? / 3f64.powi(diffs as i32));
    }
    Ok(domain.volume() * pairwise_sum(terms))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub rel_err: f64,
}

/// Outcome of [`verify_conjecture`]. Serializes to
/// `{n, trials, seed, rel_tol, max_rel_err, failures, pass}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub rel_tol: f64,
    pub max_rel_err: f64,
    pub failures: Vec<TrialFailure>,
    pub pass: bool,
}

/// One random polynomial and cell: coefficients in `[-1, 1]`, centres in
/// `[-2, 2]`, half-widths in `[0.1, 2]`.
pub fn random_instance<R: Rng>(n: usize, rng: &mut R) -> (TensorPoly, Cuboid) {
    let coeffs = (0..3usize.pow(n as u32))
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    let centers = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    let half_widths = (0..n).map(|_| rng.gen_range(0.1..=2.0)).collect();
    let cell = Cuboid::new(centers, half_widths).expect("sampled cuboid is valid");
    (TensorPoly { dim: n, coeffs }, cell)
}

/// Generator for trial `trial` of a seeded run. Each trial has its own stream,
/// so trials can be drawn in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `|rule − exact| / max(|exact|, 10⁻³ · ‖a‖₁ · volume)`.
pub fn relative_error(rule: f64, exact: f64, p: &TensorPoly, domain: &Cuboid) -> f64 {
    let floor = 1e-3 * p.l1_norm() * domain.volume();
    let denom = exact.abs().max(floor);
    if denom == 0.0 {
        return if rule == exact { 0.0 } else { f64::INFINITY };
    }
    (rule - exact).abs() / denom
}

/// Checks the lattice rule against the exact integral on `trials` random
/// tensor-quadratic polynomials in dimension `n`.
pub fn verify_conjecture(
    n: usize,
    trials: u64,
    seed: u64,
    rel_tol: f64,
) -> Result<VerificationReport, OracleError> {
    verify_conjecture_with(n, trials, seed, rel_tol, &Limits::default())
}

pub fn verify_conjecture_with(
    n: usize,
    trials: u64,
    seed: u64,
    rel_tol: f64,
    limits: &Limits,
) -> Result<VerificationReport, OracleError> {
    limits.check_dim(n)?;
    if trials == 0 {
        return Err(OracleError::InvalidParameter("trials must be >= 1".into()));
    }
    if !rel_tol.is_finite() || rel_tol <= 0.0 {
        return Err(OracleError::InvalidParameter(format!(
            "rel_tol must be finite and > 0, got {rel_tol}"
        )));
    }

    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (p, cell) = random_instance(n, &mut trial_rng(seed, trial));
            let rule = single_cell_integrate_with(&p, &cell, limits)?.value;
            let exact = integrate_poly_exact(&p, &cell)?;
            Ok(relative_error(rule, exact, &p, &cell))
        })
        .collect::<Result<_, OracleError>>()?;

    let failures: Vec<TrialFailure> = errors
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_nan() || **e > rel_tol)
        .map(|(trial, &rel_err)| TrialFailure {
            trial: trial as u64,
            rel_err,
        })
        .collect();
    let max_rel_err = errors.iter().copied().fold(0.0, f64::max);
    Ok(VerificationReport {
        n,
        trials,
        seed,
        rel_tol,
        max_rel_err,
        pass: failures.is_empty(),
        failures,
    })
}
