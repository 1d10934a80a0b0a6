//! Multidimensional Simpson quadrature on axis-aligned cuboids.
//!
//! The single-cell rule samples the integrand on the `{-1, 0, 1}^n` lattice of
//! a cuboid and weights each node by `4^z`, where `z` is the number of zero
//! entries in its offset; the sum is scaled by `Δ₁⋯Δₙ / 3ⁿ`. The composite
//! rule tensors the classical 1-D composite Simpson weights over a shared grid.
//!
//! Alongside the rule itself the crate ships an exact integrator for
//! tensor-quadratic polynomials ([`oracle`]), which is used to check the rule's
//! exactness in any dimension, an expression language for integrands
//! ([`expr`]), grid-refinement studies ([`analysis`]) and the command-line
//! front end ([`cli`]).

pub mod analysis;
pub mod cli;
pub mod expr;
pub mod integrand;
pub mod oracle;
pub mod quadrature;
mod sum;

pub use integrand::{DomainErrorKind, EvalError, Integrand};
pub use quadrature::{
    composite_integrate, cuboid_from_bounds, single_cell_integrate, stencil, weights_1d, Cuboid,
    GridSpec, Limits, QuadError, QuadratureResult, StencilNode,
};
