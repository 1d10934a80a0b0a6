use crate::integrand::{DomainErrorKind, EvalError, Integrand};

use super::ast::{Ast, BinaryOp, Function};

/// Integer exponents up to this magnitude are evaluated by repeated
/// multiplication; anything else goes through `powf`.
const SMALL_INT_POWER: f64 = 64.0;

/// Evaluates `tree` with `xk` bound to `point[k - 1]`.
///
/// Non-finite intermediate values, division by zero and out-of-domain
/// `log`/`sqrt` arguments are errors.
pub fn eval_ast(tree: &Ast, point: &[f64]) -> Result<f64, EvalError> {
    let fail = |kind| EvalError::new(kind, point);
    let finite = |v: f64, op: &'static str| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail(DomainErrorKind::NonFinite(op)))
        }
    };
    match tree {
        Ast::Constant(c) => finite(*c, "constant"),
        Ast::Variable(k) => point
            .get(k - 1)
            .copied()
            .ok_or_else(|| fail(DomainErrorKind::MissingVariable { index: *k }))
            .and_then(|v| finite(v, "variable")),
        Ast::Neg(child) => Ok(-eval_ast(child, point)?),
        Ast::Binary(op, lhs, rhs) => {
            let a = eval_ast(lhs, point)?;
            let b = eval_ast(rhs, point)?;
            match op {
                BinaryOp::Add => finite(a + b, "+"),
                BinaryOp::Sub => finite(a - b, "-"),
                BinaryOp::Mul => finite(a * b, "*"),
                BinaryOp::Div => {
                    if b == 0.0 {
                        return Err(fail(DomainErrorKind::DivisionByZero));
                    }
                    finite(a / b, "/")
                }
                BinaryOp::Pow => finite(power(a, b), "^"),
            }
        }
        Ast::Call(func, arg) => {
            let x = eval_ast(arg, point)?;
            let v = match func {
                Function::Sin => x.sin(),
                Function::Cos => x.cos(),
                Function::Tan => x.tan(),
                Function::Exp => x.exp(),
                Function::Log => {
                    if x <= 0.0 {
                        return Err(fail(DomainErrorKind::LogNonPositive));
                    }
                    x.ln()
                }
                Function::Sqrt => {
                    if x < 0.0 {
                        return Err(fail(DomainErrorKind::SqrtNegative));
                    }
                    x.sqrt()
                }
                Function::Abs => x.abs(),
            };
            finite(v, func.name())
        }
    }
}

pub(crate) fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= SMALL_INT_POWER {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

impl Integrand for Ast {
    fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        eval_ast(self, point)
    }
}
