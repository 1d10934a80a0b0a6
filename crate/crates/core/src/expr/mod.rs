//! Arithmetic integrand expressions over the variables `x1`, `x2`, ….
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'e' | 'x'<digits> | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | log | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than a leading minus, so
//! `-x1^2` is `-(x1^2)` and `2^3^2` is `2^9`.

mod ast;
mod eval;
mod lexer;
mod parser;

pub use ast::{Ast, BinaryOp, Function};
pub use eval::eval_ast;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, ParseError, ParseErrorKind, MAX_DEPTH};

use std::collections::BTreeSet;

/// Indices `k` of every `xk` appearing in the tree.
pub fn free_variables(tree: &Ast) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    collect_variables(tree, &mut out);
    out
}

fn collect_variables(tree: &Ast, out: &mut BTreeSet<usize>) {
    match tree {
        Ast::Constant(_) => {}
        Ast::Variable(k) => {
            out.insert(*k);
        }
        Ast::Neg(child) | Ast::Call(_, child) => collect_variables(child, out),
        Ast::Binary(_, lhs, rhs) => {
            collect_variables(lhs, out);
            collect_variables(rhs, out);
        }
    }
}
