use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Function {
    pub const ALL: [Function; 7] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Exp,
        Function::Log,
        Function::Sqrt,
        Function::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Constant(f64),
    /// `xk`, with `k >= 1`.
    Variable(usize),
    Neg(Box<Ast>),
    Binary(BinaryOp, Box<Ast>, Box<Ast>),
    Call(Function, Box<Ast>),
}

/// Binding strength: sums 1, products 2, negation 3, powers 4, atoms 5.
fn precedence(node: &Ast) -> u8 {
    match node {
        Ast::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
        Ast::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
        Ast::Neg(_) => 3,
        Ast::Binary(BinaryOp::Pow, ..) => 4,
        Ast::Constant(_) | Ast::Variable(_) | Ast::Call(..) => 5,
    }
}

struct Operand<'a>(&'a Ast, bool);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Source form with only the parentheses the grammar needs. Trees returned by
/// `parse` print to text that parses back to the same tree, and never nests
/// deeper than the text they were parsed from.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Constant(c) => write!(f, "{c:?}"),
            Ast::Variable(k) => write!(f, "x{k}"),
            Ast::Neg(child) => write!(f, "-{}", Operand(child, precedence(child) < 3)),
            Ast::Binary(BinaryOp::Pow, base, exp) => write!(
                f,
                "{}^{}",
                Operand(base, precedence(base) < 5),
                Operand(exp, precedence(exp) < 3)
            ),
            Ast::Binary(op, lhs, rhs) => {
                let p = precedence(self);
                write!(
                    f,
                    "{} {} {}",
                    Operand(lhs, precedence(lhs) < p),
                    op.symbol(),
                    Operand(rhs, precedence(rhs) <= p)
                )
            }
            Ast::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
