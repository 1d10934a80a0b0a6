use std::f64::consts;
use std::fmt;

use thiserror::Error;

use super::ast::{Ast, BinaryOp, Function};
use super::lexer::{tokenize, Token, TokenKind};

/// Deepest tree the parser will build. Evaluation and printing recurse over
/// the tree, so this bounds their stack use.
pub const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    BadCharacter(char),
    MalformedNumber(String),
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnknownFunction(String),
    UnknownIdentifier(String),
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::BadCharacter(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::MalformedNumber(s) => write!(f, "malformed number {s:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found:?}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function {name:?}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier {name:?}"),
            ParseErrorKind::TooDeep => write!(f, "expression nested deeper than {MAX_DEPTH}"),
        }
    }
}

/// Lexical or syntax error at a byte offset into the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, position: usize) -> Self {
        Self { kind, position }
    }
}

pub fn parse(source: &str) -> Result<Ast, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: source.len(),
    };
    let (ast, _) = parser.expr(0)?;
    if let Some(tok) = parser.peek() {
        return Err(parser.unexpected(tok, "an operator or end of input"));
    }
    Ok(ast)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: usize,
}

/// A subtree together with its depth.
type Node = (Ast, usize);

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    fn unexpected(&self, tok: &Token, expected: &'static str) -> ParseError {
        ParseError::new(
            ParseErrorKind::UnexpectedToken {
                found: tok.text.clone(),
                expected,
            },
            tok.position,
        )
    }

    fn end_error(&self, expected: &'static str) -> ParseError {
        ParseError::new(ParseErrorKind::UnexpectedEnd { expected }, self.end)
    }

    fn check_depth(&self, depth: usize, at: usize) -> Result<(), ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::new(ParseErrorKind::TooDeep, at));
        }
        Ok(())
    }

    fn position(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn binary(&self, op: BinaryOp, lhs: Node, rhs: Node, at: usize) -> Result<Node, ParseError> {
        let depth = lhs.1.max(rhs.1) + 1;
        self.check_depth(depth, at)?;
        Ok((Ast::Binary(op, Box::new(lhs.0), Box::new(rhs.0)), depth))
    }

    fn wrap(
        &self,
        child: Node,
        at: usize,
        build: impl FnOnce(Box<Ast>) -> Ast,
    ) -> Result<Node, ParseError> {
        let depth = child.1 + 1;
        self.check_depth(depth, at)?;
        Ok((build(Box::new(child.0)), depth))
    }

    /// `nesting` counts open recursive calls and bounds parser stack use.
    fn expr(&mut self, nesting: usize) -> Result<Node, ParseError> {
        self.check_depth(nesting, self.position())?;
        let mut lhs = self.term(nesting)?;
        while let Some(op) = self.peek_kind().and_then(|k| match k {
            TokenKind::Plus => Some(BinaryOp::Add),
            TokenKind::Minus => Some(BinaryOp::Sub),
            _ => None,
        }) {
            let at = self.bump().map_or(self.end, |t| t.position);
            let rhs = self.term(nesting)?;
            lhs = self.binary(op, lhs, rhs, at)?;
        }
        Ok(lhs)
    }

    fn term(&mut self, nesting: usize) -> Result<Node, ParseError> {
        let mut lhs = self.unary(nesting)?;
        while let Some(op) = self.peek_kind().and_then(|k| match k {
            TokenKind::Star => Some(BinaryOp::Mul),
            TokenKind::Slash => Some(BinaryOp::Div),
            _ => None,
        }) {
            let at = self.bump().map_or(self.end, |t| t.position);
            let rhs = self.unary(nesting)?;
            lhs = self.binary(op, lhs, rhs, at)?;
        }
        Ok(lhs)
    }

    fn unary(&mut self, nesting: usize) -> Result<Node, ParseError> {
        if self.peek_kind() == Some(TokenKind::Minus) {
            let at = self.bump().map_or(self.end, |t| t.position);
            self.check_depth(nesting + 1, at)?;
            let child = self.unary(nesting + 1)?;
            return self.wrap(child, at, Ast::Neg);
        }
        self.power(nesting)
    }

    fn power(&mut self, nesting: usize) -> Result<Node, ParseError> {
        let base = self.atom(nesting)?;
        if self.peek_kind() == Some(TokenKind::Caret) {
            let at = self.bump().map_or(self.end, |t| t.position);
            self.check_depth(nesting + 1, at)?;
            let exponent = self.unary(nesting + 1)?;
            return self.binary(BinaryOp::Pow, base, exponent, at);
        }
        Ok(base)
    }

    fn atom(&mut self, nesting: usize) -> Result<Node, ParseError> {
        const EXPECTED: &str = "a number, variable, function or '('";
        let Some(tok) = self.bump() else {
            return Err(self.end_error(EXPECTED));
        };
        match tok.kind {
            TokenKind::Number => {
                let value: f64 = tok.text.parse().map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::MalformedNumber(tok.text.clone()),
                        tok.position,
                    )
                })?;
                if !value.is_finite() {
                    return Err(ParseError::new(
                        ParseErrorKind::MalformedNumber(tok.text.clone()),
                        tok.position,
                    ));
                }
                Ok((Ast::Constant(value), 1))
            }
            TokenKind::Identifier => self.identifier(tok, nesting),
            TokenKind::LParen => {
                let inner = self.expr(nesting + 1)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(tok, EXPECTED)),
        }
    }

    fn identifier(&mut self, tok: &Token, nesting: usize) -> Result<Node, ParseError> {
        let name = tok.text.as_str();
        let call_follows = self.peek_kind() == Some(TokenKind::LParen);
        if let Some(func) = Function::from_name(name) {
            match self.bump() {
                Some(t) if t.kind == TokenKind::LParen => {}
                Some(t) => return Err(self.unexpected(t, "'('")),
                None => return Err(self.end_error("'('")),
            }
            let arg = self.expr(nesting + 1)?;
            self.expect_rparen()?;
            return self.wrap(arg, tok.position, |a| Ast::Call(func, a));
        }
        if call_follows {
            return Err(ParseError::new(
                ParseErrorKind::UnknownFunction(name.to_string()),
                tok.position,
            ));
        }
        match name {
            "pi" => Ok((Ast::Constant(consts::PI), 1)),
            "e" => Ok((Ast::Constant(consts::E), 1)),
            _ => match variable_index(name) {
                Some(k) => Ok((Ast::Variable(k), 1)),
                None => Err(ParseError::new(
                    ParseErrorKind::UnknownIdentifier(name.to_string()),
                    tok.position,
                )),
            },
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            Some(t) if t.kind == TokenKind::RParen => Ok(()),
            Some(t) => Err(self.unexpected(t, "')'")),
            None => Err(self.end_error("')'")),
        }
    }
}

/// `x<digits>` with a value of at least 1 and no leading zero.
fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}
