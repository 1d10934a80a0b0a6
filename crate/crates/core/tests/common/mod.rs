#![allow(dead_code)]

//! Helpers shared by the integration tests: an independent string-level
//! interpreter for the expression grammar, a random expression generator,
//! the parser corpus, and the hand-expanded n = 2 / n = 3 coefficient
//! identities.

use rand::Rng;
use simpson_nd::oracle::{LatticeSamples, MultiIndex, TensorPoly};
use simpson_nd::Cuboid;

// ---------------------------------------------------------------------------
// Direct interpreter: evaluates source text without building a tree. Any
// syntax or domain problem is reported as `Err(())`.

pub fn interpret(source: &str, point: &[f64]) -> Result<f64, ()> {
    let mut it = Interp {
        s: source.as_bytes(),
        i: 0,
        point,
    };
    let v = it.expr()?;
    it.ws();
    if it.i != it.s.len() {
        return Err(());
    }
    Ok(v)
}

struct Interp<'a> {
    s: &'a [u8],
    i: usize,
    point: &'a [f64],
}

fn fin(v: f64) -> Result<f64, ()> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(())
    }
}

impl Interp<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.i < self.s.len() && self.s[self.i] == c {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, ()> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v = fin(v + self.term()?)?;
            } else if self.eat(b'-') {
                v = fin(v - self.term()?)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ()> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v = fin(v * self.unary()?)?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                if d == 0.0 {
                    return Err(());
                }
                v = fin(v / d)?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ()> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<f64, ()> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.unary()?;
            let v = if e.fract() == 0.0 && e.abs() <= 64.0 {
                base.powi(e as i32)
            } else {
                base.powf(e)
            };
            return fin(v);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, ()> {
        self.ws();
        let start = self.i;
        let c = *self.s.get(self.i).ok_or(())?;
        if c == b'(' {
            self.i += 1;
            let v = self.expr()?;
            return if self.eat(b')') { Ok(v) } else { Err(()) };
        }
        if c.is_ascii_digit() || c == b'.' {
            while self.i < self.s.len()
                && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.')
            {
                self.i += 1;
            }
            if self.i + 1 < self.s.len()
                && (self.s[self.i] == b'e' || self.s[self.i] == b'E')
                && (self.s[self.i + 1].is_ascii_digit()
                    || self.s[self.i + 1] == b'+'
                    || self.s[self.i + 1] == b'-')
            {
                self.i += 2;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
            }
            let text = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| ())?;
            return fin(text.parse().map_err(|_| ())?);
        }
        if c.is_ascii_alphabetic() {
            while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                self.i += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.i]).map_err(|_| ())?;
            let func: Option<fn(f64) -> Result<f64, ()>> = match name {
                "sin" => Some(|x| Ok(x.sin())),
                "cos" => Some(|x| Ok(x.cos())),
                "tan" => Some(|x| Ok(x.tan())),
                "exp" => Some(|x| Ok(x.exp())),
                "log" => Some(|x| if x <= 0.0 { Err(()) } else { Ok(x.ln()) }),
                "sqrt" => Some(|x| if x < 0.0 { Err(()) } else { Ok(x.sqrt()) }),
                "abs" => Some(|x| Ok(x.abs())),
                _ => None,
            };
            if let Some(func) = func {
                if !self.eat(b'(') {
                    return Err(());
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(());
                }
                return fin(func(arg)?);
            }
            return match name {
                "pi" => Ok(std::f64::consts::PI),
                "e" => Ok(std::f64::consts::E),
                _ => {
                    let digits = name.strip_prefix('x').ok_or(())?;
                    if digits.is_empty() || digits.starts_with('0') {
                        return Err(());
                    }
                    let k: usize = digits.parse().map_err(|_| ())?;
                    self.point.get(k - 1).copied().ok_or(())
                }
            };
        }
        Err(())
    }
}

// ---------------------------------------------------------------------------
// Random well-formed expressions over x1..x3.

pub fn random_expression<R: Rng>(rng: &mut R, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..5) {
            0 => format!("{}", rng.gen_range(0..10)),
            1 => format!("{:.3}", rng.gen_range(0.0..5.0)),
            2 => ["pi", "e"][rng.gen_range(0..2)].to_string(),
            _ => format!("x{}", rng.gen_range(1..=3)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => format!("-{}", random_expression(rng, d)),
        1 => {
            let f = ["sin", "cos", "tan", "exp", "log", "sqrt", "abs"][rng.gen_range(0..7)];
            format!("{f}({})", random_expression(rng, d))
        }
        2 => format!("({})", random_expression(rng, d)),
        3 => format!("{}^{}", atomish(rng, d), rng.gen_range(0..4)),
        _ => {
            let op = ["+", "-", "*", "/", " + ", " * "][rng.gen_range(0..6)];
            format!(
                "{}{op}{}",
                random_expression(rng, d),
                random_expression(rng, d)
            )
        }
    }
}

fn atomish<R: Rng>(rng: &mut R, depth: u32) -> String {
    format!("({})", random_expression(rng, depth))
}

// ---------------------------------------------------------------------------
// Parser corpus.

/// Well-formed expressions with their value at `CORPUS_POINT`.
pub const CORPUS_POINT: [f64; 3] = [0.5, -1.25, 2.0];

pub fn valid_corpus() -> Vec<(&'static str, f64)> {
    use std::f64::consts::{E, PI};
    let (x1, x2, x3) = (0.5f64, -1.25f64, 2.0f64);
    vec![
        ("1+2*3", 7.0),
        ("(1+2)*3", 9.0),
        ("10-4-3", 3.0),
        ("10-(4-3)", 9.0),
        ("2*3+4*5", 26.0),
        ("8/4/2", 1.0),
        ("8/(4/2)", 4.0),
        ("2^3^2", 512.0),
        ("(2^3)^2", 64.0),
        ("-2^2", -4.0),
        ("(-2)^2", 4.0),
        ("2^-2", 0.25),
        ("-x1^2", -0.25),
        ("--x1", 0.5),
        ("- - -1", -1.0),
        ("3*-x2", 3.75),
        ("x1*x2*x3", x1 * x2 * x3),
        ("x1^2*sin(x2)", x1 * x1 * x2.sin()),
        ("x3+x1", 2.5),
        ("sin(x1)", x1.sin()),
        ("cos(x2)", x2.cos()),
        ("tan(x1)", x1.tan()),
        ("exp(x2)", x2.exp()),
        ("log(x3)", x3.ln()),
        ("sqrt(x3)", x3.sqrt()),
        ("abs(x2)", 1.25),
        ("pi", PI),
        ("e", E),
        ("2*pi*x1", PI),
        ("e^x1", E.powf(0.5)),
        ("x3^0.5", 2f64.sqrt()),
        ("x2^3", x2 * x2 * x2),
        ("1.5e2", 150.0),
        ("2.5E-1", 0.25),
        (".5+1.", 1.5),
        ("  x1  +\t x3 ", 2.5),
        ("exp(log(x3))", x3.ln().exp()),
        ("sqrt(abs(x2))*2", x2.abs().sqrt() * 2.0),
        ("((((x1))))", 0.5),
        ("1/x3/x3", 0.25),
        ("x1-x2*x3/2^2", 0.5 - (-1.25 * 2.0) / 4.0),
        ("sin(pi/2)^2+cos(0)", 2.0),
        ("7e+1-7e1", 0.0),
        ("x3^0", 1.0),
    ]
}

/// Malformed inputs with the byte offset the error must carry.
pub fn malformed_corpus() -> Vec<(&'static str, usize)> {
    vec![
        ("sin(", 4),
        ("", 0),
        ("1+", 2),
        ("1 +* 2", 3),
        ("(1+2", 4),
        ("1+2)", 3),
        ("foo(1)", 0),
        ("y1+1", 0),
        ("x0", 0),
        ("x01", 0),
        ("1 $ 2", 2),
        ("1e+", 0),
        (".", 0),
        ("sin x1", 4),
        ("2,3", 1),
        ("+1", 0),
        ("1e999", 0),
        ("x1 x2", 3),
        ("()", 1),
        ("2*é", 2),
        ("2e", 1),
        ("pi(2)", 0),
        ("3 ^", 3),
    ]
}

// ---------------------------------------------------------------------------
// Coefficient identities written out term by term.

pub fn a(p: &TensorPoly, idx: &[u8]) -> f64 {
    p.coeff(&MultiIndex::new(idx.to_vec()).unwrap()).unwrap()
}

pub fn w(s: &LatticeSamples, offset: &[i8]) -> f64 {
    s.get(offset).unwrap()
}

/// Left-hand coefficient combinations for n = 2: the centre value, the two
/// halves of the Δ₁²/Δ₂² term, and the a₂₂Δ₁²Δ₂² term.
pub fn identities_n2_lhs(p: &TensorPoly, d: &Cuboid) -> [f64; 4] {
    let (a1, a2) = (d.centers()[0], d.centers()[1]);
    let (d1, d2) = (d.half_widths()[0], d.half_widths()[1]);
    let c = |i: &[u8]| a(p, i);
    let center = c(&[2, 0]) * a1 * a1
        + c(&[1, 0]) * a1
        + c(&[0, 0])
        + (c(&[2, 1]) * a1 * a1 + c(&[1, 1]) * a1 + c(&[0, 1])) * a2
        + (c(&[2, 2]) * a1 * a1 + c(&[1, 2]) * a1 + c(&[0, 2])) * a2 * a2;
    let first = c(&[2, 0]) * d1 * d1 + c(&[2, 1]) * d1 * d1 * a2 + c(&[2, 2]) * d1 * d1 * a2 * a2;
    let second = c(&[0, 2]) * d2 * d2 + c(&[1, 2]) * a1 * d2 * d2 + c(&[2, 2]) * a1 * a1 * d2 * d2;
    let corner = c(&[2, 2]) * d1 * d1 * d2 * d2;
    [center, first, second, corner]
}

/// Right-hand lattice expressions for n = 2, same order as the left sides.
pub fn identities_n2_rhs(s: &LatticeSamples) -> [f64; 4] {
    let w = |o: [i8; 2]| w(s, &o);
    [
        w([0, 0]),
        (w([-1, 0]) - 2.0 * w([0, 0]) + w([1, 0])) / 2.0,
        (w([0, -1]) - 2.0 * w([0, 0]) + w([0, 1])) / 2.0,
        (w([-1, -1]) + w([-1, 1]) + w([1, -1]) + w([1, 1])
            - 2.0 * (w([-1, 0]) + w([1, 0]) + w([0, -1]) + w([0, 1]))
            + 4.0 * w([0, 0]))
            / 4.0,
    ]
}

/// Left-hand sides for n = 3: centre value, the three Δₖ² brackets, the
/// pairwise Δ²Δ² bracket and a₂₂₂Δ₁²Δ₂²Δ₃².
pub fn identities_n3_lhs(p: &TensorPoly, d: &Cuboid) -> [f64; 6] {
    let (a1, a2, a3) = (d.centers()[0], d.centers()[1], d.centers()[2]);
    let (d1, d2, d3) = (d.half_widths()[0], d.half_widths()[1], d.half_widths()[2]);
    let c = |i: &[u8]| a(p, i);
    let center = (c(&[2, 0, 0]) * a1 * a1
        + c(&[1, 0, 0]) * a1
        + c(&[0, 0, 0])
        + (c(&[2, 1, 0]) * a1 * a1 + c(&[1, 1, 0]) * a1 + c(&[0, 1, 0])) * a2
        + (c(&[2, 2, 0]) * a1 * a1 + c(&[1, 2, 0]) * a1 + c(&[0, 2, 0])) * a2 * a2)
        + (c(&[2, 0, 1]) * a1 * a1
            + c(&[1, 0, 1]) * a1
            + c(&[0, 0, 1])
            + (c(&[2, 1, 1]) * a1 * a1 + c(&[1, 1, 1]) * a1 + c(&[0, 1, 1])) * a2
            + (c(&[2, 2, 1]) * a1 * a1 + c(&[1, 2, 1]) * a1 + c(&[0, 2, 1])) * a2 * a2)
            * a3
        + (c(&[2, 0, 2]) * a1 * a1
            + c(&[1, 0, 2]) * a1
            + c(&[0, 0, 2])
            + (c(&[2, 1, 2]) * a1 * a1 + c(&[1, 1, 2]) * a1 + c(&[0, 1, 2])) * a2
            + (c(&[2, 2, 2]) * a1 * a1 + c(&[1, 2, 2]) * a1 + c(&[0, 2, 2])) * a2 * a2)
            * a3
            * a3;
    let k2_1 = (c(&[2, 0, 0])
        + c(&[2, 1, 0]) * a2
        + c(&[2, 2, 0]) * a2 * a2
        + (c(&[2, 0, 1]) + c(&[2, 1, 1]) * a2 + c(&[2, 2, 1]) * a2 * a2) * a3
        + (c(&[2, 0, 2]) + c(&[2, 1, 2]) * a2 + c(&[2, 2, 2]) * a2 * a2) * a3 * a3)
        * d1
        * d1;
    let k2_2 = (c(&[0, 2, 0])
        + c(&[1, 2, 0]) * a1
        + c(&[2, 2, 0]) * a1 * a1
        + (c(&[0, 2, 1]) + c(&[1, 2, 1]) * a1 + c(&[2, 2, 1]) * a1 * a1) * a3
        + (c(&[0, 2, 2]) + c(&[1, 2, 2]) * a1 + c(&[2, 2, 2]) * a1 * a1) * a3 * a3)
        * d2
        * d2;
    let k2_3 = (c(&[0, 0, 2])
        + c(&[1, 0, 2]) * a1
        + c(&[2, 0, 2]) * a1 * a1
        + (c(&[0, 1, 2]) + c(&[1, 1, 2]) * a1 + c(&[2, 1, 2]) * a1 * a1) * a2
        + (c(&[0, 2, 2]) + c(&[1, 2, 2]) * a1 + c(&[2, 2, 2]) * a1 * a1) * a2 * a2)
        * d3
        * d3;
    let (q1, q2, q3) = (d1 * d1, d2 * d2, d3 * d3);
    let k3 = c(&[2, 2, 0]) * q1 * q2
        + c(&[2, 2, 1]) * q1 * q2 * a3
        + c(&[2, 2, 2]) * q1 * q2 * a3 * a3
        + c(&[2, 0, 2]) * q1 * q3
        + c(&[2, 1, 2]) * q1 * a2 * q3
        + c(&[2, 2, 2]) * q1 * a2 * a2 * q3
        + c(&[0, 2, 2]) * q2 * q3
        + c(&[1, 2, 2]) * a1 * q2 * q3
        + c(&[2, 2, 2]) * a1 * a1 * q2 * q3;
    let k4 = c(&[2, 2, 2]) * q1 * q2 * q3;
    [center, k2_1, k2_2, k2_3, k3, k4]
}

/// Right-hand lattice expressions for n = 3, same order as the left sides.
pub fn identities_n3_rhs(s: &LatticeSamples) -> [f64; 6] {
    let w = |o: [i8; 3]| w(s, &o);
    let faces =
        w([-1, 0, 0]) + w([1, 0, 0]) + w([0, -1, 0]) + w([0, 1, 0]) + w([0, 0, -1]) + w([0, 0, 1]);
    let edges = w([-1, -1, 0])
        + w([-1, 1, 0])
        + w([1, -1, 0])
        + w([1, 1, 0])
        + w([-1, 0, -1])
        + w([-1, 0, 1])
        + w([1, 0, -1])
        + w([1, 0, 1])
        + w([0, -1, -1])
        + w([0, -1, 1])
        + w([0, 1, -1])
        + w([0, 1, 1]);
    let corners = w([-1, -1, -1])
        + w([1, -1, -1])
        + w([1, 1, -1])
        + w([-1, 1, -1])
        + w([-1, -1, 1])
        + w([1, -1, 1])
        + w([1, 1, 1])
        + w([-1, 1, 1]);
    let c = w([0, 0, 0]);
    [
        c,
        0.5 * (w([-1, 0, 0]) + w([1, 0, 0])) - c,
        0.5 * (w([0, -1, 0]) + w([0, 1, 0])) - c,
        0.5 * (w([0, 0, -1]) + w([0, 0, 1])) - c,
        0.25 * edges - faces + 3.0 * c,
        0.125 * corners - 0.25 * edges + 0.5 * faces - c,
    ]
}

/// `Σ a_i ∏_{SecondDiff} Δₖ² ∏_{Center} αₖ^{iₖ}` over indices with `iₖ = 2`
/// on every second-difference axis.
pub fn functional_from_coeffs(p: &TensorPoly, d: &Cuboid, second_diff: &[bool]) -> f64 {
    p.terms()
        .filter(|(idx, _)| {
            idx.entries()
                .iter()
                .zip(second_diff)
                .all(|(&e, &sd)| !sd || e == 2)
        })
        .map(|(idx, coef)| {
            idx.entries().iter().enumerate().fold(coef, |acc, (k, &e)| {
                if second_diff[k] {
                    acc * d.half_widths()[k].powi(2)
                } else {
                    acc * d.centers()[k].powi(e as i32)
                }
            })
        })
        .sum()
}

/// Relative difference with the denominator floored at `scale`.
pub fn rel_diff(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(scale)
}

/// Smallest spacing between `x` and its neighbours.
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

/// Bound on `∫|p|` over `d`: `Σ|a_i| ∏(|αₖ| + Δₖ)^{iₖ} · volume`.
pub fn magnitude(p: &TensorPoly, d: &Cuboid) -> f64 {
    p.terms()
        .map(|(idx, coef)| {
            idx.entries()
                .iter()
                .enumerate()
                .fold(coef.abs(), |acc, (k, &e)| {
                    acc * (d.centers()[k].abs() + d.half_widths()[k]).powi(e as i32)
                })
        })
        .sum::<f64>()
        * d.volume()
}
