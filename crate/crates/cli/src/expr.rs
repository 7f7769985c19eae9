//! Expression grammar shared by the command line and the reports.
//!
//! ```text
//! sum     := signed ( ("+" | "-") signed )*
//! signed  := "-" signed | tensor
//! tensor  := product ( "(x)" product )*
//! product := postfix ( ["*"] postfix | "/" integer )*
//! postfix := atom [ "^" ["-"] integer ] "*"*
//! atom    := generator | integer | "mu" | "i" | "sqrt(" integer ")"
//!          | "d(" sum ")" | "delta(" sum ")" | "(" sum ")"
//! ```
//!
//! A `*` is an adjoint when the next token cannot start an atom, and a
//! product sign otherwise. `(x)` is the tensor sign between products and
//! the parenthesized generator `x` where an atom is expected, as in `d(x)`.

use std::fmt;

use nchopf::algebra::{Element, Pres, Presentation};
use nchopf::forms::{Calculus, Form};
use nchopf::hopf::Tensor;
use nchopf::scalars::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Tensor,
    End,
}

/// Parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Gen(usize, Pos),
    Int(u64),
    Mu,
    I,
    Sqrt(u64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, u64),
    Pow(Box<Expr>, i32),
    Adjoint(Box<Expr>),
    D(Box<Expr>, Calculus),
    Tensor(Vec<Expr>),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let pos = Pos { line, column: col };
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if chars[i..].starts_with(&['(', 'x', ')']) {
            out.push((Tok::Tensor, pos));
            i += 3;
            col += 3;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<u64>().map_err(|_| ParseError { line, column: col, message: format!("integer `{s}` is too large") })?;
            out.push((Tok::Int(v), pos));
            col += i - start;
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            col += i - start;
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(ParseError { line, column: col, message: format!("unexpected character `{ch}`") }),
        };
        out.push((tok, pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    pres: &'a Presentation,
}

fn starts_atom(t: &Tok) -> bool {
    matches!(t, Tok::Ident(_) | Tok::Int(_) | Tok::LParen)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let p = self.pos();
        Err(ParseError { line: p.line, column: p.column, message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn tensor(&mut self) -> Result<Expr, ParseError> {
        let mut legs = vec![self.product()?];
        while *self.peek() == Tok::Tensor {
            self.bump();
            legs.push(self.product()?);
        }
        Ok(if legs.len() == 1 { legs.pop().unwrap() } else { Expr::Tensor(legs) })
    }

    fn signed(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.signed()?)))
        } else {
            self.tensor()
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.signed()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.signed()?));
                }
                Tok::Minus => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.signed()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.postfix()?;
        loop {
            match self.peek().clone() {
                Tok::Star => {
                    self.bump();
                    e = Expr::Mul(Box::new(e), Box::new(self.postfix()?));
                }
                Tok::Slash => {
                    self.bump();
                    match self.bump() {
                        (Tok::Int(0), p) => return Err(ParseError { line: p.line, column: p.column, message: "division by zero".into() }),
                        (Tok::Int(v), _) => e = Expr::Div(Box::new(e), v),
                        _ => {
                            self.at -= 1;
                            return self.error("expected an integer divisor");
                        }
                    }
                }
                t if starts_atom(&t) => e = Expr::Mul(Box::new(e), Box::new(self.postfix()?)),
                _ => return Ok(e),
            }
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                (Tok::Int(v), p) => {
                    let v = i32::try_from(v).map_err(|_| ParseError { line: p.line, column: p.column, message: "exponent too large".into() })?;
                    e = Expr::Pow(Box::new(e), if neg { -v } else { v });
                }
                _ => {
                    self.at -= 1;
                    return self.error("expected an integer exponent");
                }
            }
        }
        while *self.peek() == Tok::Star && !starts_atom(&self.toks[self.at + 1].0) {
            self.bump();
            e = Expr::Adjoint(Box::new(e));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Tensor => match self.pres.gen_index("x") {
                Ok(g) => Ok(Expr::Gen(g, Pos { line: pos.line, column: pos.column + 1 })),
                Err(_) => Err(ParseError { line: pos.line, column: pos.column, message: "unexpected tensor sign".into() }),
            },
            Tok::LParen => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "mu" => Ok(Expr::Mu),
                "i" => Ok(Expr::I),
                "sqrt" => {
                    self.expect(Tok::LParen, "`(` after sqrt")?;
                    let v = match self.bump() {
                        (Tok::Int(v), _) => v,
                        _ => {
                            self.at -= 1;
                            return self.error("expected an integer radicand");
                        }
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Sqrt(v))
                }
                "d" | "delta" if *self.peek() == Tok::Tensor => {
                    let calc = if name == "d" { Calculus::Exterior } else { Calculus::FirstOrder };
                    Ok(Expr::D(Box::new(self.atom()?), calc))
                }
                "d" | "delta" if *self.peek() == Tok::LParen => {
                    self.bump();
                    let inner = self.sum()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let calc = if name == "d" { Calculus::Exterior } else { Calculus::FirstOrder };
                    Ok(Expr::D(Box::new(inner), calc))
                }
                _ => match self.pres.gen_index(&name) {
                    Ok(g) => Ok(Expr::Gen(g, pos)),
                    Err(_) => Err(ParseError {
                        line: pos.line,
                        column: pos.column,
                        message: format!("unknown generator `{name}` for preset `{}`", self.pres.name),
                    }),
                },
            },
            Tok::End => Err(ParseError { line: pos.line, column: pos.column, message: "unexpected end of input".into() }),
            t => Err(ParseError { line: pos.line, column: pos.column, message: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parse `text` over the generators of `pres`.
pub fn parse(text: &str, pres: &Presentation) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, pres };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

/// Value of an expression.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(Scalar),
    Element(Element),
    Form(Form),
    Tensor(Tensor),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Element(e) => write!(f, "{e}"),
            Value::Form(x) => write!(f, "{x}"),
            Value::Tensor(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError(pub String);

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for EvalError {}

fn err<T>(m: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError(m.into()))
}

struct Eval {
    pres: Pres,
}

impl Eval {
    fn element(&self, v: Value) -> Result<Element, EvalError> {
        match v {
            Value::Scalar(s) => Ok(Element::scalar(self.pres, s)),
            Value::Element(e) => Ok(e),
            _ => err("expected a function, found a form or a tensor"),
        }
    }

    fn form(&self, v: Value, calc: Calculus) -> Result<Form, EvalError> {
        match v {
            Value::Form(f) if f.calc == calc => Ok(f),
            Value::Form(_) => err("`d` and `delta` cannot be mixed"),
            Value::Tensor(_) => err("a tensor cannot enter a form"),
            v => Ok(Form::from_element(&self.element(v)?, calc)),
        }
    }

    fn tensor_legs(&self, t: &Tensor) -> usize {
        t.legs.len()
    }

    fn add(&self, a: Value, b: Value) -> Result<Value, EvalError> {
        Ok(match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x.add(&y)),
            (Value::Tensor(x), Value::Tensor(y)) => {
                if self.tensor_legs(&x) != self.tensor_legs(&y) {
                    return err("tensors with different numbers of legs");
                }
                Value::Tensor(x.add(&y))
            }
            (Value::Tensor(_), _) | (_, Value::Tensor(_)) => return err("cannot add a tensor and a non-tensor"),
            (Value::Form(x), y) => {
                let y = self.form(y, x.calc)?;
                Value::Form(x.add(&y))
            }
            (x, Value::Form(y)) => Value::Form(self.form(x, y.calc)?.add(&y)),
            (x, y) => Value::Element(self.element(x)?.add(&self.element(y)?)),
        })
    }

    fn neg(&self, a: Value) -> Value {
        match a {
            Value::Scalar(x) => Value::Scalar(x.neg()),
            Value::Element(x) => Value::Element(x.neg()),
            Value::Form(x) => Value::Form(x.neg()),
            Value::Tensor(x) => Value::Tensor(x.neg()),
        }
    }

    fn scale(&self, a: Value, s: &Scalar) -> Value {
        match a {
            Value::Scalar(x) => Value::Scalar(x.mul(s)),
            Value::Element(x) => Value::Element(x.scale(s)),
            Value::Form(x) => Value::Form(x.scale(s)),
            Value::Tensor(x) => Value::Tensor(x.scale(s)),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Result<Value, EvalError> {
        Ok(match (a, b) {
            (Value::Scalar(x), y) => self.scale(y, &x),
            (x, Value::Scalar(y)) => self.scale(x, &y),
            (Value::Tensor(x), Value::Tensor(y)) => {
                if self.tensor_legs(&x) != self.tensor_legs(&y) {
                    return err("tensors with different numbers of legs");
                }
                Value::Tensor(x.mul(&y))
            }
            (Value::Tensor(_), _) | (_, Value::Tensor(_)) => return err("cannot multiply a tensor by a non-tensor"),
            (Value::Element(x), Value::Element(y)) => Value::Element(x.mul(&y)),
            (Value::Element(x), Value::Form(y)) => Value::Form(y.lmul(&x)),
            (Value::Form(x), Value::Element(y)) => Value::Form(x.rmul(&y)),
            (Value::Form(x), Value::Form(y)) => {
                if x.calc != y.calc {
                    return err("`d` and `delta` cannot be mixed");
                }
                Value::Form(x.mul(&y))
            }
        })
    }

    fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Gen(g, _) => Value::Element(Element::generator(self.pres, *g)),
            Expr::Int(v) => Value::Scalar(Scalar::int(i64::try_from(*v).map_err(|_| EvalError("integer too large".into()))?)),
            Expr::Mu => Value::Scalar(Scalar::mu(1)),
            Expr::I => Value::Scalar(Scalar::i()),
            Expr::Sqrt(v) => Value::Scalar(Scalar::sqrt(*v)),
            Expr::Neg(x) => self.neg(self.eval(x)?),
            Expr::Add(a, b) => self.add(self.eval(a)?, self.eval(b)?)?,
            Expr::Sub(a, b) => {
                let nb = self.neg(self.eval(b)?);
                self.add(self.eval(a)?, nb)?
            }
            Expr::Mul(a, b) => self.mul(self.eval(a)?, self.eval(b)?)?,
            Expr::Div(a, v) => {
                let d = i64::try_from(*v).map_err(|_| EvalError("divisor too large".into()))?;
                self.scale(self.eval(a)?, &Scalar::frac(1, d))
            }
            Expr::Pow(a, k) => match self.eval(a)? {
                Value::Scalar(s) => {
                    if **a == Expr::Mu {
                        Value::Scalar(Scalar::mu(*k))
                    } else if *k >= 0 {
                        let mut out = Scalar::one();
                        for _ in 0..*k {
                            out = out.mul(&s);
                        }
                        Value::Scalar(out)
                    } else {
                        return err("negative powers are only defined for `mu`");
                    }
                }
                Value::Element(x) if *k >= 0 => Value::Element(x.pow(*k as u32)),
                Value::Element(_) => return err("negative power of a function"),
                Value::Form(x) if *k >= 0 => {
                    let mut out = Form::from_element(&Element::one(self.pres), x.calc);
                    for _ in 0..*k {
                        out = out.mul(&x);
                    }
                    Value::Form(out)
                }
                _ => return err("power of a tensor or negative power of a form"),
            },
            Expr::Adjoint(a) => match self.eval(a)? {
                Value::Scalar(s) => Value::Scalar(s.conj()),
                Value::Element(x) => Value::Element(x.adjoint()),
                Value::Form(x) => Value::Form(x.adjoint()),
                Value::Tensor(_) => return err("adjoint of a tensor"),
            },
            Expr::D(a, calc) => match self.eval(a)? {
                Value::Scalar(_) => Value::Form(Form::zero(self.pres, *calc)),
                Value::Element(x) => Value::Form(Form::d(&x, *calc)),
                Value::Form(x) if x.calc == Calculus::Exterior && *calc == Calculus::Exterior => {
                    Value::Form(x.ext_d().map_err(|e| EvalError(e.to_string()))?)
                }
                Value::Form(_) => return err("the first-order differential applies to functions only"),
                Value::Tensor(_) => return err("differential of a tensor"),
            },
            Expr::Tensor(legs) => {
                let mut els = Vec::with_capacity(legs.len());
                for l in legs {
                    match self.eval(l)? {
                        Value::Scalar(s) => els.push(Element::scalar(self.pres, s)),
                        Value::Element(x) => els.push(x),
                        _ => return err("tensor legs must be functions"),
                    }
                }
                Value::Tensor(Tensor::pure(&els))
            }
        })
    }
}

/// Evaluate a parsed expression in `pres`.
pub fn evaluate(e: &Expr, pres: Pres) -> Result<Value, EvalError> {
    Eval { pres }.eval(e)
}

/// Parse and evaluate.
pub fn parse_value(text: &str, pres: Pres) -> Result<Value, Box<dyn std::error::Error>> {
    let e = parse(text, pres)?;
    Ok(evaluate(&e, pres)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(text: &str, preset: &str) -> Value {
        parse_value(text, Presentation::preset(preset).unwrap()).unwrap()
    }

    #[test]
    fn twisted_commutator_vanishes() {
        match value("z3*z1 - mu^-1*z1*z3", "s7") {
            Value::Element(e) => assert!(e.is_zero()),
            v => panic!("{v}"),
        }
    }

    #[test]
    fn differential_of_alpha() {
        match value("d(a)", "s4") {
            Value::Form(f) => {
                assert_eq!(f.calc, Calculus::Exterior);
                assert_eq!(f.degree(), Some(1));
            }
            v => panic!("{v}"),
        }
    }

    #[test]
    fn unknown_generator_is_positioned() {
        let e = parse("z1 + z5", Presentation::s7()).unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        assert!(e.message.contains("z5"));
    }

    #[test]
    fn adjoint_binds_tighter() {
        let p = Presentation::s7();
        let a = parse("z1* + z2", p).unwrap();
        assert_eq!(a, Expr::Add(Box::new(Expr::Adjoint(Box::new(Expr::Gen(0, Pos { line: 1, column: 1 })))), Box::new(Expr::Gen(1, Pos { line: 1, column: 7 }))));
        match value("z1**z2", "s7") {
            Value::Element(e) => assert_eq!(e, p.gen("zb1").unwrap().mul(&p.gen("z2").unwrap())),
            v => panic!("{v}"),
        }
    }

    #[test]
    fn tensor_of_generators() {
        match value("w1 (x) wb1 + w2 (x) wb2", "su2") {
            Value::Tensor(t) => assert_eq!(t.terms.len(), 2),
            v => panic!("{v}"),
        }
    }
}
