//! Expression grammar shared by document files and command arguments.
//!
//! The surface syntax is the canonical textual form of elements, e.g.
//! `3/2 * pv_x*pv_y + x^2 - dx_y`, extended by parentheses and the two
//! differential operators `d(...)` (the de Rham differential) and
//! `del(...)` (the internal differential).  Every token carries a source
//! position so that parse failures point at the offending token.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" natural)?
//! atom   := rational | name | "d" "(" expr ")" | "del" "(" expr ")"
//!         | "(" expr ")"
//! rational := natural ("/" natural)?
//! name   := identifier, optionally prefixed "dx_" or "pv_"
//! ```
//!
//! `d` and `del` are reserved words.  Exponents must be literal naturals;
//! anything else after `^` is reported with its position.

use std::collections::BTreeMap;

use workbench_core::algebra::Algebra;
use workbench_core::derham::de_rham_d;
use workbench_core::element::mul;
use workbench_core::polyvector::delta_bracket;
use num_traits::Zero;
use workbench_core::q::{q_int, Q};
use workbench_core::{Element, Error, Result};

/// A source position; both coordinates are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn err(self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => format!("number `{q}`"),
            Tok::Name(s) => format!("name `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str, start: Pos) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut line = start.line;
    let mut col = start.col;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let here = Pos { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '+' => out.push((Tok::Plus, here)),
            '-' => out.push((Tok::Minus, here)),
            '*' => out.push((Tok::Star, here)),
            '^' => out.push((Tok::Caret, here)),
            '(' => out.push((Tok::LParen, here)),
            ')' => out.push((Tok::RParen, here)),
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let mut lit: String = chars[i..j].iter().collect();
                // a fraction only when a digit immediately follows the slash
                if j + 1 < chars.len() && chars[j] == '/' && chars[j + 1].is_ascii_digit() {
                    let mut k = j + 1;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    let den: String = chars[j + 1..k].iter().collect();
                    if den.chars().all(|c| c == '0') {
                        return Err(here.err(format!("zero denominator in `{lit}/{den}`")));
                    }
                    lit.push('/');
                    lit.push_str(&den);
                    j = k;
                }
                let q: Q = lit
                    .parse()
                    .map_err(|_| here.err(format!("malformed rational literal `{lit}`")))?;
                col += j - i;
                i = j;
                out.push((Tok::Num(q), here));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_')
                {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                col += j - i;
                i = j;
                out.push((Tok::Name(name), here));
                continue;
            }
            _ => return Err(here.err(format!("unexpected character `{c}`"))),
        }
        col += 1;
        i += 1;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Parsed expression tree; leaves keep their source positions.
#[derive(Clone, Debug)]
pub enum Expr {
    Num(Q),
    Name(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    D(Box<Expr>, Pos),
    Del(Box<Expr>, Pos),
}

impl Expr {
    /// True when the tree mentions `d(...)` or `del(...)`.
    pub fn uses_differentials(&self) -> Option<Pos> {
        match self {
            Expr::Num(_) | Expr::Name(..) => None,
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_differentials(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.uses_differentials().or_else(|| b.uses_differentials())
            }
            Expr::D(_, p) | Expr::Del(_, p) => Some(*p),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos> {
        let (t, p) = self.next();
        if t == want {
            Ok(p)
        } else {
            Err(p.err(format!("expected {}, found {}", want.describe(), t.describe())))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.next();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while self.peek().0 == Tok::Star {
            self.next();
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().0 == Tok::Minus {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().0 != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let (t, p) = self.next();
        match t {
            Tok::Num(q) if q.is_integer() && q >= q_int(0) => {
                let e: u32 = q.to_integer().try_into().map_err(|_| {
                    p.err(format!("exponent `{q}` does not fit in 32 bits"))
                })?;
                Ok(Expr::Pow(Box::new(base), e))
            }
            other => Err(p.err(format!(
                "exponent must be a non-negative integer literal, found {}",
                other.describe()
            ))),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let (t, p) = self.next();
        match t {
            Tok::Num(q) => Ok(Expr::Num(q)),
            Tok::Name(name) if name == "d" || name == "del" => {
                self.expect(Tok::LParen).map_err(|_| {
                    p.err(format!("`{name}` is reserved and must be followed by `(`"))
                })?;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(if name == "d" {
                    Expr::D(Box::new(inner), p)
                } else {
                    Expr::Del(Box::new(inner), p)
                })
            }
            Tok::Name(name) => Ok(Expr::Name(name, p)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(p.err(format!("expected an expression, found {}", other.describe()))),
        }
    }
}

/// Parse a standalone expression starting at the given source position.
pub fn parse_at(text: &str, start: Pos) -> Result<Expr> {
    let toks = lex(text, start)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    let (t, pos) = p.next();
    if t != Tok::Eof {
        return Err(pos.err(format!("unexpected {} after the expression", t.describe())));
    }
    Ok(e)
}

/// Parse a standalone expression (positions start at 1:1).
pub fn parse(text: &str) -> Result<Expr> {
    parse_at(text, Pos { line: 1, col: 1 })
}

/// Evaluate to an element of the algebra.  Names resolve to generator
/// tokens first (`x`, `dx_x`, `pv_x`), then to entries of `env`.
pub fn eval_element(
    expr: &Expr,
    alg: &Algebra,
    env: &BTreeMap<String, Element>,
) -> Result<Element> {
    let g = alg.gens();
    match expr {
        Expr::Num(q) => Ok(Element::constant(q.clone())),
        Expr::Name(name, pos) => {
            if let Some(id) = g.lookup_token(name) {
                return Ok(Element::gen(id));
            }
            if let Some(e) = env.get(name) {
                return Ok(e.clone());
            }
            Err(pos.err(format!("unknown name `{name}`")))
        }
        Expr::Neg(a) => Ok(eval_element(a, alg, env)?.neg()),
        Expr::Add(a, b) => Ok(eval_element(a, alg, env)?.add(&eval_element(b, alg, env)?)),
        Expr::Sub(a, b) => Ok(eval_element(a, alg, env)?.sub(&eval_element(b, alg, env)?)),
        Expr::Mul(a, b) => {
            Ok(mul(g, &eval_element(a, alg, env)?, &eval_element(b, alg, env)?))
        }
        Expr::Pow(a, e) => {
            let base = eval_element(a, alg, env)?;
            let mut acc = Element::one();
            for _ in 0..*e {
                acc = mul(g, &acc, &base);
            }
            Ok(acc)
        }
        Expr::D(a, _) => de_rham_d(alg, &eval_element(a, alg, env)?),
        Expr::Del(a, pos) => {
            let e = eval_element(a, alg, env)?;
            if e.max_form_deg(g) > 0 {
                if e.max_pv_weight(g) > 0 {
                    return Err(pos.err(
                        "del(...) is not defined on mixed form/polyvector expressions"
                            .to_string(),
                    ));
                }
                alg.internal_form_rule()?.apply(g, &e)
            } else {
                delta_bracket(alg, &e)
            }
        }
    }
}

/// Evaluate to a coordinate vector over formal symbols (used for Lie
/// bracket right-hand sides): only rational multiples and sums of the
/// symbols are allowed.
pub fn eval_vector(expr: &Expr, names: &[String]) -> Result<Vec<Q>> {
    #[derive(Clone)]
    enum V {
        Scalar(Q),
        Vector(Vec<Q>),
    }
    fn go(expr: &Expr, names: &[String]) -> Result<V> {
        let zipv = |a: Vec<Q>, b: Vec<Q>, f: fn(Q, Q) -> Q| -> Vec<Q> {
            a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
        };
        match expr {
            Expr::Num(q) => Ok(V::Scalar(q.clone())),
            Expr::Name(name, pos) => match names.iter().position(|n| n == name) {
                Some(i) => {
                    let mut v = vec![q_int(0); names.len()];
                    v[i] = q_int(1);
                    Ok(V::Vector(v))
                }
                None => Err(pos.err(format!("unknown basis name `{name}`"))),
            },
            Expr::Neg(a) => Ok(match go(a, names)? {
                V::Scalar(q) => V::Scalar(-q),
                V::Vector(v) => V::Vector(v.into_iter().map(|q| -q).collect()),
            }),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sign = if matches!(expr, Expr::Sub(..)) { -1 } else { 1 };
                let (x, y) = (go(a, names)?, go(b, names)?);
                match (x, y) {
                    (V::Scalar(p), V::Scalar(q)) => Ok(V::Scalar(p + q_int(sign) * q)),
                    (V::Vector(u), V::Vector(w)) => Ok(V::Vector(zipv(
                        u,
                        w.into_iter().map(|q| q_int(sign) * q).collect(),
                        |a, b| a + b,
                    ))),
                    _ => Err(Error::InvalidSpec(
                        "cannot add a scalar to a basis combination".into(),
                    )),
                }
            }
            Expr::Mul(a, b) => {
                let (x, y) = (go(a, names)?, go(b, names)?);
                match (x, y) {
                    (V::Scalar(p), V::Scalar(q)) => Ok(V::Scalar(p * q)),
                    (V::Scalar(p), V::Vector(v)) | (V::Vector(v), V::Scalar(p)) => {
                        Ok(V::Vector(v.into_iter().map(|q| &p * q).collect()))
                    }
                    _ => Err(Error::InvalidSpec(
                        "products of basis elements are not allowed here; \
                         give the bracket as a linear combination"
                            .into(),
                    )),
                }
            }
            Expr::Pow(a, e) => match go(a, names)? {
                V::Scalar(q) => {
                    let mut acc = q_int(1);
                    for _ in 0..*e {
                        acc = acc * q.clone();
                    }
                    Ok(V::Scalar(acc))
                }
                V::Vector(_) => Err(Error::InvalidSpec(
                    "powers of basis elements are not allowed here".into(),
                )),
            },
            Expr::D(_, pos) | Expr::Del(_, pos) => Err(pos.err(
                "differential operators are not allowed in a Lie bracket".to_string(),
            )),
        }
    }
    match go(expr, names)? {
        V::Vector(v) => Ok(v),
        V::Scalar(q) if q.is_zero() => Ok(vec![q_int(0); names.len()]),
        V::Scalar(q) => Err(Error::InvalidSpec(format!(
            "a Lie bracket must be a linear combination of basis names, got the scalar {q}"
        ))),
    }
}
