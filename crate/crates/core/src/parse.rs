//! Text grammar for polynomials.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 'i' | var | 'conj' '(' expr ')' | '(' expr ')'
//! var   := z<k> | w<k>b | zp<k> | wp<k>b | t<k>
//! ```
//! Division is only allowed by nonzero constants, so `3/4` is a rational literal.

use crate::gauss::GaussRational;
use crate::poly::{MultiPoly, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(src: &str, line0: usize, col0: usize) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let (sl, sc) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Num(s.parse().unwrap()), sl, sc));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Ident(s), sl, sc));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Sym(c), sl, sc));
            i += 1;
            col += 1;
        } else {
            return Err(ParseError { line: sl, col: sc, message: format!("unexpected character '{}'", c) });
        }
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks, pos: 0 })
}

/// Parse a variable name such as `z3`, `w2b`, `zp1`, `wp4b` or `t2`.
pub fn parse_var(s: &str) -> Option<Var> {
    let idx = |d: &str| -> Option<u16> {
        if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        d.parse().ok().filter(|&k: &u16| k >= 1)
    };
    if let Some(rest) = s.strip_prefix("wp") {
        return rest.strip_suffix('b').and_then(idx).map(Var::wpb);
    }
    if let Some(rest) = s.strip_prefix("zp") {
        return idx(rest).map(Var::zp);
    }
    if let Some(rest) = s.strip_prefix('w') {
        return rest.strip_suffix('b').and_then(idx).map(Var::wb);
    }
    if let Some(rest) = s.strip_prefix('z') {
        return idx(rest).map(Var::z);
    }
    if let Some(rest) = s.strip_prefix('t') {
        return idx(rest).map(Var::t);
    }
    None
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.pos].1, self.toks[self.pos].2)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, message: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{}'", c))
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    let at = self.here();
                    let d = self.unary()?;
                    acc = acc.div_constant(&d).map_err(|_| ParseError {
                        line: at.0,
                        col: at.1,
                        message: "division is only allowed by a nonzero constant".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            match self.bump() {
                Tok::Num(n) => {
                    let e: u32 = n.try_into().map_err(|_| ParseError {
                        line: self.here().0,
                        col: self.here().1,
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                }
                _ => {
                    self.pos -= 1;
                    self.err("expected a non-negative integer exponent")
                }
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        let at = self.here();
        match self.bump() {
            Tok::Num(n) => Ok(MultiPoly::constant(GaussRational::real(BigRational::from_integer(n)))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(s) if s == "i" => Ok(MultiPoly::constant(GaussRational::i())),
            Tok::Ident(s) if s == "conj" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                e.conjugate().map_err(|err| ParseError { line: at.0, col: at.1, message: err.to_string() })
            }
            Tok::Ident(s) => match parse_var(&s) {
                Some(v) => Ok(MultiPoly::var(v)),
                None => Err(ParseError { line: at.0, col: at.1, message: format!("unknown identifier '{}'", s) }),
            },
            Tok::End => Err(ParseError { line: at.0, col: at.1, message: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(ParseError { line: at.0, col: at.1, message: format!("unexpected '{}'", c) }),
        }
    }
}

/// Parse a polynomial whose text starts at the given (1-based) line and column.
pub fn parse_poly_at(src: &str, line: usize, col: usize) -> Result<MultiPoly, ParseError> {
    let mut lx = lex(src, line, col)?;
    let e = lx.expr()?;
    if *lx.peek() != Tok::End {
        return lx.err("unexpected trailing input");
    }
    Ok(e)
}

pub fn parse_poly(src: &str) -> Result<MultiPoly, ParseError> {
    parse_poly_at(src, 1, 1)
}

/// Parse a constant expression such as `1/2 - 3*i`.
pub fn parse_constant(src: &str) -> Result<GaussRational, ParseError> {
    let p = parse_poly(src)?;
    p.constant_value()
        .ok_or(ParseError { line: 1, col: 1, message: format!("'{}' is not a constant", src.trim()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables() {
        assert_eq!(parse_var("z12"), Some(Var::z(12)));
        assert_eq!(parse_var("w3b"), Some(Var::wb(3)));
        assert_eq!(parse_var("zp2"), Some(Var::zp(2)));
        assert_eq!(parse_var("wp2b"), Some(Var::wpb(2)));
        assert_eq!(parse_var("t1"), Some(Var::t(1)));
        assert_eq!(parse_var("z0"), None);
        assert_eq!(parse_var("w3"), None);
    }

    #[test]
    fn precedence_and_rationals() {
        assert_eq!(parse_poly("-z1^2").unwrap(), -(MultiPoly::var(Var::z(1)).pow(2)));
        assert_eq!(parse_constant("3/4").unwrap(), GaussRational::from_ratio(3, 4));
        assert_eq!(parse_constant("-i*(1+i)").unwrap(), GaussRational::from_ints(1, -1));
    }

    #[test]
    fn conj_maps_to_partner() {
        assert_eq!(parse_poly("conj(i*z2)").unwrap(), parse_poly("-i*w2b").unwrap());
    }

    #[test]
    fn error_positions() {
        let e = parse_poly("z1 + \n  q2").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        let e = parse_poly("z1 / z2").unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
        assert!(parse_poly("conj(t1)").is_err());
        assert!(parse_poly("(z1").is_err());
    }
}
