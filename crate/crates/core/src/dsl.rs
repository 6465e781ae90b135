//! Text format for models and maps.
//!
//! ```text
//! # comments run to end of line
//! model M { ambient 2; crdim 1; eq z2 = conj(z2) + i*z1*conj(z1); radius 1; }
//! map f : M -> Mp { z1; 0; 0; z2; trunc 8; }
//! ```
//! Models are written in their own z-coordinates; a model used as a target is
//! renamed to the primed variables internally. `trunc;` without an order uses
//! the default truncation order.

use crate::models::{CRModel, HoloMap, Triple};
use crate::parse::{parse_constant, parse_poly_at, ParseError};
use crate::poly::{Group, MultiPoly, Var};
use num_rational::BigRational;
use num_traits::One;
use std::fmt::Write;

pub const DEFAULT_TRUNCATION: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: Vec<MultiPoly>,
    pub trunc: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Document {
    pub models: Vec<CRModel>,
    pub maps: Vec<MapDecl>,
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
    default_trunc: u32,
}

impl<'a> Scanner<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col: self.col, message: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn advance(&mut self, nbytes: usize) {
        for c in self.src[self.pos..self.pos + nbytes].chars() {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.pos += nbytes;
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let Some(c) = r.chars().next() else { return };
            if c.is_whitespace() {
                self.advance(c.len_utf8());
            } else if c == '#' {
                let n = r.find('\n').unwrap_or(r.len());
                self.advance(n);
            } else {
                return;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn word(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let r = self.rest();
        let n = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(r.len());
        // "->" is punctuation, not part of a word
        let n = r[..n].find("->").unwrap_or(n);
        if n == 0 {
            return self.err("expected a name");
        }
        let w = r[..n].to_string();
        self.advance(n);
        Ok(w)
    }

    fn peek_word(&mut self) -> Option<String> {
        let save = (self.pos, self.line, self.col);
        let w = self.word().ok();
        (self.pos, self.line, self.col) = save;
        w
    }

    fn punct(&mut self, p: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(p) {
            self.advance(p.len());
            Ok(())
        } else {
            self.err(format!("expected '{}'", p))
        }
    }

    fn try_punct(&mut self, p: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(p) {
            self.advance(p.len());
            true
        } else {
            false
        }
    }

    /// Raw text up to the next ';', with its starting position.
    fn until_semicolon(&mut self) -> Result<(String, usize, usize), ParseError> {
        self.skip_ws();
        let (l, c) = (self.line, self.col);
        let r = self.rest();
        let Some(n) = r.find(|ch| ch == ';' || ch == '}') else { return self.err("expected ';'") };
        if &r[n..n + 1] == "}" {
            return self.err("expected ';'");
        }
        let text = r[..n].to_string();
        self.advance(n + 1);
        Ok((text, l, c))
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        let (l, c) = {
            self.skip_ws();
            (self.line, self.col)
        };
        let w = self.word()?;
        w.parse().map_err(|_| ParseError { line: l, col: c, message: format!("expected an integer, found '{}'", w) })
    }
}

pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    parse_document_with(src, default_truncation())
}

/// As [`parse_document`], with an explicit order for bare `trunc;` lines.
pub fn parse_document_with(src: &str, default_trunc: u32) -> Result<Document, ParseError> {
    let mut sc = Scanner { src, pos: 0, line: 1, col: 1, default_trunc };
    let mut doc = Document::default();
    while !sc.at_end() {
        let (l, c) = (sc.line, sc.col);
        match sc.word()?.as_str() {
            "model" => doc.models.push(parse_model(&mut sc)?),
            "map" => doc.maps.push(parse_map(&mut sc)?),
            other => {
                return Err(ParseError { line: l, col: c, message: format!("expected 'model' or 'map', found '{}'", other) })
            }
        }
    }
    Ok(doc)
}

fn parse_model(sc: &mut Scanner) -> Result<CRModel, ParseError> {
    let name = sc.word()?;
    sc.punct("{")?;
    let (mut n, mut m) = (None, None);
    let mut eqs: Vec<(u16, MultiPoly, usize, usize)> = Vec::new();
    let mut radius = BigRational::one();
    while !sc.try_punct("}") {
        if sc.at_end() {
            return sc.err("unterminated model block");
        }
        let (l, c) = (sc.line, sc.col);
        let kw = sc.word()?;
        match kw.as_str() {
            "ambient" => {
                n = Some(sc.integer()? as u16);
                sc.punct(";")?;
            }
            "crdim" => {
                m = Some(sc.integer()? as u16);
                sc.punct(";")?;
            }
            "radius" => {
                let (t, tl, tc) = sc.until_semicolon()?;
                let v = parse_constant(&t).map_err(|e| ParseError { line: tl, col: tc, message: e.message })?;
                if !v.is_real() || v.re <= BigRational::from_integer(0.into()) {
                    return Err(ParseError { line: tl, col: tc, message: "radius must be a positive rational".into() });
                }
                radius = v.re;
            }
            "eq" => {
                let (vl, vc) = {
                    sc.skip_ws();
                    (sc.line, sc.col)
                };
                let lhs = sc.word()?;
                let v = crate::parse::parse_var(&lhs).filter(|v| v.group == Group::Z).ok_or(ParseError {
                    line: vl,
                    col: vc,
                    message: format!("left side must be a coordinate z<k>, found '{}'", lhs),
                })?;
                sc.punct("=")?;
                let (t, tl, tc) = sc.until_semicolon()?;
                let p = parse_poly_at(&t, tl, tc)?;
                eqs.push((v.index, p, vl, vc));
            }
            _ => return Err(ParseError { line: l, col: c, message: format!("unknown model statement '{}'", kw) }),
        }
    }
    let n = n.ok_or(ParseError { line: sc.line, col: sc.col, message: format!("model {} lacks 'ambient'", name) })?;
    let m = m.ok_or(ParseError { line: sc.line, col: sc.col, message: format!("model {} lacks 'crdim'", name) })?;
    if m == 0 || m >= n {
        return sc.err(format!("model {}: need 0 < crdim < ambient", name));
    }
    if eqs.len() != (n - m) as usize {
        return sc.err(format!("model {} needs {} equations, found {}", name, n - m, eqs.len()));
    }
    let mut theta = Vec::new();
    for (j, (idx, p, l, c)) in eqs.into_iter().enumerate() {
        if idx != m + 1 + j as u16 {
            return Err(ParseError {
                line: l,
                col: c,
                message: format!("equation {} must define z{}", j + 1, m + 1 + j as u16),
            });
        }
        for v in p.vars() {
            let ok = match v.group {
                Group::Z => v.index <= m,
                Group::Wb => v.index <= n,
                _ => false,
            };
            if !ok {
                return Err(ParseError {
                    line: l,
                    col: c,
                    message: format!("right side may only use z1..z{} and conjugates of z1..z{}; found {}", m, n, v),
                });
            }
        }
        theta.push(p);
    }
    Ok(CRModel { name, n, m, theta, radius })
}

fn parse_map(sc: &mut Scanner) -> Result<MapDecl, ParseError> {
    let name = sc.word()?;
    sc.punct(":")?;
    let source = sc.word()?;
    sc.punct("->")?;
    let target = sc.word()?;
    sc.punct("{")?;
    let mut components = Vec::new();
    let mut trunc = None;
    while !sc.try_punct("}") {
        if sc.at_end() {
            return sc.err("unterminated map block");
        }
        if sc.peek_word().as_deref() == Some("trunc") {
            sc.word()?;
            let (t, tl, tc) = sc.until_semicolon()?;
            let t = t.trim();
            trunc = Some(if t.is_empty() {
                sc.default_trunc
            } else {
                t.parse().map_err(|_| ParseError { line: tl, col: tc, message: "expected a truncation order".into() })?
            });
            continue;
        }
        let (t, tl, tc) = sc.until_semicolon()?;
        let p = parse_poly_at(&t, tl, tc)?;
        if p.uses(|v| v.group != Group::Z) {
            return Err(ParseError { line: tl, col: tc, message: "map components must be holomorphic in z".into() });
        }
        components.push(p);
    }
    Ok(MapDecl { name, source, target, components, trunc })
}

/// Default truncation order, overridable with `SEGRE_TRUNC_ORDER`.
pub fn default_truncation() -> u32 {
    std::env::var("SEGRE_TRUNC_ORDER").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_TRUNCATION)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("the document declares no map")]
    NoMap,
    #[error("no map named '{0}'")]
    UnknownMap(String),
    #[error("no model named '{0}'")]
    UnknownModel(String),
}

impl Document {
    pub fn model(&self, name: &str) -> Option<&CRModel> {
        self.models.iter().find(|m| m.name == name)
    }

    /// The triple of the named map, or of the first map.
    pub fn triple(&self, map: Option<&str>) -> Result<Triple, DocumentError> {
        let decl = match map {
            Some(n) => self.maps.iter().find(|m| m.name == n).ok_or(DocumentError::UnknownMap(n.into()))?,
            None => self.maps.first().ok_or(DocumentError::NoMap)?,
        };
        let source = self.model(&decl.source).ok_or(DocumentError::UnknownModel(decl.source.clone()))?;
        let target = self.model(&decl.target).ok_or(DocumentError::UnknownModel(decl.target.clone()))?;
        let map = match decl.trunc {
            Some(k) => HoloMap::truncated(decl.components.clone(), k),
            None => HoloMap::exact(decl.components.clone()),
        };
        Ok(Triple { source: source.clone(), target: target.clone(), map })
    }

    /// Canonical text form; parsing it back gives the same document.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        for m in &self.models {
            emit_model(&mut s, m);
        }
        for f in &self.maps {
            let _ = writeln!(s, "map {} : {} -> {} {{", f.name, f.source, f.target);
            for c in &f.components {
                let _ = writeln!(s, "  {};", c);
            }
            if let Some(k) = f.trunc {
                let _ = writeln!(s, "  trunc {};", k);
            }
            let _ = writeln!(s, "}}");
        }
        s
    }
}

fn emit_model(s: &mut String, m: &CRModel) {
    let _ = writeln!(s, "model {} {{", m.name);
    let _ = writeln!(s, "  ambient {};", m.n);
    let _ = writeln!(s, "  crdim {};", m.m);
    for (j, t) in m.theta.iter().enumerate() {
        let _ = writeln!(s, "  eq z{} = {};", m.m + 1 + j as u16, conj_text(t));
    }
    let r = &m.radius;
    if r.denom().is_one() {
        let _ = writeln!(s, "  radius {};", r.numer());
    } else {
        let _ = writeln!(s, "  radius {}/{};", r.numer(), r.denom());
    }
    let _ = writeln!(s, "}}");
}

/// Print w̄ variables as conj(z_k) so the text stays in the model's own coordinates.
fn conj_text(p: &MultiPoly) -> String {
    let mut out = p.to_string();
    let vars: Vec<Var> = p.vars().into_iter().filter(|v| v.group == Group::Wb).collect();
    for v in vars.iter().rev() {
        out = replace_ident(&out, &v.to_string(), &format!("conj(z{})", v.index));
    }
    out
}

fn replace_ident(s: &str, from: &str, to: &str) -> String {
    let mut out = String::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < s.len() {
        if s[i..].starts_with(from) {
            let before_ok = i == 0 || !(b[i - 1] as char).is_ascii_alphanumeric();
            let j = i + from.len();
            let after_ok = j >= s.len() || !(b[j] as char).is_ascii_alphanumeric();
            if before_ok && after_ok {
                out.push_str(to);
                i = j;
                continue;
            }
        }
        let ch = s[i..].chars().next().unwrap();
        out.push(ch);
        i += ch.len_utf8();
    }
    out
}
