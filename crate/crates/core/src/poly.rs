//! Sparse multivariate polynomials over ℚ(i) on a partitioned variable universe.
//!
//! Variables come in five groups: source holomorphic `z`, source antiholomorphic
//! `w̄`, target holomorphic `z'`, target antiholomorphic `w̄'` and free parameters
//! `t`. Conjugation swaps `z ↔ w̄` and `z' ↔ w̄'` index by index and conjugates
//! coefficients; parameters have no partner.

use crate::gauss::GaussRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    Z,
    Wb,
    Zp,
    Wpb,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub group: Group,
    pub index: u16,
}

impl Var {
    pub const fn new(group: Group, index: u16) -> Var {
        Var { group, index }
    }
    pub const fn z(i: u16) -> Var {
        Var::new(Group::Z, i)
    }
    pub const fn wb(i: u16) -> Var {
        Var::new(Group::Wb, i)
    }
    pub const fn zp(i: u16) -> Var {
        Var::new(Group::Zp, i)
    }
    pub const fn wpb(i: u16) -> Var {
        Var::new(Group::Wpb, i)
    }
    pub const fn t(i: u16) -> Var {
        Var::new(Group::T, i)
    }

    pub fn partner(self) -> Option<Var> {
        let g = match self.group {
            Group::Z => Group::Wb,
            Group::Wb => Group::Z,
            Group::Zp => Group::Wpb,
            Group::Wpb => Group::Zp,
            Group::T => return None,
        };
        Some(Var::new(g, self.index))
    }

    pub fn is_target(self) -> bool {
        matches!(self.group, Group::Zp | Group::Wpb)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.group {
            Group::Z => write!(f, "z{}", self.index),
            Group::Wb => write!(f, "w{}b", self.index),
            Group::Zp => write!(f, "zp{}", self.index),
            Group::Wpb => write!(f, "wp{}b", self.index),
            Group::T => write!(f, "t{}", self.index),
        }
    }
}

/// The concrete finite variable universe of a computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    pub n: u16,
    pub n_target: u16,
    pub n_params: u16,
}

impl Universe {
    pub fn contains(&self, v: Var) -> bool {
        let bound = match v.group {
            Group::Z | Group::Wb => self.n,
            Group::Zp | Group::Wpb => self.n_target,
            Group::T => self.n_params,
        };
        v.index >= 1 && v.index <= bound
    }

    pub fn group(&self, g: Group) -> Vec<Var> {
        let bound = match g {
            Group::Z | Group::Wb => self.n,
            Group::Zp | Group::Wpb => self.n_target,
            Group::T => self.n_params,
        };
        (1..=bound).map(|i| Var::new(g, i)).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable {0} has no conjugate partner")]
    Unpaired(Var),
    #[error("variable {0} is outside the declared universe")]
    OutOfUniverse(Var),
    #[error("division by a non-constant or zero polynomial")]
    BadDivision,
}

/// A monomial as a sorted list of (variable, positive exponent).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Monomial {
        pairs.retain(|p| p.1 > 0);
        pairs.sort();
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn degree_where(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.0.iter().filter(|p| pred(p.0)).map(|p| p.1).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|p| p.0 == v).map(|p| p.1).unwrap_or(0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// Split into the part over variables satisfying `pred` and the rest.
    pub fn split(&self, pred: impl Fn(Var) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|p| pred(p.0));
        (Monomial(a), Monomial(b))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|p| p.0)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)).collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order with smaller variables more significant.
    fn cmp(&self, o: &Monomial) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            c => return c,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    c => return c,
                },
            }
        }
        (self.0.len() - i).cmp(&(o.0.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Monomial) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{}^{}", v, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl MultiPoly {
    pub fn zero() -> MultiPoly {
        MultiPoly::default()
    }

    pub fn one() -> MultiPoly {
        MultiPoly::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> MultiPoly {
        MultiPoly::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> MultiPoly {
        MultiPoly::constant(GaussRational::from(c))
    }

    pub fn var(v: Var) -> MultiPoly {
        MultiPoly::term(Monomial::var(v, 1), GaussRational::one())
    }

    pub fn term(m: Monomial, c: GaussRational) -> MultiPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, GaussRational)>) -> MultiPoly {
        let mut p = MultiPoly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<GaussRational> {
        if self.is_zero() {
            Some(GaussRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> GaussRational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussRational::zero)
    }

    /// Largest term in the graded storage order.
    pub fn leading(&self) -> Option<(&Monomial, &GaussRational)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn uses(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.vars().any(&pred))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_where(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.terms.keys().map(|m| m.degree_where(&pred)).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &GaussRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn deriv(&self, v: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let pairs = m
                .pairs()
                .iter()
                .map(|&(w, k)| if w == v { (w, k - 1) } else { (w, k) })
                .collect();
            out.add_term(Monomial::from_pairs(pairs), &(c * &GaussRational::from(e as i64)));
        }
        out
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, bind: &BTreeMap<Var, MultiPoly>) -> MultiPoly {
        let mut cache: BTreeMap<(Var, u32), MultiPoly> = BTreeMap::new();
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut acc = MultiPoly::one();
            for &(v, e) in m.pairs() {
                match bind.get(&v) {
                    Some(p) => {
                        let pw = cache.entry((v, e)).or_insert_with(|| p.pow(e)).clone();
                        acc = &acc * &pw;
                    }
                    None => kept.push((v, e)),
                }
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                continue;
            }
            out += &acc.mul_monomial(&Monomial::from_pairs(kept), c);
        }
        out
    }

    /// Substitute numeric values for some variables.
    pub fn specialize(&self, vals: &BTreeMap<Var, GaussRational>) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::new();
            for &(v, e) in m.pairs() {
                match vals.get(&v) {
                    Some(x) => coeff = &coeff * &x.pow(e),
                    None => kept.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(kept), &coeff);
        }
        out
    }

    pub fn eval(&self, vals: &BTreeMap<Var, GaussRational>) -> Option<GaussRational> {
        self.specialize(vals).constant_value()
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Complex conjugation of coefficients together with the pairing swap.
    pub fn conjugate(&self) -> Result<MultiPoly, PolyError> {
        for v in self.vars() {
            if v.partner().is_none() {
                return Err(PolyError::Unpaired(v));
            }
        }
        Ok(self.conjugate_fixing(|_| false))
    }

    /// Conjugation where variables matching `fixed` (and parameters) map to themselves.
    pub fn conjugate_fixing(&self, fixed: impl Fn(Var) -> bool) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(m, c)| {
            (
                m.map_vars(|v| if fixed(v) { v } else { v.partner().unwrap_or(v) }),
                c.conj(),
            )
        }))
    }

    /// Conjugate only the coefficients.
    pub fn conj_coeffs(&self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect() }
    }

    /// Coefficients with respect to monomials in the variables matching `pred`.
    pub fn collect(&self, pred: impl Fn(Var) -> bool) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (k, rest) = m.split(&pred);
            out.entry(k).or_default().add_term(rest, c);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Keep only terms whose degree in the variables matching `pred` is at most `n`.
    pub fn truncate_where(&self, pred: impl Fn(Var) -> bool, n: u32) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_where(&pred) <= n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn retain_terms(&self, keep: impl Fn(&Monomial) -> bool) -> MultiPoly {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Scale so the leading coefficient in storage order is 1.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => MultiPoly::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn div_constant(&self, o: &MultiPoly) -> Result<MultiPoly, PolyError> {
        let c = o.constant_value().ok_or(PolyError::BadDivision)?;
        let inv = c.inv().ok_or(PolyError::BadDivision)?;
        Ok(self.scale(&inv))
    }

    pub fn check_universe(&self, u: &Universe) -> Result<(), PolyError> {
        for v in self.vars() {
            if !u.contains(v) {
                return Err(PolyError::OutOfUniverse(v));
            }
        }
        Ok(())
    }
}

/// Substitute `bind` and collect coefficients in the variables of `params`.
pub fn substitute_and_collect(
    p: &MultiPoly,
    bind: &BTreeMap<Var, MultiPoly>,
    params: &BTreeSet<Var>,
) -> Vec<(Monomial, MultiPoly)> {
    p.substitute(bind).collect(|v| params.contains(&v)).into_iter().collect()
}

impl std::ops::AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, o: &MultiPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl std::ops::SubAssign<&MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, o: &MultiPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }
}

impl<'a> std::ops::Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        r += o;
        r
    }
}

impl<'a> std::ops::Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        r -= o;
        r
    }
}

impl<'a> std::ops::Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        let mut r = MultiPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        r
    }
}

impl std::ops::Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: MultiPoly) -> MultiPoly {
        &self + &o
    }
}

impl std::ops::Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: MultiPoly) -> MultiPoly {
        &self - &o
    }
}

impl std::ops::Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: MultiPoly) -> MultiPoly {
        &self * &o
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-GaussRational::one())
    }
}

impl std::ops::Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg_real = c.im.is_zero() && c.re < num_rational::BigRational::zero();
            let neg_imag = c.re.is_zero() && c.im < num_rational::BigRational::zero();
            let negative = neg_real || neg_imag;
            let mag = if negative { -c } else { c.clone() };
            let body = if m.is_one() {
                mag.to_string()
            } else if mag.is_one() {
                m.to_string()
            } else {
                format!("{}*{}", mag, m)
            };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            write!(f, "{}", body)?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<MultiPoly, D::Error> {
        let s = String::deserialize(d)?;
        crate::parse::parse_poly(&s).map_err(serde::de::Error::custom)
    }
}

/// Jacobian matrix of `gens` with respect to `vars`; rows follow `gens`.
pub fn jacobian(gens: &[MultiPoly], vars: &[Var]) -> Vec<Vec<MultiPoly>> {
    gens.iter().map(|g| vars.iter().map(|&v| g.deriv(v)).collect()).collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let k = m.len();
    if k == 0 {
        return MultiPoly::one();
    }
    let cols: Vec<usize> = (0..k).collect();
    let mut memo = BTreeMap::new();
    det_rec(m, 0, &cols, &mut memo)
}

fn det_rec(
    m: &[Vec<MultiPoly>],
    row: usize,
    cols: &[usize],
    memo: &mut BTreeMap<(usize, Vec<usize>), MultiPoly>,
) -> MultiPoly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    if let Some(v) = memo.get(&(row, cols.to_vec())) {
        return v.clone();
    }
    let mut acc = MultiPoly::zero();
    for (pos, &c) in cols.iter().enumerate() {
        let entry = &m[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = det_rec(m, row + 1, &rest, memo);
        let term = entry * &sub;
        if pos % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    memo.insert((row, cols.to_vec()), acc.clone());
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: MultiPoly,
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// All nonzero k×k minors of a matrix, in lexicographic (rows, cols) order.
pub fn minors(m: &[Vec<MultiPoly>], k: usize) -> Vec<Minor> {
    let nr = m.len();
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    if k == 0 || k > nr || k > nc {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rows in combinations(nr, k) {
        for cols in combinations(nc, k) {
            let sub: Vec<Vec<MultiPoly>> =
                rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect();
            let value = determinant(&sub);
            if !value.is_zero() {
                out.push(Minor { rows: rows.clone(), cols: cols.clone(), value });
            }
        }
    }
    out
}

pub fn jacobian_minors(gens: &[MultiPoly], vars: &[Var], k: usize) -> Vec<Minor> {
    minors(&jacobian(gens, vars), k)
}

/// Rank of a numeric matrix over ℚ(i).
pub fn numeric_rank(mut m: Vec<Vec<GaussRational>>) -> usize {
    let nr = m.len();
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..nc {
        let Some(p) = (rank..nr).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][c].inv().unwrap();
        for r in 0..nr {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] * &inv;
                for cc in c..nc {
                    let d = &f * &m[rank][cc];
                    m[r][cc] -= &d;
                }
            }
        }
        rank += 1;
        if rank == nr {
            break;
        }
    }
    rank
}

/// Generic rank over the field of rational functions: largest k with a nonzero k-minor.
pub fn generic_rank(m: &[Vec<MultiPoly>]) -> usize {
    let nr = m.len();
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    // a numeric specialization gives a certified lower bound
    let mut vars = BTreeSet::new();
    for row in m {
        for e in row {
            vars.extend(e.vars());
        }
    }
    let vals: BTreeMap<Var, GaussRational> = vars
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, GaussRational::from_ints(2 + 3 * i as i64, 1 + (i as i64 * 7) % 5)))
        .collect();
    let num: Vec<Vec<GaussRational>> = m
        .iter()
        .map(|row| row.iter().map(|e| e.eval(&vals).unwrap()).collect())
        .collect();
    let mut r = numeric_rank(num);
    while r < nr.min(nc) && !minors(m, r + 1).is_empty() {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let a = p("z1 + i*w1b");
        let b = p("z1 - i*w1b");
        assert_eq!(&a * &b, p("z1^2 + w1b^2"));
        assert_eq!(p("(z1+1)^3").num_terms(), 4);
        assert_eq!(p("2*z1^2 - 3/4*i*zp2").to_string(), "2*z1^2 - 3/4*i*zp2");
    }

    #[test]
    fn conjugation_swaps_pairs() {
        let a = p("i*z1*w2b + zp1 + (2+i)*wp1b");
        assert_eq!(a.conjugate().unwrap(), p("-i*w1b*z2 + wp1b + (2-i)*zp1"));
        assert_eq!(a.conjugate().unwrap().conjugate().unwrap(), a);
        assert!(matches!(p("t1*z1").conjugate(), Err(PolyError::Unpaired(_))));
    }

    #[test]
    fn substitution_and_collection() {
        let rho = p("zp2 - wp2b - i*zp1*wp1b");
        let mut bind = BTreeMap::new();
        bind.insert(Var::wpb(1), p("t1"));
        bind.insert(Var::wpb(2), p("z2 - i*z1*t1"));
        let params: BTreeSet<Var> = [Var::t(1)].into_iter().collect();
        let coeffs = substitute_and_collect(&rho, &bind, &params);
        let got: Vec<MultiPoly> = coeffs.into_iter().map(|(_, c)| c).collect();
        assert_eq!(got, vec![p("zp2 - z2"), p("i*z1 - i*zp1")]);
    }

    #[test]
    fn derivative_and_determinant() {
        let g = vec![p("zp1*zp2"), p("zp1 + zp2^2")];
        let vars = [Var::zp(1), Var::zp(2)];
        let j = jacobian(&g, &vars);
        assert_eq!(determinant(&j), p("2*zp2^2 - zp1"));
        assert_eq!(generic_rank(&j), 2);
        let ms = jacobian_minors(&g, &vars, 1);
        assert_eq!(ms.len(), 4);
    }

    #[test]
    fn generic_rank_sees_symbolic_minors() {
        let m = vec![vec![p("z1"), p("z1*z2")], vec![p("1"), p("z2")]];
        assert_eq!(generic_rank(&m), 1);
    }

    #[test]
    fn truncation() {
        let a = p("t1 + t1^3*z1 + t1^2");
        assert_eq!(a.truncate_where(|v| v.group == Group::T, 2), p("t1 + t1^2"));
    }
}
