//! Buchberger's algorithm with the product and chain criteria.

use super::TermOrder;
use crate::gauss::GaussRational;
use crate::poly::{Monomial, MultiPoly, Var};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub vars: Vec<Var>,
    /// Block boundaries; lex has one block per variable.
    blocks: Vec<(usize, usize)>,
    lex: bool,
    index: BTreeMap<Var, usize>,
}

type Exp = Vec<u16>;

#[derive(Clone, Debug)]
pub(crate) struct Term {
    key: Vec<i32>,
    exp: Exp,
    coeff: GaussRational,
}

pub(crate) type IPoly = Vec<Term>;

impl Ring {
    pub fn new(order: &TermOrder, extra: &BTreeSet<Var>) -> Ring {
        let mut vars: Vec<Var> = Vec::new();
        let mut blocks = Vec::new();
        let push_block = |vars: &mut Vec<Var>, blocks: &mut Vec<(usize, usize)>, b: &[Var]| {
            let start = vars.len();
            for &v in b {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            if vars.len() > start {
                blocks.push((start, vars.len()));
            }
        };
        let lex = matches!(order, TermOrder::Lex(_));
        match order {
            TermOrder::Lex(first) | TermOrder::Grevlex(first) => {
                let mut all: Vec<Var> = first.clone();
                all.extend(extra.iter().copied().filter(|v| !first.contains(v)));
                push_block(&mut vars, &mut blocks, &all);
            }
            TermOrder::Block(bs) => {
                for b in bs {
                    push_block(&mut vars, &mut blocks, b);
                }
                let rest: Vec<Var> = extra.iter().copied().filter(|v| !vars.contains(v)).collect();
                push_block(&mut vars, &mut blocks, &rest);
            }
        }
        let index = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Ring { vars, blocks, lex, index }
    }

    fn key(&self, e: &[u16]) -> Vec<i32> {
        if self.lex {
            return e.iter().map(|&x| x as i32).collect();
        }
        let mut k = Vec::with_capacity(e.len() + self.blocks.len());
        for &(s, t) in &self.blocks {
            k.push(e[s..t].iter().map(|&x| x as i32).sum());
            for i in (s..t).rev() {
                k.push(-(e[i] as i32));
            }
        }
        k
    }

    fn term(&self, exp: Exp, coeff: GaussRational) -> Term {
        Term { key: self.key(&exp), exp, coeff }
    }

    pub fn from_poly(&self, p: &MultiPoly) -> IPoly {
        let mut out: IPoly = p
            .terms()
            .map(|(m, c)| {
                let mut e = vec![0u16; self.vars.len()];
                for &(v, k) in m.pairs() {
                    e[self.index[&v]] = k as u16;
                }
                self.term(e, c.clone())
            })
            .collect();
        out.sort_by(|a, b| b.key.cmp(&a.key));
        out
    }

    pub fn to_poly(&self, p: &IPoly) -> MultiPoly {
        MultiPoly::from_terms(p.iter().map(|t| (self.monomial(&t.exp), t.coeff.clone())))
    }

    pub fn monomial(&self, e: &[u16]) -> Monomial {
        Monomial::from_pairs(
            e.iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| (self.vars[i], k as u32))
                .collect(),
        )
    }

    /// p - c * x^e * q
    fn sub_mul(&self, p: &IPoly, c: &GaussRational, e: &[u16], q: &IPoly) -> IPoly {
        let shifted: Vec<Term> = q
            .iter()
            .map(|t| {
                let exp: Exp = t.exp.iter().zip(e).map(|(a, b)| a + b).collect();
                self.term(exp, -(c * &t.coeff))
            })
            .collect();
        merge_add(p, &shifted)
    }
}

fn merge_add(a: &IPoly, b: &IPoly) -> IPoly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].key.cmp(&b[j].key) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].coeff + &b[j].coeff;
                if !c.is_zero() {
                    out.push(Term { key: a[i].key.clone(), exp: a[i].exp.clone(), coeff: c });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u16], b: &[u16]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn monic(p: IPoly) -> IPoly {
    match p.first() {
        None => p,
        Some(t) => {
            let inv = t.coeff.inv().unwrap();
            p.into_iter().map(|t| Term { coeff: &t.coeff * &inv, ..t }).collect()
        }
    }
}

/// Full reduction of `p` by the list `g` (all monic, nonzero).
pub(crate) fn reduce(ring: &Ring, p: &IPoly, g: &[IPoly]) -> IPoly {
    let mut p = p.clone();
    let mut rem: IPoly = Vec::new();
    while let Some(lt) = p.first().cloned() {
        let mut reduced = false;
        for q in g {
            let lq = &q[0];
            if divides(&lq.exp, &lt.exp) {
                let e: Exp = lt.exp.iter().zip(&lq.exp).map(|(a, b)| a - b).collect();
                let c = &lt.coeff / &lq.coeff;
                p = ring.sub_mul(&p, &c, &e, q);
                reduced = true;
                break;
            }
        }
        if !reduced {
            rem.push(lt);
            p.remove(0);
        }
    }
    rem
}

fn spoly(ring: &Ring, f: &IPoly, g: &IPoly) -> IPoly {
    let l = lcm(&f[0].exp, &g[0].exp);
    let ef: Exp = l.iter().zip(&f[0].exp).map(|(a, b)| a - b).collect();
    let eg: Exp = l.iter().zip(&g[0].exp).map(|(a, b)| a - b).collect();
    let a = ring.sub_mul(&Vec::new(), &-f[0].coeff.inv().unwrap(), &ef, f);
    ring.sub_mul(&a, &g[0].coeff.inv().unwrap(), &eg, g)
}

/// Reduced Gröbner basis: monic, sorted by decreasing leading monomial.
pub(crate) fn buchberger(ring: &Ring, input: Vec<IPoly>) -> Vec<IPoly> {
    let mut g: Vec<IPoly> = Vec::new();
    for p in input.into_iter().filter(|p| !p.is_empty()) {
        let r = reduce(ring, &p, &g);
        if !r.is_empty() {
            g.push(monic(r));
        }
    }
    if g.iter().any(|p| p[0].exp.iter().all(|&e| e == 0)) {
        return vec![vec![ring.term(vec![0; ring.vars.len()], GaussRational::one())]];
    }
    let mut pairs: BTreeSet<(Vec<i32>, usize, usize)> = BTreeSet::new();
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            let l = lcm(&g[i][0].exp, &g[j][0].exp);
            pairs.insert((ring.key(&l), i, j));
        }
    }
    let mut steps = 0usize;
    while let Some(pr) = pairs.iter().next().cloned() {
        pairs.remove(&pr);
        let (_, i, j) = pr;
        done.insert((i, j));
        let (li, lj) = (&g[i][0].exp, &g[j][0].exp);
        if coprime(li, lj) {
            continue;
        }
        let l = lcm(li, lj);
        let chain = (0..g.len()).any(|k| {
            k != i && k != j && divides(&g[k][0].exp, &l) && {
                let a = (i.min(k), i.max(k));
                let b = (j.min(k), j.max(k));
                done.contains(&a) && done.contains(&b)
            }
        });
        if chain {
            continue;
        }
        let s = spoly(ring, &g[i], &g[j]);
        let r = reduce(ring, &s, &g);
        steps += 1;
        if r.is_empty() {
            continue;
        }
        let r = monic(r);
        if r[0].exp.iter().all(|&e| e == 0) {
            return vec![r];
        }
        log::trace!("groebner step {}: new element {}", steps, ring.to_poly(&r));
        let k = g.len();
        for (a, p) in g.iter().enumerate() {
            let l = lcm(&p[0].exp, &r[0].exp);
            pairs.insert((ring.key(&l), a, k));
        }
        g.push(r);
    }
    interreduce(ring, g)
}

fn interreduce(ring: &Ring, g: Vec<IPoly>) -> Vec<IPoly> {
    // minimal basis
    let mut keep: Vec<IPoly> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(j, q)| {
            j != i
                && divides(&q[0].exp, &p[0].exp)
                && (q[0].exp != p[0].exp || j < i)
        });
        if !redundant {
            keep.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<IPoly> =
            keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()).collect();
        let lt = keep[i][0].clone();
        let tail: IPoly = keep[i][1..].to_vec();
        let mut r = reduce(ring, &tail, &others);
        r.insert(0, lt);
        out.push(monic(r));
    }
    out.sort_by(|a, b| b[0].key.cmp(&a[0].key));
    out
}

pub(crate) fn leading_exp(p: &IPoly) -> &[u16] {
    &p[0].exp
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn textbook_lex_basis() {
        // x^2 + y^2 + z^2 - 1, x^2 + z^2 - y, x - z under lex x > y > z
        let (x, y, z) = (Var::zp(1), Var::zp(2), Var::zp(3));
        let gens = vec![p("zp1^2 + zp2^2 + zp3^2 - 1"), p("zp1^2 + zp3^2 - zp2"), p("zp1 - zp3")];
        let gb = groebner(&gens, &TermOrder::Lex(vec![x, y, z]));
        let expect = vec![p("zp1 - zp3"), p("zp2 - 2*zp3^2"), p("zp3^4 + 1/2*zp3^2 - 1/4")];
        assert_eq!(gb.basis, expect);
    }

    #[test]
    fn unit_ideal() {
        let gb = groebner(&[p("zp1"), p("zp1 - 1")], &TermOrder::Grevlex(vec![]));
        assert!(gb.is_unit());
    }

    #[test]
    fn membership() {
        let gens = vec![p("zp1*zp2 - 1"), p("zp2^2 - zp1")];
        let gb = groebner(&gens, &TermOrder::Grevlex(vec![Var::zp(1), Var::zp(2)]));
        assert!(gb.contains(&(&p("zp1*zp2 - 1") * &p("zp2 + 7"))));
        assert!(!gb.contains(&p("zp1")));
        assert!(gb.contains(&p("zp2^3 - 1")));
    }
}
