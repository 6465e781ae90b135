//! Structured factorisation into branches.
//!
//! Splitting only uses factorisations that are cheap to certify: monomial
//! content, perfect powers and roots of univariate polynomials over ℚ(i).
//! Leaves that are not graphs over a coordinate subspace are flagged as
//! possibly reducible; dimensions computed through them are upper bounds.

use super::{generically_empty, groebner, staircase_dimension, Ideal, TermOrder};
use crate::gauss::{small_divisors, GaussRational};
use crate::poly::{Monomial, MultiPoly, Var};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

const MAX_BRANCHES: usize = 256;
const DIVISOR_CAP: usize = 64;

/// A branch written as `x_s = φ_s(free, params)` for solved `x_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphForm {
    pub solved: Vec<(Var, MultiPoly)>,
    pub free: Vec<Var>,
}

impl GraphForm {
    pub fn value(&self, v: Var) -> MultiPoly {
        self.solved
            .iter()
            .find(|(s, _)| *s == v)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(|| MultiPoly::var(v))
    }

    pub fn bindings(&self) -> BTreeMap<Var, MultiPoly> {
        self.solved.iter().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub ideal: Ideal,
    pub dimension: i64,
    pub graph: Option<GraphForm>,
    pub possibly_reducible: bool,
}

impl Branch {
    pub fn contains_point(&self, point: &BTreeMap<Var, MultiPoly>) -> bool {
        self.ideal.gens.iter().all(|g| g.substitute(point).is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub branches: Vec<Branch>,
    /// Some splitting step was skipped, so the decomposition may be coarser.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDim {
    pub dim: i64,
    pub upper_bound: bool,
}

pub fn factor_split(ideal: &Ideal) -> Decomposition {
    let active = ideal.active.clone();
    let mut work: Vec<Vec<MultiPoly>> = vec![ideal.gens.clone()];
    let mut leaves: Vec<Vec<MultiPoly>> = Vec::new();
    let mut truncated = false;
    while let Some(gs) = work.pop() {
        let gb = groebner(&gs, &TermOrder::Block(vec![active.clone()]));
        if generically_empty(&gb, &active) {
            continue;
        }
        if leaves.len() + work.len() >= MAX_BRANCHES {
            truncated = true;
            leaves.push(gb.basis);
            continue;
        }
        let mut split_done = false;
        for (k, g) in gb.basis.iter().enumerate() {
            if let Some(alts) = split_generator(g, &active) {
                for alt in alts {
                    let mut next = gb.basis.clone();
                    next[k] = alt;
                    work.push(next);
                }
                split_done = true;
                break;
            }
        }
        if !split_done {
            if leaves.iter().all(|l| *l != gb.basis) {
                leaves.push(gb.basis);
            }
        }
    }
    // drop branches whose variety lies inside another branch
    let ideals: Vec<Ideal> = leaves.iter().map(|l| Ideal::new(l.clone(), active.clone())).collect();
    let gbs: Vec<_> = ideals.iter().map(|i| i.groebner()).collect();
    let mut keep = vec![true; ideals.len()];
    for i in 0..ideals.len() {
        for j in 0..ideals.len() {
            if i == j || !keep[j] {
                continue;
            }
            if ideals[j].gens.iter().all(|g| gbs[i].contains(g)) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut branches: Vec<Branch> = ideals
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(i, _)| make_branch(i))
        .collect();
    branches.sort_by_key(|b| b.ideal.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>());
    Decomposition { branches, truncated }
}

fn make_branch(ideal: Ideal) -> Branch {
    let gb = ideal.groebner();
    let dimension = staircase_dimension(&ideal.active, &gb.leading_monomials());
    let graph = graph_form_of(&ideal);
    let possibly_reducible = graph.is_none();
    Branch { ideal: Ideal::new(gb.basis, ideal.active.clone()), dimension, graph, possibly_reducible }
}

/// Try to write the branch as a graph over a coordinate subspace.
pub(crate) fn graph_form_of(ideal: &Ideal) -> Option<GraphForm> {
    let act = &ideal.active;
    let mut rev = act.clone();
    rev.reverse();
    let orders = [
        TermOrder::Lex(act.clone()),
        TermOrder::Lex(rev),
        TermOrder::Block(vec![act.clone()]),
    ];
    for ord in orders.iter() {
        let gb = groebner(&ideal.gens, ord);
        if let Some(g) = graph_shape(&gb.basis, &gb.leading_monomials(), act) {
            return Some(g);
        }
    }
    None
}

pub fn graph_shape(basis: &[MultiPoly], lms: &[Monomial], active: &[Var]) -> Option<GraphForm> {
    let mut solved = Vec::new();
    for (g, lm) in basis.iter().zip(lms) {
        let pairs = lm.pairs();
        if pairs.len() != 1 || pairs[0].1 != 1 || !active.contains(&pairs[0].0) {
            return None;
        }
        let x = pairs[0].0;
        let c = g.coeff(lm);
        let rest = &g.scale(&c.inv()?) - &MultiPoly::var(x);
        if rest.uses(|v| v == x) {
            return None;
        }
        solved.push((x, -rest));
    }
    let sv: BTreeSet<Var> = solved.iter().map(|s| s.0).collect();
    if solved.iter().any(|(_, p)| p.uses(|v| sv.contains(&v))) {
        return None;
    }
    let free = active.iter().copied().filter(|v| !sv.contains(v)).collect();
    solved.sort_by_key(|s| s.0);
    Some(GraphForm { solved, free })
}

/// Alternatives replacing `g`, each generating a branch, or None when `g` does not split.
fn split_generator(g: &MultiPoly, active: &[Var]) -> Option<Vec<MultiPoly>> {
    let is_active = |v: Var| active.contains(&v);
    // monomial content
    let mut content: Option<Vec<(Var, u32)>> = None;
    for (m, _) in g.terms() {
        let here: BTreeMap<Var, u32> = m.pairs().iter().copied().collect();
        content = Some(match content {
            None => m.pairs().to_vec(),
            Some(c) => c
                .into_iter()
                .filter_map(|(v, e)| here.get(&v).map(|&f| (v, e.min(f))))
                .collect(),
        });
    }
    let content = content.unwrap_or_default();
    if !content.is_empty() {
        if g.num_terms() == 1 && content.len() == 1 && content[0].1 == 1 {
            return None;
        }
        let cm = Monomial::from_pairs(content.clone());
        let reduced = MultiPoly::from_terms(g.terms().map(|(m, c)| {
            let pairs = m
                .pairs()
                .iter()
                .map(|&(v, e)| (v, e - cm.exponent(v)))
                .collect();
            (Monomial::from_pairs(pairs), c.clone())
        }));
        let mut alts: Vec<MultiPoly> = content
            .iter()
            .filter(|(v, _)| is_active(*v))
            .map(|(v, _)| MultiPoly::var(*v))
            .collect();
        if reduced.uses(is_active) {
            alts.push(reduced);
        }
        return Some(alts);
    }
    if g.total_degree() >= 2 {
        if let Some(h) = perfect_root(&g.monic()) {
            return Some(vec![h]);
        }
    }
    let avars: Vec<Var> = g.vars().into_iter().filter(|v| is_active(*v)).collect();
    if avars.len() == 1 && g.vars().len() == 1 && g.degree_in(avars[0]) >= 2 {
        let x = avars[0];
        let coeffs: Vec<GaussRational> =
            (0..=g.degree_in(x)).map(|k| g.coeff(&Monomial::var(x, k))).collect();
        let (roots, rest) = univariate_roots(&coeffs);
        if roots.is_empty() {
            return None;
        }
        let xv = MultiPoly::var(x);
        let mut alts: Vec<MultiPoly> =
            roots.iter().map(|r| &xv - &MultiPoly::constant(r.clone())).collect();
        if rest.len() >= 2 {
            let poly = MultiPoly::from_terms(
                rest.iter().enumerate().map(|(k, c)| (Monomial::var(x, k as u32), c.clone())),
            );
            alts.push(poly);
        }
        return Some(alts);
    }
    None
}

/// Some h with h^k = p for the largest possible k ≥ 2.
pub fn perfect_root(p: &MultiPoly) -> Option<MultiPoly> {
    let (lm, lc) = p.leading()?;
    // the degree of h^k is k·deg h, so k divides the total degree
    let d = p.total_degree();
    let mut ks: Vec<u32> = (2..=d).filter(|k| d % k == 0).collect();
    ks.reverse();
    for k in ks {
        if lm.pairs().iter().any(|&(_, e)| e % k != 0) {
            continue;
        }
        let Some(c0) = lc.nth_root(k) else { continue };
        let m0 = Monomial::from_pairs(lm.pairs().iter().map(|&(v, e)| (v, e / k)).collect());
        if let Some(h) = kth_root_iter(p, k, MultiPoly::term(m0, c0)) {
            return Some(h);
        }
    }
    None
}

fn kth_root_iter(p: &MultiPoly, k: u32, lead: MultiPoly) -> Option<MultiPoly> {
    let (lm0, lc0) = lead.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    // k·lead^{k-1}
    let denom_c = &GaussRational::from(k as i64) * &lc0.pow(k - 1);
    let denom_m = Monomial::from_pairs(lm0.pairs().iter().map(|&(v, e)| (v, e * (k - 1))).collect());
    let mut h = lead;
    for _ in 0..(p.num_terms() + 8) {
        let r = p - &h.pow(k);
        let Some((rm, rc)) = r.leading() else { return Some(h) };
        // divide the leading term of the residual by k·lead^{k-1}
        let mut pairs = Vec::new();
        for &(v, e) in rm.pairs() {
            let f = denom_m.exponent(v);
            if e < f {
                return None;
            }
            pairs.push((v, e - f));
        }
        if denom_m.pairs().iter().any(|&(v, f)| rm.exponent(v) < f) {
            return None;
        }
        let t = MultiPoly::term(Monomial::from_pairs(pairs), rc / &denom_c);
        if t.leading().map(|(m, _)| *m >= lm0).unwrap_or(true) {
            return None;
        }
        h = &h + &t;
    }
    if (p - &h.pow(k)).is_zero() {
        Some(h)
    } else {
        None
    }
}

/// Exact roots in ℚ(i) of Σ c_k x^k (with multiplicity removed) and the remaining cofactor.
fn univariate_roots(coeffs: &[GaussRational]) -> (Vec<GaussRational>, Vec<GaussRational>) {
    let mut rest: Vec<GaussRational> = coeffs.to_vec();
    while rest.last().map(|c| c.is_zero()).unwrap_or(false) {
        rest.pop();
    }
    let mut roots: Vec<GaussRational> = Vec::new();
    if rest.len() <= 2 {
        return (roots, rest);
    }
    if rest[0].is_zero() {
        roots.push(GaussRational::zero());
        while rest.len() > 1 && rest[0].is_zero() {
            rest.remove(0);
        }
    }
    for cand in root_candidates(&rest) {
        while rest.len() > 1 && horner(&rest, &cand).is_zero() {
            rest = deflate(&rest, &cand);
            if !roots.contains(&cand) {
                roots.push(cand.clone());
            }
        }
    }
    if rest.len() == 3 {
        let (c, b, a) = (&rest[0], &rest[1], &rest[2]);
        let disc = &(b * b) - &(&GaussRational::from(4) * &(a * c));
        if let Some(s) = disc.sqrt() {
            let two_a = &GaussRational::from(2) * a;
            for r in [&(&-b + &s) / &two_a, &(&-b - &s) / &two_a] {
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            rest = vec![GaussRational::one()];
        }
    }
    roots.sort();
    (roots, rest)
}

fn horner(c: &[GaussRational], x: &GaussRational) -> GaussRational {
    let mut acc = GaussRational::zero();
    for a in c.iter().rev() {
        acc = &(&acc * x) + a;
    }
    acc
}

fn deflate(c: &[GaussRational], r: &GaussRational) -> Vec<GaussRational> {
    let n = c.len() - 1;
    let mut q = vec![GaussRational::zero(); n];
    let mut carry = GaussRational::zero();
    for k in (0..n).rev() {
        carry = &c[k + 1] + &(&carry * r);
        q[k] = carry.clone();
    }
    q
}

/// Candidate Gaussian rational roots a/b with a | c_0 and b | c_d over ℤ[i], found through norms.
fn root_candidates(c: &[GaussRational]) -> Vec<GaussRational> {
    let mut den = BigInt::one();
    for a in c {
        den = den.lcm(a.re.denom()).lcm(a.im.denom());
    }
    let scale = GaussRational::real(num_rational::BigRational::from_integer(den));
    let ints: Vec<GaussRational> = c.iter().map(|a| a * &scale).collect();
    let norm = |a: &GaussRational| a.norm_sqr().numer().clone();
    let low = ints.iter().find(|a| !a.is_zero()).cloned().unwrap();
    let high = ints.last().cloned().unwrap();
    let (Some(a_list), Some(b_list)) = (gaussian_divisors(&norm(&low)), gaussian_divisors(&norm(&high)))
    else {
        return Vec::new();
    };
    let mut out = BTreeSet::new();
    for a in &a_list {
        for b in &b_list {
            out.insert(a / b);
        }
    }
    out.into_iter().collect()
}

/// Gaussian integers x + iy whose norm divides `n`.
fn gaussian_divisors(n: &BigInt) -> Option<Vec<GaussRational>> {
    let ds = small_divisors(n, DIVISOR_CAP)?;
    let mut out = Vec::new();
    for d in ds {
        let d: i64 = (&d).try_into().ok()?;
        let lim = (d as f64).sqrt() as i64 + 1;
        for x in -lim..=lim {
            let y2 = d - x * x;
            if y2 < 0 {
                continue;
            }
            let y = (y2 as f64).sqrt().round() as i64;
            for yy in [y, -y] {
                if yy * yy == y2 {
                    out.push(GaussRational::from_ints(x, yy));
                }
            }
        }
        if out.len() > 4 * DIVISOR_CAP {
            return None;
        }
    }
    out.retain(|g| !g.is_zero());
    Some(out)
}

/// Local dimension at a point whose coordinates may depend on the parameters.
pub fn local_dimension(ideal: &Ideal, point: &BTreeMap<Var, MultiPoly>) -> LocalDim {
    local_dimension_in(&factor_split(ideal), point)
}

pub fn local_dimension_in(dec: &Decomposition, point: &BTreeMap<Var, MultiPoly>) -> LocalDim {
    let mut best = LocalDim { dim: -1, upper_bound: false };
    for b in dec.branches.iter().filter(|b| b.contains_point(point)) {
        if b.dimension > best.dim {
            best = LocalDim { dim: b.dimension, upper_bound: b.possibly_reducible };
        } else if b.dimension == best.dim && !b.possibly_reducible {
            best.upper_bound = false;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s).unwrap()
    }

    fn zps(n: u16) -> Vec<Var> {
        (1..=n).map(Var::zp).collect()
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_root(&p("zp1^2 + 2*zp1*zp2 + zp2^2")), Some(p("zp1 + zp2")));
        assert_eq!(perfect_root(&p("zp1^3")), Some(p("zp1")));
        assert!(perfect_root(&p("zp1^2 + zp2^2")).is_none());
        let h = p("zp1 - 2*i*zp2 + 3");
        assert_eq!(perfect_root(&h.pow(3)), Some(h));
    }

    #[test]
    fn univariate() {
        let (r, rest) = univariate_roots(&[GaussRational::from(0), GaussRational::from(1), GaussRational::from(1)]);
        assert_eq!(r, vec![GaussRational::from(-1), GaussRational::from(0)]);
        assert_eq!(rest.len(), 1);
        // x^2 + 1 = (x - i)(x + i)
        let (r, _) = univariate_roots(&[GaussRational::from(1), GaussRational::from(0), GaussRational::from(1)]);
        assert_eq!(r.len(), 2);
        // x^3 - 2 has no roots in ℚ(i)
        let (r, rest) = univariate_roots(&[GaussRational::from(-2), 0.into(), 0.into(), 1.into()]);
        assert!(r.is_empty());
        assert_eq!(rest.len(), 4);
        // (2x - 1)(x^2 - 2)
        let (r, rest) =
            univariate_roots(&[GaussRational::from(2), GaussRational::from(-4), GaussRational::from(-1), 2.into()]);
        assert_eq!(r, vec![GaussRational::from_ratio(1, 2)]);
        assert_eq!(rest.len(), 3);
    }

    #[test]
    fn splits_products_and_roots() {
        let i = Ideal::new(vec![p("zp4 - z2"), p("zp1 - z1"), p("(1 + zp3)*zp3")], zps(4));
        let d = factor_split(&i);
        assert_eq!(d.branches.len(), 2);
        assert!(d.branches.iter().all(|b| b.dimension == 1 && b.graph.is_some()));
        let pins: Vec<MultiPoly> =
            d.branches.iter().map(|b| b.graph.as_ref().unwrap().value(Var::zp(3))).collect();
        assert!(pins.contains(&p("-1")) && pins.contains(&p("0")));
    }

    #[test]
    fn nonreduced_point() {
        let i = Ideal::new(
            vec![p("zp5"), p("zp3^2"), p("zp2^2"), p("zp4^3"), p("zp3*zp4"), p("zp1")],
            zps(5),
        );
        let d = factor_split(&i);
        assert_eq!(d.branches.len(), 1);
        assert_eq!(d.branches[0].dimension, 0);
    }

    #[test]
    fn contained_branches_are_pruned() {
        // zp1*zp2 = 0 and zp1*(zp2 - 1) = 0: line zp1 = 0 plus the point-free branch
        let i = Ideal::new(vec![p("zp1*zp2"), p("zp1*zp3")], zps(3));
        let d = factor_split(&i);
        let dims: Vec<i64> = d.branches.iter().map(|b| b.dimension).collect();
        assert_eq!(dims.len(), 2);
        assert!(dims.contains(&2) && dims.contains(&1));
    }

    #[test]
    fn local_dimension_picks_branch_through_point() {
        let i = Ideal::new(vec![p("zp1*zp2")], zps(2));
        let at = |a: i64, b: i64| -> BTreeMap<Var, MultiPoly> {
            [(Var::zp(1), MultiPoly::int(a)), (Var::zp(2), MultiPoly::int(b))].into_iter().collect()
        };
        assert_eq!(local_dimension(&i, &at(0, 3)).dim, 1);
        assert_eq!(local_dimension(&i, &at(1, 3)).dim, -1);
    }

    #[test]
    fn generic_parameters_in_branches() {
        // zp3*(z2^2 - z1*zp3): the second factor gives zp3 = z2^2/z1, not a polynomial graph
        let i = Ideal::new(
            vec![p("zp1 - z1"), p("zp2 - z2"), p("zp3*(zp2^2 - zp1*zp3)")],
            zps(3),
        );
        let d = factor_split(&i);
        assert_eq!(d.branches.len(), 2);
        assert_eq!(d.branches.iter().filter(|b| b.possibly_reducible).count(), 1);
    }
}
