//! Ideals, Gröbner bases, dimension and branch decomposition.
//!
//! An [`Ideal`] names its *active* variables; every other variable occurring in
//! its generators is a parameter, treated as a transcendental constant when
//! dimensions and branches are computed.

mod groebner;
mod split;

pub use split::{perfect_root as perfect_root_of, factor_split, graph_shape, local_dimension, Branch, Decomposition, GraphForm, LocalDim};

use crate::poly::{Monomial, MultiPoly, Var};
use groebner::{buchberger, leading_exp, reduce, IPoly, Ring};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Term orders. Listed variables come first; unlisted ones follow in natural order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermOrder {
    Lex(Vec<Var>),
    Grevlex(Vec<Var>),
    /// Grevlex inside each block, blocks compared lexicographically.
    Block(Vec<Vec<Var>>),
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub order: TermOrder,
    pub basis: Vec<MultiPoly>,
    ring: Ring,
    internal: Vec<IPoly>,
}

pub fn groebner(gens: &[MultiPoly], order: &TermOrder) -> GroebnerBasis {
    let vars: BTreeSet<Var> = gens.iter().flat_map(|g| g.vars()).collect();
    let ring = Ring::new(order, &vars);
    let input: Vec<IPoly> = gens.iter().map(|g| ring.from_poly(g)).collect();
    let internal = buchberger(&ring, input);
    let basis = internal.iter().map(|p| ring.to_poly(p)).collect();
    GroebnerBasis { order: order.clone(), basis, ring, internal }
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant() && !self.basis[0].is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.internal.iter().map(|p| self.ring.monomial(leading_exp(p))).collect()
    }

    pub fn normal_form(&self, p: &MultiPoly) -> MultiPoly {
        let pv = p.vars();
        if pv.iter().all(|v| self.ring.vars.contains(v)) {
            let r = reduce(&self.ring, &self.ring.from_poly(p), &self.internal);
            return self.ring.to_poly(&r);
        }
        let mut all: BTreeSet<Var> = self.ring.vars.iter().copied().collect();
        all.extend(pv);
        let ring = Ring::new(&self.order, &all);
        let g: Vec<IPoly> = self.basis.iter().map(|b| ring.from_poly(b)).collect();
        ring.to_poly(&reduce(&ring, &ring.from_poly(p), &g))
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.normal_form(p).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ideal {
    pub gens: Vec<MultiPoly>,
    pub active: Vec<Var>,
}

impl Ideal {
    pub fn new(gens: Vec<MultiPoly>, active: Vec<Var>) -> Ideal {
        Ideal { gens: gens.into_iter().filter(|g| !g.is_zero()).collect(), active }
    }

    pub fn params(&self) -> BTreeSet<Var> {
        self.gens.iter().flat_map(|g| g.vars()).filter(|v| !self.active.contains(v)).collect()
    }

    /// The order used for dimension and branch work: active variables ≫ parameters.
    pub fn default_order(&self) -> TermOrder {
        TermOrder::Block(vec![self.active.clone()])
    }

    pub fn groebner(&self) -> GroebnerBasis {
        groebner(&self.gens, &self.default_order())
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(gens, self.active.clone())
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        self.groebner().contains(p)
    }

    /// Inconsistent once parameters are generic.
    pub fn is_generically_empty(&self) -> bool {
        generically_empty(&self.groebner(), &self.active)
    }

    /// Krull dimension over the field of parameters; -1 when empty.
    pub fn dimension(&self) -> i64 {
        let gb = self.groebner();
        if generically_empty(&gb, &self.active) {
            return -1;
        }
        staircase_dimension(&self.active, &gb.leading_monomials())
    }

    /// I ∩ k[rest]: the elements of an elimination basis free of `drop`.
    pub fn eliminate(&self, drop: &[Var]) -> Ideal {
        let gb = groebner(&self.gens, &TermOrder::Block(vec![drop.to_vec()]));
        let gens = gb.basis.into_iter().filter(|g| !g.uses(|v| drop.contains(&v))).collect();
        let active = self.active.iter().copied().filter(|v| !drop.contains(v)).collect();
        Ideal::new(gens, active)
    }

    /// Same ideal under the default order.
    pub fn same_as(&self, other: &Ideal) -> bool {
        let a = self.groebner();
        let b = groebner(&other.gens, &self.default_order());
        a.basis == b.basis
    }
}

pub(crate) fn generically_empty(gb: &GroebnerBasis, active: &[Var]) -> bool {
    gb.is_unit() || gb.leading_monomials().iter().any(|m| !m.vars().any(|v| active.contains(&v)))
}

/// Largest subset of `active` containing the support of no leading monomial.
pub fn staircase_dimension(active: &[Var], leading: &[Monomial]) -> i64 {
    let n = active.len();
    assert!(n < 25, "too many active variables for subset enumeration");
    let masks: Vec<u32> = leading
        .iter()
        .map(|m| {
            m.vars()
                .filter_map(|v| active.iter().position(|a| *a == v))
                .fold(0u32, |acc, i| acc | (1 << i))
        })
        .collect();
    if masks.contains(&0) {
        return -1;
    }
    let mut best = 0i64;
    for s in 0u32..(1u32 << n) {
        let size = s.count_ones() as i64;
        if size > best && masks.iter().all(|&m| m & !s != 0) {
            best = size;
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
    fn dimensions() {
        let i = Ideal::new(vec![p("zp1*zp2")], zps(3));
        assert_eq!(i.dimension(), 2);
        let i = Ideal::new(vec![p("zp1 - z1"), p("zp2^2"), p("zp3 - zp2*z2")], zps(3));
        assert_eq!(i.dimension(), 0);
        let i = Ideal::new(vec![p("z1*zp1 - 1"), p("zp1")], zps(2));
        assert_eq!(i.dimension(), -1);
        let i = Ideal::new(vec![], zps(4));
        assert_eq!(i.dimension(), 4);
    }

    #[test]
    fn parameters_are_generic() {
        // z1*zp1 = 0 forces zp1 = 0 when z1 is generic
        let i = Ideal::new(vec![p("z1*zp1")], zps(2));
        assert_eq!(i.dimension(), 1);
        let i = Ideal::new(vec![p("z1 - 1")], zps(2));
        assert!(i.is_generically_empty());
    }

    #[test]
    fn elimination() {
        let i = Ideal::new(vec![p("zp4 - z4"), p("zp1 - z1"), p("zp2"), p("zp3")], zps(4));
        let e = i.eliminate(&[Var::zp(2), Var::zp(3), Var::zp(4)]);
        assert!(e.same_as(&Ideal::new(vec![p("zp1 - z1")], vec![Var::zp(1)])));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::poly::combinations;
    use crate::GaussRational;
    use proptest::prelude::*;

    fn vars(n: usize) -> Vec<Var> {
        (1..=n as u16).map(Var::zp).collect()
    }

    fn arb_ideal() -> impl Strategy<Value = Ideal> {
        (2usize..5).prop_flat_map(|n| {
            let poly = proptest::collection::vec((-3i64..4, proptest::collection::vec((0..n, 1u32..3), 0..3)), 1..4);
            proptest::collection::vec(poly, 1..4).prop_map(move |gens| {
                let v = vars(n);
                let gens = gens
                    .into_iter()
                    .map(|terms| {
                        MultiPoly::from_terms(terms.into_iter().map(|(c, pows)| {
                            (Monomial::from_pairs(pows.into_iter().map(|(i, e)| (v[i], e)).collect()), GaussRational::from(c))
                        }))
                    })
                    .filter(|g| !g.is_zero())
                    .collect();
                Ideal::new(gens, v)
            })
        })
    }

    fn elimination_dimension(ideal: &Ideal) -> i64 {
        if ideal.is_generically_empty() {
            return -1;
        }
        let n = ideal.active.len();
        for k in (0..=n).rev() {
            for keep in combinations(n, k) {
                let drop: Vec<Var> = (0..n).filter(|i| !keep.contains(i)).map(|i| ideal.active[i]).collect();
                if ideal.eliminate(&drop).gens.iter().all(|g| g.is_zero()) {
                    return k as i64;
                }
            }
        }
        0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn groebner_is_deterministic(i in arb_ideal()) {
            let order = TermOrder::Grevlex(vec![]);
            let a = groebner(&i.gens, &order);
            let mut rev = i.gens.clone();
            rev.reverse();
            prop_assert_eq!(&a.basis, &groebner(&rev, &order).basis);
            prop_assert_eq!(&a.basis, &groebner(&i.gens, &order).basis);
            for g in &i.gens {
                prop_assert!(a.contains(g));
            }
        }

        #[test]
        fn staircase_matches_elimination(i in arb_ideal()) {
            prop_assert_eq!(i.dimension(), elimination_dimension(&i));
        }

        #[test]
        fn orders_agree_on_membership(i in arb_ideal()) {
            let lex = Ideal::new(groebner(&i.gens, &TermOrder::Lex(vec![])).basis, i.active.clone());
            prop_assert!(lex.same_as(&i));
        }
    }
}
