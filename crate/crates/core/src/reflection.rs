//! Reflection of algebraic families across the target hypersurface.
//!
//! For E ⊂ ℂⁿ' the reflection is r(E) = {z' : ρ'(z', ē) = 0 for all e ∈ E}.
//! Families are given branch by branch in graph form, so the reflection is
//! cut out by the coefficients of ρ'(z', φ̄(w̄'_free)) in the free conjugate
//! variables, concatenated over branches.

use crate::ideal::{factor_split, Decomposition, GraphForm, Ideal};
use crate::models::{ChainTuple, CRModel, Triple};
use crate::poly::{substitute_and_collect, Group, MultiPoly, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scope {
    /// Branches pinned outside the target polydisc are discarded.
    Localized,
    Global,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Localized => "localized",
            Scope::Global => "global",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    First,
    Second,
    Combined,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReflectionError {
    #[error("branch {0} is not a graph over a coordinate subspace; reflection unsupported")]
    NotGraph(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionSystem {
    pub stage: Stage,
    pub gens: Vec<MultiPoly>,
    /// Where each generator came from.
    pub provenance: Vec<String>,
    pub scope: Option<Scope>,
    pub truncation: Option<u32>,
}

impl ReflectionSystem {
    pub fn push(&mut self, g: MultiPoly, why: String) {
        if g.is_zero() {
            return;
        }
        let g = g.monic();
        if !self.gens.contains(&g) {
            self.gens.push(g);
            self.provenance.push(why);
        }
    }

    pub fn extend(&mut self, other: &ReflectionSystem) {
        for (g, p) in other.gens.iter().zip(&other.provenance) {
            self.push(g.clone(), p.clone());
        }
    }

    pub fn new(stage: Stage, scope: Option<Scope>, truncation: Option<u32>) -> ReflectionSystem {
        ReflectionSystem { stage, gens: Vec::new(), provenance: Vec::new(), scope, truncation }
    }

    pub fn ideal(&self, n_target: u16) -> Ideal {
        Ideal::new(self.gens.clone(), target_vars(n_target))
    }

    /// Numeric specialisation in the source variables.
    pub fn specialize_source(&self, z: &[crate::GaussRational], wbar: &[crate::GaussRational]) -> Vec<MultiPoly> {
        let vals = crate::models::numeric_bindings(z, wbar);
        self.gens.iter().map(|g| g.specialize(&vals)).filter(|g| !g.is_zero()).collect()
    }
}

pub fn target_vars(n: u16) -> Vec<Var> {
    (1..=n).map(Var::zp).collect()
}

/// A family of target sets, possibly depending on source parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgFamily {
    pub decomposition: Decomposition,
}

impl AlgFamily {
    pub fn from_ideal(ideal: &Ideal) -> AlgFamily {
        AlgFamily { decomposition: factor_split(ideal) }
    }

    /// A single parametrised branch; the free variables may be parameters t.
    pub fn from_graph(graph: GraphForm, active: Vec<Var>) -> AlgFamily {
        let gens: Vec<MultiPoly> =
            graph.solved.iter().map(|(v, p)| &MultiPoly::var(*v) - p).collect();
        let branch = crate::ideal::Branch {
            ideal: Ideal::new(gens, active),
            dimension: graph.free.len() as i64,
            graph: Some(graph),
            possibly_reducible: false,
        };
        AlgFamily { decomposition: Decomposition { branches: vec![branch], truncated: false } }
    }
}

/// Generators of the first reflection: coefficients of ρ'(z', f̄(w̄)) on {w̄ : ρ(z, w̄) = 0}.
pub fn first_reflection(triple: &Triple) -> ReflectionSystem {
    let m = triple.m();
    let anti = triple.source.anti_segre();
    let mut bind = BTreeMap::new();
    for (k, c) in triple.map.conjugate().iter().enumerate() {
        bind.insert(Var::wpb(k as u16 + 1), c.substitute(&anti));
    }
    let params: BTreeSet<Var> = (1..=m).map(Var::t).collect();
    let order = triple.map.order();
    let mut sys = ReflectionSystem { stage: Stage::First, gens: Vec::new(), provenance: Vec::new(), scope: None, truncation: order };
    for (j, r) in triple.target.target_rhos().iter().enumerate() {
        for (mono, coeff) in substitute_and_collect(r, &bind, &params) {
            if let Some(n) = order {
                if mono.degree() > n {
                    continue;
                }
            }
            sys.push(coeff, format!("rho'{} coefficient of {}", j + 1, mono));
        }
    }
    sys
}

/// r(E) for a family E with graph branches.
pub fn reflect_set(target: &CRModel, fam: &AlgFamily, scope: Scope) -> Result<ReflectionSystem, ReflectionError> {
    let rhos = target.target_rhos();
    let mut sys =
        ReflectionSystem { stage: Stage::Second, gens: Vec::new(), provenance: Vec::new(), scope: Some(scope), truncation: None };
    for (b, branch) in fam.decomposition.branches.iter().enumerate() {
        let graph = branch.graph.as_ref().ok_or(ReflectionError::NotGraph(b))?;
        if scope == Scope::Localized && pinned_outside(target, graph) {
            continue;
        }
        let mut bind = BTreeMap::new();
        for (v, phi) in &graph.solved {
            bind.insert(v.partner().unwrap(), phi.conjugate_fixing(|u| u.group == Group::T));
        }
        let mut collect_vars: BTreeSet<Var> = graph.free.iter().map(|v| v.partner().unwrap_or(*v)).collect();
        for (_, phi) in &graph.solved {
            collect_vars.extend(phi.vars().into_iter().filter(|v| v.group == Group::T));
        }
        for (j, r) in rhos.iter().enumerate() {
            for (mono, coeff) in substitute_and_collect(r, &bind, &collect_vars) {
                sys.push(coeff, format!("branch {} rho'{} coefficient of {}", b, j + 1, mono));
            }
        }
    }
    Ok(sys)
}

/// Some solved coordinate is a numeric constant of modulus at least the radius.
fn pinned_outside(target: &CRModel, graph: &GraphForm) -> bool {
    graph.solved.iter().any(|(_, phi)| match phi.constant_value() {
        Some(c) => !c.modulus_lt(&target.radius),
        None => false,
    })
}

/// s(w̄, z'): the reflection of the first-stage family over generic source parameters.
pub fn second_reflection(
    triple: &Triple,
    first: &ReflectionSystem,
    scope: Scope,
) -> Result<ReflectionSystem, ReflectionError> {
    let fam = AlgFamily::from_ideal(&first.ideal(triple.n_target()));
    reflect_set(&triple.target, &fam, scope)
}

/// Drop monomial exponents to one and replace perfect powers by their roots, generator by generator.
pub fn local_radical(g: &MultiPoly) -> MultiPoly {
    let mut content: Option<BTreeMap<Var, u32>> = None;
    for (m, _) in g.terms() {
        let here: BTreeMap<Var, u32> = m.pairs().iter().copied().collect();
        content = Some(match content {
            None => here,
            Some(c) => c.into_iter().filter_map(|(v, e)| here.get(&v).map(|&f| (v, e.min(f)))).collect(),
        });
    }
    let content = content.unwrap_or_default();
    let stripped = MultiPoly::from_terms(g.terms().map(|(m, c)| {
        let pairs = m.pairs().iter().map(|&(v, e)| (v, e - content.get(&v).copied().unwrap_or(0))).collect();
        (crate::poly::Monomial::from_pairs(pairs), c.clone())
    }));
    let root = if stripped.total_degree() >= 2 {
        crate::ideal::perfect_root_of(&stripped.monic()).unwrap_or(stripped)
    } else {
        stripped
    };
    let sqfree = crate::poly::Monomial::from_pairs(content.keys().map(|&v| (v, 1)).collect());
    root.mul_monomial(&sqfree, &crate::GaussRational::from(1))
}

/// Rank in z' of the Jacobian of the (locally radical) generators at (tuple, f(z)).
pub fn immersion_rank(triple: &Triple, gens: &[MultiPoly], tuple: &ChainTuple) -> usize {
    let mut vals = crate::models::numeric_bindings(&tuple.z, &tuple.wbar);
    for (k, c) in triple.map.eval(&tuple.z).into_iter().enumerate() {
        vals.insert(Var::zp(k as u16 + 1), c);
    }
    let vars = target_vars(triple.n_target());
    let rows: Vec<Vec<crate::GaussRational>> = gens
        .iter()
        .map(local_radical)
        .map(|g| vars.iter().map(|&v| g.deriv(v).eval(&vals).expect("closed evaluation")).collect())
        .collect();
    crate::poly::numeric_rank(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;
    use crate::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s).unwrap()
    }

    fn sphere_embedding() -> Triple {
        let src = "
model M { ambient 2; crdim 1; eq z2 = conj(z2) + i*z1*conj(z1); }
map f : M -> M { z1; z2; }";
        parse_document(src).unwrap().triple(None).unwrap()
    }

    #[test]
    fn identity_first_reflection_is_the_graph() {
        let t = sphere_embedding();
        let s = first_reflection(&t);
        let expect = Ideal::new(vec![p("zp1 - z1"), p("zp2 - z2")], target_vars(2));
        assert!(s.ideal(2).same_as(&expect));
    }

    #[test]
    fn segre_image_reflects_to_first_stage() {
        // r(f(Q_z̄)) computed through a parametrised branch agrees with the direct collection
        let t = sphere_embedding();
        let anti = t.source.anti_segre();
        let solved: Vec<(Var, MultiPoly)> = t
            .map
            .conjugate()
            .iter()
            .enumerate()
            .map(|(k, c)| (Var::zp(k as u16 + 1), c.substitute(&anti).conjugate_fixing(|v| v.group == Group::T)))
            .collect();
        let fam = AlgFamily::from_graph(GraphForm { solved, free: vec![] }, target_vars(2));
        let r = reflect_set(&t.target, &fam, Scope::Global).unwrap();
        assert!(r.ideal(2).same_as(&first_reflection(&t).ideal(2)));
    }

    #[test]
    fn radical_per_generator() {
        assert_eq!(local_radical(&p("zp3^2")), p("zp3"));
        assert_eq!(local_radical(&p("zp1^2*zp2^3*(zp3 + 1)^2")), p("zp1*zp2*(zp3 + 1)"));
        assert_eq!(local_radical(&p("zp1 - z1")), p("zp1 - z1"));
    }

    #[test]
    fn localized_scope_drops_pinned_branches() {
        let t = sphere_embedding();
        let g = GraphForm { solved: vec![(Var::zp(1), p("-1")), (Var::zp(2), p("0"))], free: vec![] };
        let fam = AlgFamily::from_graph(g, target_vars(2));
        assert!(reflect_set(&t.target, &fam, Scope::Localized).unwrap().gens.is_empty());
        assert!(!reflect_set(&t.target, &fam, Scope::Global).unwrap().gens.is_empty());
    }
}
