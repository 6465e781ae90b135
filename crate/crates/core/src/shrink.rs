//! Shrinking the first reflection system by Jacobian minors, graph forms of
//! the shrunk system, and the derived sets built from it.
//!
//! A stage S of the filtration is enlarged by every k×k minor of ∂S/∂z′ that
//! is not already in the ideal of S, k being the largest order for which such
//! minors exist. The filtration stops at the first stage where one of these
//! minors does not vanish on the graph of f; that stage is 𝒲′.

use crate::ideal::{factor_split, graph_shape, groebner, Branch, Ideal, TermOrder};
use crate::models::{numeric_bindings, ChainTuple, Triple};
use crate::poly::{jacobian, minors, Group, Minor, MultiPoly, Var};
use crate::reflection::{reflect_set, target_vars, AlgFamily, ReflectionError, ReflectionSystem, Scope, Stage};
use crate::GaussRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

const MAX_STAGES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Prop16,
    SingularLocus,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Prop16 => "prop16",
            Mode::SingularLocus => "sing",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShrinkError {
    #[error("no {order}-minor of the shrunk system is nonzero at the tuple; the tuple lies in the bad set")]
    NotGraphRepresentable { order: usize },
    #[error("no branch through f(z) is a graph over the complementary coordinates")]
    SolveFailed,
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Generator count J_α.
    pub generators: usize,
    pub minor_order: usize,
    pub added: Vec<MultiPoly>,
    pub graph_contained: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationTrace {
    pub stages: Vec<StageRecord>,
    pub terminal_stage: usize,
    pub witness_minor: Option<MultiPoly>,
}

impl FiltrationTrace {
    pub fn strictly_increasing(&self) -> bool {
        self.stages.windows(2).all(|w| w[1].generators > w[0].generators)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrunkSystem {
    pub system: ReflectionSystem,
    /// Generic rank of ∂𝒲′/∂z′ at the terminal stage.
    pub rank: usize,
    pub mode: Mode,
    pub trace: FiltrationTrace,
}

/// f substituted for z′ vanishes (to truncation order).
pub fn on_graph(triple: &Triple, p: &MultiPoly) -> bool {
    let bind = triple.map.graph_bindings();
    triple.vanishes(&triple.on_complexification(&p.substitute(&bind)))
}

/// Largest k having some k-minor outside the ideal, with all such minors deduplicated up to a unit.
fn fresh_minors(gens: &[MultiPoly], n_target: u16) -> (usize, Vec<Minor>) {
    let vars = target_vars(n_target);
    let jac = jacobian(gens, &vars);
    let gb = groebner(gens, &TermOrder::Block(vec![vars.clone()]));
    for k in (1..=gens.len().min(vars.len())).rev() {
        let mut fresh: Vec<Minor> = Vec::new();
        for mut mi in minors(&jac, k) {
            if gb.contains(&mi.value) {
                continue;
            }
            mi.value = mi.value.monic();
            if fresh.iter().all(|f| f.value != mi.value) {
                fresh.push(mi);
            }
        }
        if !fresh.is_empty() {
            return (k, fresh);
        }
    }
    (0, Vec::new())
}

pub fn minor_filtration(triple: &Triple, first: &ReflectionSystem, mode: Mode) -> Result<ShrunkSystem, ShrinkError> {
    if first.stage != Stage::First {
        return Err(ShrinkError::Internal("filtration needs a first-stage system".into()));
    }
    let nt = triple.n_target();
    let mut stage = first.clone();
    let mut stages = Vec::new();
    for alpha in 0..MAX_STAGES {
        if let Some(g) = stage.gens.iter().find(|g| !on_graph(triple, g)) {
            return Err(ShrinkError::Internal(format!("graph of f escapes stage {}: {}", alpha, g)));
        }
        let (k, fresh) = fresh_minors(&stage.gens, nt);
        let contained = fresh.iter().all(|m| on_graph(triple, &m.value));
        log::debug!("stage {}: {} generators, {} minors of order {}", alpha, stage.gens.len(), fresh.len(), k);
        stages.push(StageRecord {
            generators: stage.gens.len(),
            minor_order: k,
            added: fresh.iter().map(|m| m.value.clone()).collect(),
            graph_contained: contained && !fresh.is_empty(),
        });
        if fresh.is_empty() || !contained {
            let witness = fresh.iter().find(|m| !on_graph(triple, &m.value)).map(|m| m.value.clone());
            let trace = FiltrationTrace { stages, terminal_stage: alpha, witness_minor: witness };
            return Ok(ShrunkSystem { system: stage, rank: k, mode, trace });
        }
        let mut next = stage.clone();
        for m in &fresh {
            next.push(m.value.clone(), format!("stage {} minor rows {:?} cols {:?}", alpha, m.rows, m.cols));
        }
        if mode == Mode::SingularLocus {
            let (k2, fresh2) = fresh_minors(&next.gens, nt);
            let witness = fresh2.iter().find(|m| !on_graph(triple, &m.value)).map(|m| m.value.clone());
            stages.push(StageRecord {
                generators: next.gens.len(),
                minor_order: k2,
                added: Vec::new(),
                graph_contained: false,
            });
            let trace = FiltrationTrace { stages, terminal_stage: alpha + 1, witness_minor: witness };
            return Ok(ShrunkSystem { system: next, rank: k2, mode, trace });
        }
        stage = next;
    }
    Err(ShrinkError::Internal(format!("filtration did not terminate within {} stages", MAX_STAGES)))
}

/// Local solved form z₂′ = Φ′(z, w̄, z₁′) of the shrunk system near f(z).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRepr {
    pub solved: Vec<(Var, MultiPoly)>,
    pub free: Vec<Var>,
    pub n1: usize,
    pub n2: usize,
    /// Φ′ holds for all (z, w̄) rather than only at the tuple.
    pub symbolic: bool,
}

fn point_values(triple: &Triple, tuple: &ChainTuple) -> BTreeMap<Var, GaussRational> {
    let mut vals = numeric_bindings(&tuple.z, &tuple.wbar);
    for (k, c) in triple.map.eval(&tuple.z).into_iter().enumerate() {
        vals.insert(Var::zp(k as u16 + 1), c);
    }
    vals
}

pub fn graph_form(triple: &Triple, w: &ShrunkSystem, tuple: &ChainTuple) -> Result<GraphRepr, ShrinkError> {
    let vars = target_vars(triple.n_target());
    let vals = point_values(triple, tuple);
    let jac = jacobian(&w.system.gens, &vars);
    let k = w.rank;
    let chosen = minors(&jac, k)
        .into_iter()
        .find(|m| m.value.eval(&vals).map(|v| !v.is_zero()).unwrap_or(false))
        .ok_or(ShrinkError::NotGraphRepresentable { order: k })?;
    let solved_vars: Vec<Var> = chosen.cols.iter().map(|&c| vars[c]).collect();
    let free: Vec<Var> = vars.iter().copied().filter(|v| !solved_vars.contains(v)).collect();
    let mut order_vars = solved_vars.clone();
    order_vars.extend(free.iter().copied());

    let symbolic_point = triple.map.graph_bindings();
    let sym = Ideal::new(w.system.gens.clone(), vars.clone());
    if let Some(sol) = solve_through(&sym, &order_vars, &solved_vars, |b| b.contains_point(&symbolic_point)) {
        return finish(w, sol, free, true);
    }
    let zw = numeric_bindings(&tuple.z, &tuple.wbar);
    let gens: Vec<MultiPoly> = w.system.gens.iter().map(|g| g.specialize(&zw)).collect();
    let num_point: BTreeMap<Var, MultiPoly> =
        vars.iter().map(|&v| (v, MultiPoly::constant(vals[&v].clone()))).collect();
    let conc = Ideal::new(gens, vars.clone());
    let sol = solve_through(&conc, &order_vars, &solved_vars, |b| b.contains_point(&num_point))
        .ok_or(ShrinkError::SolveFailed)?;
    finish(w, sol, free, false)
}

fn solve_through(
    ideal: &Ideal,
    order_vars: &[Var],
    solved_vars: &[Var],
    through: impl Fn(&Branch) -> bool,
) -> Option<Vec<(Var, MultiPoly)>> {
    for b in factor_split(ideal).branches.iter().filter(|b| through(b)) {
        let gb = groebner(&b.ideal.gens, &TermOrder::Lex(order_vars.to_vec()));
        if let Some(g) = graph_shape(&gb.basis, &gb.leading_monomials(), &ideal.active) {
            let mut got: Vec<Var> = g.solved.iter().map(|s| s.0).collect();
            got.sort();
            let mut want = solved_vars.to_vec();
            want.sort();
            if got == want {
                return Some(g.solved);
            }
        }
    }
    None
}

fn finish(w: &ShrunkSystem, solved: Vec<(Var, MultiPoly)>, free: Vec<Var>, symbolic: bool) -> Result<GraphRepr, ShrinkError> {
    if symbolic {
        let bind: BTreeMap<Var, MultiPoly> = solved.iter().cloned().collect();
        if let Some(g) = w.system.gens.iter().find(|g| !g.substitute(&bind).is_zero()) {
            return Err(ShrinkError::Internal(format!("solved form does not annihilate {}", g)));
        }
    }
    Ok(GraphRepr { n1: free.len(), n2: solved.len(), solved, free, symbolic })
}

/// The source variables of `gens` stand for w; reflecting conjugates them to w̄.
fn reflect_over_w(triple: &Triple, gens: &[MultiPoly], scope: Scope) -> Result<ReflectionSystem, ReflectionError> {
    let fam = AlgFamily::from_ideal(&Ideal::new(gens.to_vec(), target_vars(triple.n_target())));
    reflect_set(&triple.target, &fam, scope)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSets {
    pub z_prime: ReflectionSystem,
    pub m_prime: ReflectionSystem,
    pub x_prime: ReflectionSystem,
    /// ℳ′ = 𝕏′ + 𝒵′ at the ideal level.
    pub identity_holds: bool,
}

/// 𝒵′, ℳ′ and 𝕏′ over generic (z, w̄) on the complexification.
pub fn derived_sets(
    triple: &Triple,
    first: &ReflectionSystem,
    shrunk: &ShrunkSystem,
    scope: Scope,
) -> Result<DerivedSets, ShrinkError> {
    let rv = reflect_over_w(triple, &first.gens, scope)?;
    let rw = reflect_over_w(triple, &shrunk.system.gens, scope)?;
    let combine = |a: &ReflectionSystem, b: &ReflectionSystem| {
        let mut s = ReflectionSystem::new(Stage::Combined, Some(scope), first.truncation);
        for (g, p) in a.gens.iter().zip(&a.provenance).chain(b.gens.iter().zip(&b.provenance)) {
            s.push(triple.on_complexification(g), p.clone());
        }
        s
    };
    let x_prime = combine(first, &rv);
    let z_prime = combine(&shrunk.system, &rw);
    let m_prime = combine(&shrunk.system, &rv);
    let nt = triple.n_target();
    let mut sum = x_prime.ideal(nt);
    sum = sum.sum(&z_prime.ideal(nt));
    let identity_holds = m_prime.ideal(nt).same_as(&sum);
    Ok(DerivedSets { z_prime, m_prime, x_prime, identity_holds })
}

/// Variables of a reflected system are in (w̄, z′) only.
pub fn is_second_stage(sys: &ReflectionSystem) -> bool {
    sys.gens.iter().all(|g| !g.uses(|v| v.group == Group::Z || v.group == Group::T))
}
