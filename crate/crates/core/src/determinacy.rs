//! Determinacy conditions at sample points, comparison tables and verdicts.
//!
//! The five sets at a tuple (z, w̄, z¹) are
//! 𝒱′ = r(f(Q_z̄)), 𝒲′ its shrinking, 𝕏′ = 𝒱′_z ∩ r(𝒱′_w),
//! 𝒵′ = 𝒲′_z ∩ r(𝒲′_w) and ℳ′ = 𝒲′_z ∩ r(𝒱′_w).
//! Every set is computed with the source data specialised to the tuple.

use crate::ideal::{local_dimension, Ideal, LocalDim};
use crate::models::{conj_point, numeric_bindings, sample_chain, sample_points, ChainTuple, ModelError, Triple};
use crate::poly::{Group, MultiPoly, Var};
use crate::reflection::{
    first_reflection, immersion_rank, reflect_set, target_vars, AlgFamily, ReflectionError, ReflectionSystem, Scope,
};
use crate::shrink::{minor_filtration, Mode, ShrinkError, ShrunkSystem};
use crate::GaussRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_SAMPLES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeterminacyError {
    #[error("triple does not validate: {0}")]
    Invalid(String),
    #[error("tuple is not on the chain set")]
    NotAdmissible,
    #[error("the {route} system has dimension {dim} in z'; no finite determinacy")]
    NoFiniteDeterminacy { route: &'static str, dim: i64 },
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Shrink(#[from] ShrinkError),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
}

/// Precomputed first reflection and its shrinking.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub triple: Triple,
    pub first: ReflectionSystem,
    pub shrunk: ShrunkSystem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRecord {
    pub v: LocalDim,
    pub w: LocalDim,
    pub z: Option<LocalDim>,
    pub x: Option<LocalDim>,
    pub m: Option<LocalDim>,
    pub immersion_rank: Option<usize>,
    /// ℳ′ = 𝕏′ + 𝒵′ as ideals at the tuple.
    pub identity_holds: Option<bool>,
    pub notes: Vec<String>,
}

impl DimRecord {
    /// Dimension of 𝒱′, 𝒵′, 𝕏′, ℳ′ for j = 1..4.
    pub fn indexed(&self, j: usize) -> Option<LocalDim> {
        match j {
            1 => Some(self.v),
            2 => self.z,
            3 => self.x,
            4 => self.m,
            _ => None,
        }
    }

    /// dim 𝕏′ ≤ dim 𝒱′, dim 𝒵′ ≤ dim 𝒲′ ≤ dim 𝒱′, dim ℳ′ ≤ min(dim 𝕏′, dim 𝒵′).
    pub fn monotone(&self) -> bool {
        let le = |a: Option<LocalDim>, b: Option<LocalDim>| match (a, b) {
            (Some(a), Some(b)) => a.dim <= b.dim || b.upper_bound || a.upper_bound,
            _ => true,
        };
        le(self.x, Some(self.v))
            && le(self.z, Some(self.w))
            && le(Some(self.w), Some(self.v))
            && le(self.m, self.x)
            && le(self.m, self.z)
    }
}

/// Specialise source variables, substituting `at` for z.
fn at_source(gens: &[MultiPoly], at: &[GaussRational]) -> Vec<MultiPoly> {
    let vals = numeric_bindings(at, &[]);
    gens.iter().map(|g| g.specialize(&vals)).filter(|g| !g.is_zero()).collect()
}

fn constant_point(p: &[GaussRational]) -> BTreeMap<Var, MultiPoly> {
    p.iter().enumerate().map(|(k, c)| (Var::zp(k as u16 + 1), MultiPoly::constant(c.clone()))).collect()
}

impl Analysis {
    pub fn new(triple: Triple, mode: Mode) -> Result<Analysis, DeterminacyError> {
        let report = triple.validate();
        if !report.passed() {
            let mut why = report.errors.clone();
            why.extend(report.residuals.iter().map(|r| format!("residual in equation {}: {}", r.equation, r.polynomial)));
            return Err(DeterminacyError::Invalid(why.join("; ")));
        }
        let first = first_reflection(&triple);
        let shrunk = minor_filtration(&triple, &first, mode)?;
        Ok(Analysis { triple, first, shrunk })
    }

    fn ideal(&self, gens: Vec<MultiPoly>) -> Ideal {
        Ideal::new(gens, target_vars(self.triple.n_target()))
    }

    fn reflect(&self, gens: Vec<MultiPoly>, scope: Scope) -> Result<ReflectionSystem, ReflectionError> {
        reflect_set(&self.triple.target, &AlgFamily::from_ideal(&self.ideal(gens)), scope)
    }

    pub fn dims_at(&self, tuple: &ChainTuple, scope: Scope) -> Result<DimRecord, DeterminacyError> {
        if !tuple.admissible(&self.triple.source) {
            return Err(DeterminacyError::NotAdmissible);
        }
        let w = tuple.w();
        let vz = at_source(&self.first.gens, &tuple.z);
        let wz = at_source(&self.shrunk.system.gens, &tuple.z);
        let fz = self.triple.map.eval(&tuple.z);
        let point = constant_point(&fz);
        let v = local_dimension(&self.ideal(vz.clone()), &point);
        let wd = local_dimension(&self.ideal(wz.clone()), &point);
        let mut notes = Vec::new();
        let rv = self.reflect(at_source(&self.first.gens, &w), scope);
        let rw = self.reflect(at_source(&self.shrunk.system.gens, &w), scope);
        let union = |a: &[MultiPoly], b: &ReflectionSystem| {
            let mut g = a.to_vec();
            g.extend(b.gens.iter().cloned());
            g
        };
        let (mut x, mut z, mut m, mut rank, mut identity) = (None, None, None, None, None);
        match &rv {
            Ok(rv) => {
                let xg = union(&vz, rv);
                x = Some(local_dimension(&self.ideal(xg.clone()), &point));
                m = Some(local_dimension(&self.ideal(union(&wz, rv)), &point));
                rank = Some(immersion_rank(&self.triple, &xg, tuple));
            }
            Err(e) => notes.push(format!("r(V'_w): {}", e)),
        }
        match &rw {
            Ok(rw) => z = Some(local_dimension(&self.ideal(union(&wz, rw)), &point)),
            Err(e) => notes.push(format!("r(W'_w): {}", e)),
        }
        if let (Ok(rv), Ok(rw)) = (&rv, &rw) {
            let mut sum = union(&vz, rv);
            sum.extend(union(&wz, rw));
            identity = Some(self.ideal(union(&wz, rv)).same_as(&self.ideal(sum)));
        }
        for (name, d) in [("V'", Some(v)), ("W'", Some(wd)), ("Z'", z), ("X'", x), ("M'", m)] {
            if let Some(d) = d {
                if d.upper_bound {
                    notes.push(format!("dim {} is an upper bound", name));
                }
                if d.dim < 0 {
                    return Err(DeterminacyError::Internal(format!("f(z) is not on {}", name)));
                }
            }
        }
        Ok(DimRecord { v, w: wd, z, x, m, immersion_rank: rank, identity_holds: identity, notes })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// At the base point only.
    AtPoint,
    /// At points of M, i.e. diagonal tuples (p, p̄).
    OnM,
    /// At chain tuples (z, w̄, z¹).
    OnChain,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::AtPoint => "C_p",
            Family::OnM => "C(M)",
            Family::OnChain => "C(cM)",
        }
    }
}

pub const SET_NAMES: [&str; 4] = ["V'", "Z'", "X'", "M'"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionId {
    pub family: Family,
    pub index: usize,
    pub scope: Scope,
}

impl ConditionId {
    pub fn label(&self) -> String {
        let f = self.family.label();
        let (head, tail) = f.split_at(1);
        format!("{}^{}{} [{}]", head, self.index, tail, self.scope.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub id: ConditionId,
    pub status: Status,
    /// Samples with dimension zero.
    pub zero_samples: usize,
    pub tested: usize,
    /// First sample with positive dimension.
    pub counterexample: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub family: Family,
    pub scope: Scope,
    pub index: usize,
    pub tuple: ChainTuple,
    pub dims: Option<DimRecord>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Consistent,
    Violated,
    Unknown,
}

/// Observed status of C^j ⇒ C^k inside one family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationTable {
    pub family: Family,
    pub scope: Scope,
    pub cells: [[Cell; 4]; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: String,
    pub trigger: Option<ConditionId>,
    pub algebraic: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterminacyReport {
    pub samples: usize,
    pub seed: u64,
    pub truncation: Option<u32>,
    pub records: Vec<SampleRecord>,
    pub conditions: Vec<Condition>,
    pub tables: Vec<ImplicationTable>,
    pub verdicts: Vec<Verdict>,
    pub caveats: Vec<String>,
}

impl DeterminacyReport {
    pub fn condition(&self, family: Family, index: usize, scope: Scope) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == ConditionId { family, index, scope })
    }

    pub fn fired(&self, theorem: &str) -> bool {
        self.verdicts.iter().any(|v| v.theorem == theorem && v.algebraic)
    }
}

fn condition_of(id: ConditionId, records: &[&SampleRecord]) -> Condition {
    let mut zero = 0;
    let mut counter = None;
    let mut unknown = false;
    for r in records {
        match r.dims.as_ref().and_then(|d| d.indexed(id.index)) {
            Some(d) if d.dim == 0 => zero += 1,
            Some(d) if d.dim > 0 && !d.upper_bound => {
                if counter.is_none() {
                    counter = Some(r.index);
                }
            }
            _ => unknown = true,
        }
    }
    let status = if counter.is_some() {
        Status::Fails
    } else if !unknown && zero == records.len() && !records.is_empty() {
        Status::Holds
    } else {
        Status::Undetermined
    };
    Condition { id, status, zero_samples: zero, tested: records.len(), counterexample: counter }
}

fn table(family: Family, scope: Scope, conds: &[Condition]) -> ImplicationTable {
    let st = |j: usize| {
        conds
            .iter()
            .find(|c| c.id == ConditionId { family, index: j, scope })
            .map(|c| c.status)
            .unwrap_or(Status::Undetermined)
    };
    let mut cells = [[Cell::Unknown; 4]; 4];
    for j in 1..=4 {
        for k in 1..=4 {
            cells[j - 1][k - 1] = match (st(j), st(k)) {
                (Status::Holds, Status::Fails) => Cell::Violated,
                (Status::Fails, _) | (_, Status::Holds) => Cell::Consistent,
                _ => Cell::Unknown,
            };
        }
    }
    ImplicationTable { family, scope, cells }
}

pub fn classify(a: &Analysis, samples: usize, seed: u64, scopes: &[Scope]) -> Result<DeterminacyReport, DeterminacyError> {
    let src = &a.triple.source;
    let mut tuples: Vec<(Family, ChainTuple)> = vec![(Family::AtPoint, ChainTuple::origin(src.n))];
    tuples.extend(sample_points(src, samples, seed)?.iter().map(|p| (Family::OnM, ChainTuple::diagonal(p))));
    tuples.extend(sample_chain(src, samples, seed)?.into_iter().map(|t| (Family::OnChain, t)));
    let mut records = Vec::new();
    for &scope in scopes {
        let mut counters: BTreeMap<Family, usize> = BTreeMap::new();
        for (family, tuple) in &tuples {
            let index = counters.entry(*family).or_insert(0);
            let (dims, error) = match a.dims_at(tuple, scope) {
                Ok(d) => (Some(d), None),
                Err(e) => (None, Some(e.to_string())),
            };
            records.push(SampleRecord { family: *family, scope, index: *index, tuple: tuple.clone(), dims, error });
            *index += 1;
        }
    }
    let mut conditions = Vec::new();
    let mut tables = Vec::new();
    for &scope in scopes {
        for family in [Family::AtPoint, Family::OnM, Family::OnChain] {
            let rs: Vec<&SampleRecord> = records.iter().filter(|r| r.family == family && r.scope == scope).collect();
            for index in 1..=4 {
                conditions.push(condition_of(ConditionId { family, index, scope }, &rs));
            }
            tables.push(table(family, scope, &conditions));
        }
    }
    let holds = |family, index, scope| {
        conditions
            .iter()
            .find(|c| c.id == ConditionId { family, index, scope })
            .filter(|c| c.status == Status::Holds)
            .map(|c| c.id)
    };
    let verdict = |theorem: &str, trigger: Option<ConditionId>, scope: Scope| {
        let evaluated = scopes.contains(&scope);
        let note = match (trigger, evaluated) {
            (Some(id), _) => format!("{} holds on tested samples", id.label()),
            (None, true) => "hypothesis not observed on tested samples".to_string(),
            (None, false) => format!("{} scope not evaluated", scope.name()),
        };
        Verdict { theorem: theorem.to_string(), trigger, algebraic: trigger.is_some(), note }
    };
    let loc = Scope::Localized;
    let glob = Scope::Global;
    let verdicts = vec![
        verdict(
            "Theorem 1",
            holds(Family::OnChain, 1, loc).or_else(|| holds(Family::OnChain, 3, loc)),
            loc,
        ),
        verdict("Theorem 1'", holds(Family::OnM, 3, loc), loc),
        verdict("Zaitsev", holds(Family::OnM, 2, loc), loc),
        verdict("Theorem 1''", holds(Family::OnChain, 3, glob), glob),
        Verdict {
            theorem: "Theorem 7".into(),
            trigger: None,
            algebraic: false,
            note: "hypothesis on M' not checked; its content reduces to C^3".into(),
        },
    ];
    let mut caveats = Vec::new();
    if let Some(n) = a.triple.map.order() {
        caveats.push(format!("map truncated at order {}; conclusions hold up to that order", n));
    }
    if records.iter().any(|r| r.error.is_some()) {
        caveats.push("some samples could not be evaluated; affected conditions are undetermined".into());
    }
    Ok(DeterminacyReport { samples, seed, truncation: a.triple.map.order(), records, conditions, tables, verdicts, caveats })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    X,
    Z,
    M,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::X => "X'",
            Route::Z => "Z'",
            Route::M => "M'",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dependence {
    pub coordinate: usize,
    pub polynomial: MultiPoly,
    pub degree: u32,
    pub verified: bool,
}

/// Monic-in-z′_j polynomials P_j(z, z′_j) with P_j(z, f_j(z)) = 0 on Q_w̄.
pub fn algebraic_dependence(
    a: &Analysis,
    wbar: &[GaussRational],
    scope: Scope,
    route: Route,
) -> Result<Vec<Dependence>, DeterminacyError> {
    let t = &a.triple;
    let src = &t.source;
    if wbar.len() != src.n as usize {
        return Err(DeterminacyError::NotAdmissible);
    }
    let wvals = numeric_bindings(&[], wbar);
    let segre: BTreeMap<Var, MultiPoly> = (0..src.d())
        .map(|j| (Var::z(src.m + 1 + j), src.theta[j as usize].specialize(&wvals)))
        .collect();
    let on_q = |gens: &[MultiPoly]| -> Vec<MultiPoly> { gens.iter().map(|g| g.substitute(&segre)).collect() };
    let w = conj_point(wbar);
    let (near, far) = match route {
        Route::X => (&a.first.gens, &a.first.gens),
        Route::Z => (&a.shrunk.system.gens, &a.shrunk.system.gens),
        Route::M => (&a.shrunk.system.gens, &a.first.gens),
    };
    let mut gens = on_q(near);
    gens.extend(a.reflect(at_source(far, &w), scope)?.gens);
    let ideal = a.ideal(gens);
    let dim = ideal.dimension();
    if dim > 0 {
        return Err(DeterminacyError::NoFiniteDeterminacy { route: route.name(), dim });
    }
    if dim < 0 {
        return Err(DeterminacyError::Internal(format!("{} system is empty on Q_w", route.name())));
    }
    let vars = target_vars(t.n_target());
    let mut out = Vec::new();
    for (j, &x) in vars.iter().enumerate() {
        let drop: Vec<Var> = vars.iter().copied().filter(|&v| v != x).collect();
        let elim = ideal.eliminate(&drop);
        let best = elim
            .gens
            .iter()
            .filter(|g| g.degree_in(x) > 0)
            .min_by_key(|g| (g.degree_in(x), g.num_terms(), g.to_string()))
            .cloned()
            .ok_or_else(|| DeterminacyError::Internal(format!("no relation for z'{}", j + 1)))?;
        let d = best.degree_in(x);
        let lead: MultiPoly = best
            .terms()
            .filter(|(m, _)| m.exponent(x) == d)
            .fold(MultiPoly::zero(), |mut acc, (m, c)| {
                acc.add_term(m.clone(), c);
                acc
            });
        let lead_x = crate::poly::Monomial::var(x, d);
        let polynomial = if lead.num_terms() == 1 && lead.coeff(&lead_x) != GaussRational::from(0) {
            best.scale(&lead.coeff(&lead_x).inv().expect("nonzero leading coefficient"))
        } else {
            best.monic()
        };
        let mut bind = segre.clone();
        bind.insert(x, t.map.components[j].substitute(&segre));
        let verified = t.vanishes(&polynomial.substitute(&bind));
        out.push(Dependence { coordinate: j + 1, polynomial, degree: d, verified });
    }
    Ok(out)
}

/// Source variables used by generators, for reporting.
pub fn source_support(gens: &[MultiPoly]) -> Vec<Var> {
    let mut vs: Vec<Var> = gens.iter().flat_map(|g| g.vars()).filter(|v| v.group == Group::Z).collect();
    vs.sort();
    vs.dedup();
    vs
}
