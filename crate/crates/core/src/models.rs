//! Real-algebraic CR submanifolds in graph form and holomorphic maps between them.
//!
//! A model in ℂⁿ with CR dimension m is given by d = n − m equations
//! `z_{m+j} = Θ_j(z_1..z_m, w̄_1..w̄_n)`; the complexification is the set of
//! pairs (z, w̄) satisfying them.

use crate::gauss::GaussRational;
use crate::ideal::groebner;
use crate::ideal::TermOrder;
use crate::poly::{Group, MultiPoly, Var};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model {model}: equation {eq} uses {var}, outside z_1..z_m and conjugates")]
    BadVariable { model: String, eq: usize, var: Var },
    #[error("model {0} is not centered at the origin")]
    NotCentered(String),
    #[error("model {0} fails the reality check")]
    NotReal(String),
    #[error("model {model}: crdim {m} is not below ambient dimension {n}")]
    BadDimensions { model: String, n: u16, m: u16 },
    #[error("map component {0} uses variables outside the source coordinates")]
    BadComponent(usize),
    #[error("map has {got} components, target has dimension {want}")]
    ComponentCount { got: usize, want: usize },
    #[error("sampling needs a rigid model (normal conjugates must enter linearly)")]
    NotRigid,
    #[error("no admissible sample found inside the polydisc")]
    NoSample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CRModel {
    pub name: String,
    pub n: u16,
    pub m: u16,
    /// Θ_1..Θ_d in z_1..z_m and w̄_1..w̄_n.
    pub theta: Vec<MultiPoly>,
    pub radius: BigRational,
}

pub type Point = Vec<GaussRational>;

impl CRModel {
    pub fn d(&self) -> u16 {
        self.n - self.m
    }

    pub fn rho(&self, j: usize) -> MultiPoly {
        &MultiPoly::var(Var::z(self.m + 1 + j as u16)) - &self.theta[j]
    }

    pub fn rhos(&self) -> Vec<MultiPoly> {
        (0..self.theta.len()).map(|j| self.rho(j)).collect()
    }

    /// Defining functions in the target variables z', w̄'.
    pub fn target_rhos(&self) -> Vec<MultiPoly> {
        self.rhos().iter().map(to_target).collect()
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.m == 0 || self.m >= self.n {
            return Err(ModelError::BadDimensions { model: self.name.clone(), n: self.n, m: self.m });
        }
        for (j, t) in self.theta.iter().enumerate() {
            for v in t.vars() {
                let ok = match v.group {
                    Group::Z => v.index >= 1 && v.index <= self.m,
                    Group::Wb => v.index >= 1 && v.index <= self.n,
                    _ => false,
                };
                if !ok {
                    return Err(ModelError::BadVariable { model: self.name.clone(), eq: j + 1, var: v });
                }
            }
            if !t.constant_term().is_zero() {
                return Err(ModelError::NotCentered(self.name.clone()));
            }
        }
        if !self.reality_holds() {
            return Err(ModelError::NotReal(self.name.clone()));
        }
        Ok(())
    }

    /// Conjugation maps each ρ_j to ±ρ_k, or at least into the ideal of the ρ's.
    pub fn reality_holds(&self) -> bool {
        let rhos = self.rhos();
        let conj: Vec<MultiPoly> = rhos.iter().map(|r| r.conjugate().expect("paired variables")).collect();
        let exact = conj.iter().all(|c| rhos.iter().any(|r| c == r || *c == -r));
        if exact {
            return true;
        }
        let gb = groebner(&rhos, &TermOrder::Grevlex(vec![]));
        conj.iter().all(|c| gb.contains(c))
    }

    /// Θ̄_j(w̄_cr, z): the normal conjugates on the complexification.
    pub fn anti_theta(&self) -> Vec<MultiPoly> {
        self.theta.iter().map(|t| t.conjugate().expect("paired variables")).collect()
    }

    pub fn is_rigid(&self) -> bool {
        self.theta.iter().enumerate().all(|(j, t)| {
            let phi = t - &MultiPoly::var(Var::wb(self.m + 1 + j as u16));
            !phi.uses(|v| v.group == Group::Wb && v.index > self.m)
        })
    }

    /// Q_w̄ parametrised by t_1..t_m: z_cr = t, z_normal = Θ(t, w̄). `w̄` symbolic when None.
    pub fn segre_parametrize(&self, wbar: Option<&[GaussRational]>) -> Vec<MultiPoly> {
        let mut bind: BTreeMap<Var, MultiPoly> =
            (1..=self.m).map(|k| (Var::z(k), MultiPoly::var(Var::t(k)))).collect();
        if let Some(w) = wbar {
            for k in 1..=self.n {
                bind.insert(Var::wb(k), MultiPoly::constant(w[k as usize - 1].clone()));
            }
        }
        let mut out: Vec<MultiPoly> = (1..=self.m).map(|k| MultiPoly::var(Var::t(k))).collect();
        out.extend(self.theta.iter().map(|t| t.substitute(&bind)));
        out
    }

    /// {w̄ : ρ(z, w̄) = 0} parametrised by t: w̄_cr = t, w̄_normal = Θ̄(t, z).
    pub fn anti_segre(&self) -> BTreeMap<Var, MultiPoly> {
        let tb: BTreeMap<Var, MultiPoly> =
            (1..=self.m).map(|k| (Var::wb(k), MultiPoly::var(Var::t(k)))).collect();
        let mut out = tb.clone();
        for (j, a) in self.anti_theta().iter().enumerate() {
            out.insert(Var::wb(self.m + 1 + j as u16), a.substitute(&tb));
        }
        out
    }

    /// Normal coordinates Θ(z_cr, w̄) at numeric data.
    pub fn normal_at(&self, z_cr: &[GaussRational], wbar: &[GaussRational]) -> Vec<GaussRational> {
        let mut vals = BTreeMap::new();
        for k in 0..self.m as usize {
            vals.insert(Var::z(k as u16 + 1), z_cr[k].clone());
        }
        for k in 0..self.n as usize {
            vals.insert(Var::wb(k as u16 + 1), wbar[k].clone());
        }
        self.theta.iter().map(|t| t.eval(&vals).expect("closed evaluation")).collect()
    }

    /// ρ(z, w̄) at numeric data.
    pub fn rho_at(&self, z: &[GaussRational], wbar: &[GaussRational]) -> Vec<GaussRational> {
        let vals = numeric_bindings(z, wbar);
        self.rhos().iter().map(|r| r.eval(&vals).expect("closed evaluation")).collect()
    }

    pub fn in_polydisc(&self, p: &[GaussRational]) -> bool {
        p.iter().all(|c| c.modulus_lt(&self.radius))
    }
}

pub fn numeric_bindings(z: &[GaussRational], wbar: &[GaussRational]) -> BTreeMap<Var, GaussRational> {
    let mut vals = BTreeMap::new();
    for (k, c) in z.iter().enumerate() {
        vals.insert(Var::z(k as u16 + 1), c.clone());
    }
    for (k, c) in wbar.iter().enumerate() {
        vals.insert(Var::wb(k as u16 + 1), c.clone());
    }
    vals
}

pub fn to_target(p: &MultiPoly) -> MultiPoly {
    p.map_vars(|v| match v.group {
        Group::Z => Var::zp(v.index),
        Group::Wb => Var::wpb(v.index),
        _ => v,
    })
}

pub fn conj_point(p: &[GaussRational]) -> Point {
    p.iter().map(|c| c.conj()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoloMap {
    pub components: Vec<MultiPoly>,
    /// Truncation order per component; None when exact.
    pub truncation: Vec<Option<u32>>,
}

impl HoloMap {
    pub fn exact(components: Vec<MultiPoly>) -> HoloMap {
        let truncation = vec![None; components.len()];
        HoloMap { components, truncation }
    }

    pub fn truncated(components: Vec<MultiPoly>, order: u32) -> HoloMap {
        let truncation = vec![Some(order); components.len()];
        HoloMap { components, truncation }
    }

    /// Accuracy order: results are exact in terms of CR degree up to this value.
    pub fn order(&self) -> Option<u32> {
        self.truncation.iter().flatten().copied().min()
    }

    /// f̄(w̄): the conjugated components in the w̄ variables.
    pub fn conjugate(&self) -> Vec<MultiPoly> {
        self.components.iter().map(|c| c.conjugate().expect("holomorphic components")).collect()
    }

    pub fn eval(&self, z: &[GaussRational]) -> Point {
        let vals = numeric_bindings(z, &[]);
        self.components.iter().map(|c| c.eval(&vals).expect("closed evaluation")).collect()
    }

    /// z'_k ↦ f_k(z)
    pub fn graph_bindings(&self) -> BTreeMap<Var, MultiPoly> {
        self.components.iter().enumerate().map(|(k, c)| (Var::zp(k as u16 + 1), c.clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub source: CRModel,
    pub target: CRModel,
    pub map: HoloMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub equation: usize,
    pub polynomial: MultiPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub source_ok: bool,
    pub target_ok: bool,
    pub maps_into_target: bool,
    pub truncation: Option<u32>,
    pub residuals: Vec<Residual>,
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.source_ok && self.target_ok && self.maps_into_target && self.errors.is_empty()
    }
}

impl Triple {
    pub fn n(&self) -> u16 {
        self.source.n
    }
    pub fn n_target(&self) -> u16 {
        self.target.n
    }
    pub fn m(&self) -> u16 {
        self.source.m
    }

    /// Restriction of a polynomial in (z, w̄) to the complexification by z_normal = Θ(z_cr, w̄).
    pub fn on_complexification(&self, p: &MultiPoly) -> MultiPoly {
        let bind: BTreeMap<Var, MultiPoly> = (0..self.source.d() as usize)
            .map(|j| (Var::z(self.m() + 1 + j as u16), self.source.theta[j].clone()))
            .collect();
        p.substitute(&bind)
    }

    /// Zero up to truncation: terms of CR degree ≤ N in both holomorphic and conjugate slots vanish.
    pub fn vanishes(&self, p: &MultiPoly) -> bool {
        match self.map.order() {
            None => p.is_zero(),
            Some(n) => {
                let m = self.m();
                let hol = move |v: Var| v.group == Group::Z && v.index <= m;
                let anti = move |v: Var| v.group == Group::Wb && v.index <= m;
                p.terms().all(|(mono, _)| mono.degree_where(hol) > n || mono.degree_where(anti) > n)
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        let source_ok = match self.source.check() {
            Ok(()) => true,
            Err(e) => {
                errors.push(e.to_string());
                false
            }
        };
        let target_ok = match self.target.check() {
            Ok(()) => true,
            Err(e) => {
                errors.push(e.to_string());
                false
            }
        };
        if self.map.components.len() != self.target.n as usize {
            errors.push(
                ModelError::ComponentCount { got: self.map.components.len(), want: self.target.n as usize }
                    .to_string(),
            );
        }
        for (k, c) in self.map.components.iter().enumerate() {
            if c.uses(|v| v.group != Group::Z || v.index > self.source.n) {
                errors.push(ModelError::BadComponent(k + 1).to_string());
            }
        }
        let mut residuals = Vec::new();
        if errors.is_empty() {
            let mut bind = self.map.graph_bindings();
            for (k, c) in self.map.conjugate().into_iter().enumerate() {
                bind.insert(Var::wpb(k as u16 + 1), c);
            }
            for (j, r) in self.target.target_rhos().iter().enumerate() {
                let res = self.on_complexification(&r.substitute(&bind));
                if !self.vanishes(&res) {
                    residuals.push(Residual { equation: j + 1, polynomial: res });
                }
            }
        }
        ValidationReport {
            source_ok,
            target_ok,
            maps_into_target: errors.is_empty() && residuals.is_empty(),
            truncation: self.map.order(),
            residuals,
            errors,
        }
    }
}

/// A point (z, w̄, z¹) with (z, w̄) on the complexification and w ∈ Q_{z̄¹}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTuple {
    pub z: Point,
    pub wbar: Point,
    pub z1: Point,
}

impl ChainTuple {
    pub fn diagonal(p: &[GaussRational]) -> ChainTuple {
        ChainTuple { z: p.to_vec(), wbar: conj_point(p), z1: p.to_vec() }
    }

    pub fn origin(n: u16) -> ChainTuple {
        ChainTuple::diagonal(&vec![GaussRational::zero(); n as usize])
    }

    pub fn w(&self) -> Point {
        conj_point(&self.wbar)
    }

    pub fn admissible(&self, m: &CRModel) -> bool {
        m.rho_at(&self.z, &self.wbar).iter().all(|c| c.is_zero())
            && m.rho_at(&self.w(), &conj_point(&self.z1)).iter().all(|c| c.is_zero())
    }
}

fn random_coord(rng: &mut ChaCha8Rng, radius: &BigRational) -> GaussRational {
    loop {
        let a: i64 = rng.gen_range(-3..=3);
        let b: i64 = rng.gen_range(-3..=3);
        if a == 0 && b == 0 {
            continue;
        }
        let r = BigRational::new(1.into(), 8.into()) * radius;
        return GaussRational::new(BigRational::from_integer(a.into()) * &r, BigRational::from_integer(b.into()) * &r);
    }
}

/// Points of M with rational coordinates, drawn inside the polydisc.
pub fn sample_points(m: &CRModel, count: usize, seed: u64) -> Result<Vec<Point>, ModelError> {
    if !m.is_rigid() {
        return Err(ModelError::NotRigid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let two_i = GaussRational::from_ints(0, 2);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * (count + 1) {
            return Err(ModelError::NoSample);
        }
        let z_cr: Vec<GaussRational> = (0..m.m).map(|_| random_coord(&mut rng, &m.radius)).collect();
        let mut wbar: Vec<GaussRational> = z_cr.iter().map(|c| c.conj()).collect();
        wbar.extend((0..m.d()).map(|_| GaussRational::zero()));
        // Θ_j(z_cr, z̄) = z̄_{m+j} + Φ_j(z_cr, z̄_cr) with Φ_j = 2i·Im z_{m+j}
        let phi = m.normal_at(&z_cr, &wbar);
        let mut p = z_cr.clone();
        let mut ok = true;
        for f in phi {
            let y = &f / &two_i;
            if !y.is_real() {
                ok = false;
                break;
            }
            let x = random_coord(&mut rng, &m.radius).re;
            p.push(GaussRational::new(x, y.re));
        }
        if !ok {
            return Err(ModelError::NotReal(m.name.clone()));
        }
        if m.in_polydisc(&p) && m.rho_at(&p, &conj_point(&p)).iter().all(|c| c.is_zero()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Chain tuples with random CR data.
pub fn sample_chain(m: &CRModel, count: usize, seed: u64) -> Result<Vec<ChainTuple>, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c4a1);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * (count + 1) {
            return Err(ModelError::NoSample);
        }
        let z_cr: Vec<GaussRational> = (0..m.m).map(|_| random_coord(&mut rng, &m.radius)).collect();
        let wbar: Vec<GaussRational> = (0..m.n).map(|_| random_coord(&mut rng, &m.radius)).collect();
        let mut z = z_cr.clone();
        z.extend(m.normal_at(&z_cr, &wbar));
        // z̄¹ with ρ(w, z̄¹) = 0: z̄¹_cr free, z̄¹_normal = Θ̄(z̄¹_cr, w)
        let w = conj_point(&wbar);
        let z1b_cr: Vec<GaussRational> = (0..m.m).map(|_| random_coord(&mut rng, &m.radius)).collect();
        let vals = numeric_bindings(&w, &z1b_cr);
        let mut z1b = z1b_cr.clone();
        for a in m.anti_theta() {
            z1b.push(a.eval(&vals).expect("closed evaluation"));
        }
        let t = ChainTuple { z, wbar, z1: conj_point(&z1b) };
        if m.in_polydisc(&t.z) && m.in_polydisc(&t.wbar) && m.in_polydisc(&t.z1) && t.admissible(m) {
            out.push(t);
        }
    }
    Ok(out)
}
