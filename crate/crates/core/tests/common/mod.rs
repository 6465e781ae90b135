#![allow(dead_code)]

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segre_core::dsl::parse_document;
use segre_core::ideal::{groebner, Branch, Decomposition, GraphForm};
use segre_core::models::{CRModel, Triple};
use segre_core::poly::combinations;
use segre_core::reflection::AlgFamily;
use segre_core::{GaussRational, Ideal, Monomial, MultiPoly, TermOrder, Var};
use std::collections::BTreeMap;

fn small(rng: &mut ChaCha8Rng) -> i64 {
    rng.gen_range(-3..=3)
}

/// `c*x + conj(c)*conj(x)` written out, for a monomial text `x` and its conjugate `xb`.
fn hermitian(c: (i64, i64, i64), x: &str, xb: &str) -> String {
    let (a, b, d) = c;
    format!("({a}/{d} + ({b}/{d})*i)*{x} + ({a}/{d} + ({nb}/{d})*i)*{xb}", nb = -b)
}

fn triple_coeff(rng: &mut ChaCha8Rng) -> (i64, i64, i64) {
    (small(rng), small(rng), rng.gen_range(1..=4))
}

/// A rigid hypersurface pair M ⊂ ℂ², M′ ⊂ ℂ³ with M′ ∩ {z2′ = 0} = M, and the
/// coordinate embedding (z1, z2) ↦ (z1, 0, z2).
pub fn random_model_source(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(1..=3);
    let c = triple_coeff(&mut rng);
    let base = format!(
        "{a}*z1*conj(z1) + {}",
        hermitian(c, "z1^2*conj(z1)", "z1*conj(z1)^2")
    );
    let b = rng.gen_range(0..=2);
    let d = triple_coeff(&mut rng);
    let e = triple_coeff(&mut rng);
    let extra = format!(
        "{b}*z2*conj(z2) + {} + {}",
        hermitian(d, "z1*conj(z2)", "conj(z1)*z2"),
        hermitian(e, "z2^2*conj(z1)", "conj(z2)^2*z1")
    );
    format!(
        "model M {{ ambient 2; crdim 1; eq z2 = conj(z2) + i*({base}); radius 1; }}\n\
         model Mp {{ ambient 3; crdim 2; eq z3 = conj(z3) + i*({base} + {extra}); radius 1; }}\n\
         map f : M -> Mp {{ z1; 0; z2; }}\n"
    )
}

pub fn random_triple(seed: u64) -> Triple {
    let src = random_model_source(seed);
    parse_document(&src).unwrap_or_else(|e| panic!("{}\n{}", src, e)).triple(None).unwrap()
}

/// A family consisting of finitely many points.
pub fn points_family(points: &[Vec<GaussRational>], n: u16) -> AlgFamily {
    let branches = points
        .iter()
        .map(|p| {
            let solved: Vec<(Var, MultiPoly)> =
                p.iter().enumerate().map(|(k, c)| (Var::zp(k as u16 + 1), MultiPoly::constant(c.clone()))).collect();
            let gens = solved.iter().map(|(v, c)| &MultiPoly::var(*v) - c).collect();
            Branch {
                ideal: Ideal::new(gens, (1..=n).map(Var::zp).collect()),
                dimension: 0,
                graph: Some(GraphForm { solved, free: vec![] }),
                possibly_reducible: false,
            }
        })
        .collect();
    AlgFamily { decomposition: Decomposition { branches, truncated: false } }
}

/// Q′_{w̄} in target coordinates as a graph over z′_cr.
pub fn segre_family(target: &CRModel, wbar: &[GaussRational]) -> AlgFamily {
    let vals: BTreeMap<Var, GaussRational> =
        wbar.iter().enumerate().map(|(k, c)| (Var::wpb(k as u16 + 1), c.clone())).collect();
    let solved: Vec<(Var, MultiPoly)> = target
        .target_rhos()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let v = Var::zp(target.m + 1 + j as u16);
            (v, &MultiPoly::var(v) - &r.specialize(&vals))
        })
        .collect();
    let free: Vec<Var> = (1..=target.m).map(Var::zp).collect();
    AlgFamily::from_graph(GraphForm { solved, free }, (1..=target.n).map(Var::zp).collect())
}

pub fn random_point(rng: &mut ChaCha8Rng, n: u16) -> Vec<GaussRational> {
    (0..n).map(|_| GaussRational::new(q(small(rng), 4), q(small(rng), 4))).collect()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// p ∈ √I by the Rabinowitsch trick.
pub fn in_radical(gens: &[MultiPoly], active: &[Var], p: &MultiPoly) -> bool {
    let y = Var::t(99);
    let mut g = gens.to_vec();
    g.push(&MultiPoly::one() - &(MultiPoly::var(y) * p.clone()));
    let mut act = active.to_vec();
    act.push(y);
    Ideal::new(g, act).is_generically_empty()
}

/// Dimension as the largest variable subset meeting the ideal trivially.
pub fn elimination_dimension(ideal: &Ideal) -> i64 {
    if ideal.is_generically_empty() {
        return -1;
    }
    let n = ideal.active.len();
    for k in (0..=n).rev() {
        for keep in combinations(n, k) {
            let drop: Vec<Var> =
                (0..n).filter(|i| !keep.contains(i)).map(|i| ideal.active[i]).collect();
            let el = ideal.eliminate(&drop);
            if el.gens.iter().all(|g| g.is_zero()) {
                return k as i64;
            }
        }
    }
    0
}

fn monomial_lcm(a: &Monomial, b: &Monomial) -> Monomial {
    let mut e: BTreeMap<Var, u32> = a.pairs().iter().copied().collect();
    for &(v, x) in b.pairs() {
        let slot = e.entry(v).or_insert(0);
        *slot = (*slot).max(x);
    }
    Monomial::from_pairs(e.into_iter().collect())
}

fn monomial_div(a: &Monomial, b: &Monomial) -> Monomial {
    Monomial::from_pairs(a.pairs().iter().map(|&(v, e)| (v, e - b.exponent(v))).collect())
}

/// Every S-polynomial of the basis reduces to zero.
pub fn s_closed(gens: &[MultiPoly], order: &TermOrder) -> bool {
    let gb = groebner(gens, order);
    let lms = gb.leading_monomials();
    for i in 0..gb.basis.len() {
        for j in i + 1..gb.basis.len() {
            let (f, g) = (&gb.basis[i], &gb.basis[j]);
            let l = monomial_lcm(&lms[i], &lms[j]);
            let cf = f.coeff(&lms[i]).inv().unwrap();
            let cg = g.coeff(&lms[j]).inv().unwrap();
            let s = &f.mul_monomial(&monomial_div(&l, &lms[i]), &cf) - &g.mul_monomial(&monomial_div(&l, &lms[j]), &cg);
            if !gb.normal_form(&s).is_zero() {
                return false;
            }
        }
    }
    true
}
