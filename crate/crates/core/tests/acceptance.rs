//! One PASS/FAIL line per acceptance criterion.

mod common;

use common::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segre_core::corpus::{self, Where};
use segre_core::determinacy::{classify, Analysis};
use segre_core::ideal::{factor_split, groebner};
use segre_core::models::{conj_point, numeric_bindings, sample_points, ChainTuple, Triple};
use segre_core::parse::parse_poly;
use segre_core::poly::Group;
use segre_core::reflection::{first_reflection, reflect_set, target_vars, AlgFamily, ReflectionError, Scope};
use segre_core::shrink::{derived_sets, graph_form, minor_filtration, on_graph, Mode, ShrinkError};
use segre_core::{GaussRational, Ideal, MultiPoly, TermOrder, Var};

type Outcome = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn analysis(id: &str) -> Analysis {
    Analysis::new(corpus::triple(id).expect("bundled"), Mode::Prop16).expect("analysis")
}

/// The named corpus checks of an entry must pass.
fn corpus_checks(id: &str, names: &[&str]) -> Outcome {
    let r = corpus::verify(id).ok_or("missing entry")?;
    if let Some(e) = &r.error {
        return Err(format!("{}: {}", id, e));
    }
    for n in names {
        let c = r.checks.iter().find(|c| c.name == *n).ok_or_else(|| format!("{}: no check '{}'", id, n))?;
        ensure(c.passed, || format!("{} {}: expected {}, computed {}", id, n, c.expected, c.computed))?;
    }
    Ok(())
}

fn same_gens(got: &[MultiPoly], want: &[&str], n: u16) -> bool {
    let want: Vec<MultiPoly> = want.iter().map(|s| parse_poly(s).unwrap()).collect();
    Ideal::new(got.to_vec(), target_vars(n)).same_as(&Ideal::new(want, target_vars(n)))
}

fn dims(a: &Analysis, at: Where, scope: Scope) -> Result<Vec<segre_core::determinacy::DimRecord>, String> {
    let tuples = corpus::tuples(&a.triple, at).map_err(|e| e.to_string())?;
    tuples.iter().map(|t| a.dims_at(t, scope).map_err(|e| e.to_string())).collect()
}

fn x_dims(a: &Analysis, at: Where, scope: Scope) -> Result<Vec<i64>, String> {
    Ok(dims(a, at, scope)?.iter().map(|d| d.x.map(|x| x.dim).unwrap_or(-2)).collect())
}

fn criterion_1() -> Outcome {
    corpus_checks("ex11", &["first reflection", "singular-locus shrink", "dim Z'", "dim X'", "r(V'_w) = f(Q_w)"])?;
    let a = analysis("ex11");
    ensure(same_gens(&a.first.gens, &["zp5 - z2", "zp1 - z1", "zp3*zp4"], 5), || "first reflection".into())
}

fn criterion_2() -> Outcome {
    corpus_checks("ex12", &["dim W'", "dim Z'", "dim X'"])?;
    let (a11, a12) = (analysis("ex11"), analysis("ex12"));
    for (d11, d12) in dims(&a11, Where::Samples, Scope::Localized)?.iter().zip(dims(&a12, Where::Samples, Scope::Localized)?) {
        let (z11, x11) = (d11.z.unwrap().dim, d11.x.unwrap().dim);
        let (z12, x12) = (d12.z.unwrap().dim, d12.x.unwrap().dim);
        ensure(z11 > x11, || format!("Example 11 needs dim Z' > dim X', got {} and {}", z11, x11))?;
        ensure(x12 > z12, || format!("Example 12 needs dim X' > dim Z', got {} and {}", x12, z12))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let a = analysis("ex13");
    let order = a.triple.map.order().unwrap_or(u32::MAX);
    ensure(order >= 5, || format!("truncation order {}", order))?;
    let at0 = x_dims(&a, Where::Origin, Scope::Localized)?;
    ensure(at0 == vec![0], || format!("ex13 dim X' at 0: {:?}", at0))?;
    let tuples = corpus::tuples(&a.triple, Where::Samples).map_err(|e| e.to_string())?;
    let mut distinct: Vec<&ChainTuple> = Vec::new();
    for t in &tuples {
        if !t.z.iter().all(|c| c == &GaussRational::from(0)) && !distinct.contains(&t) {
            distinct.push(t);
        }
    }
    ensure(distinct.len() >= 4, || format!("only {} distinct nonzero samples", distinct.len()))?;
    let off = x_dims(&a, Where::Samples, Scope::Localized)?;
    ensure(off.iter().all(|&d| d == 1), || format!("ex13 dim X' off 0: {:?}", off))?;

    let b = analysis("ex13-id");
    let at0 = x_dims(&b, Where::Origin, Scope::Localized)?;
    ensure(at0 == vec![1], || format!("ex13-id dim X' at 0: {:?}", at0))?;
    let tuples = corpus::tuples(&b.triple, Where::Samples).map_err(|e| e.to_string())?;
    ensure(tuples.iter().all(|t| t.z[0] != GaussRational::from(0)), || "sample on z1 = 0".into())?;
    let off = x_dims(&b, Where::Samples, Scope::Localized)?;
    ensure(off.iter().all(|&d| d == 0), || format!("ex13-id dim X' off z1 = 0: {:?}", off))
}

/// Points of 𝕏′ at a tuple under the given scope.
fn x_points(a: &Analysis, t: &ChainTuple, scope: Scope) -> Result<usize, String> {
    let n = a.triple.n_target();
    let at = |gens: &[MultiPoly], p: &[GaussRational]| -> Vec<MultiPoly> {
        let vals = numeric_bindings(p, &[]);
        gens.iter().map(|g| g.specialize(&vals)).filter(|g| !g.is_zero()).collect()
    };
    let mut gens = at(&a.first.gens, &t.z);
    let fam = AlgFamily::from_ideal(&Ideal::new(at(&a.first.gens, &t.w()), target_vars(n)));
    let r = reflect_set(&a.triple.target, &fam, scope).map_err(|e| e.to_string())?;
    gens.extend(r.gens);
    let dec = factor_split(&Ideal::new(gens, target_vars(n)));
    ensure(dec.branches.iter().all(|b| b.dimension == 0), || "positive-dimensional branch".into())?;
    Ok(dec.branches.len())
}

fn criterion_4() -> Outcome {
    let a = analysis("ex15");
    let local = x_dims(&a, Where::Samples, Scope::Localized)?;
    ensure(local.iter().all(|&d| d == 1), || format!("localized dims {:?}", local))?;
    let global = x_dims(&a, Where::Samples, Scope::Global)?;
    ensure(global.iter().all(|&d| d == 0), || format!("global dims {:?}", global))?;
    for t in corpus::tuples(&a.triple, Where::Samples).map_err(|e| e.to_string())? {
        let k = x_points(&a, &t, Scope::Global)?;
        ensure(k == 2, || format!("global intersection has {} points", k))?;
    }
    let lo = classify(&a, 4, 1, &[Scope::Localized]).map_err(|e| e.to_string())?;
    let gl = classify(&a, 4, 1, &[Scope::Global]).map_err(|e| e.to_string())?;
    ensure(!lo.fired("Theorem 1''"), || "Theorem 1'' fired under localized scope".into())?;
    ensure(gl.fired("Theorem 1''"), || "Theorem 1'' did not fire under global scope".into())
}

fn criterion_5() -> Outcome {
    let a = analysis("ex14");
    ensure(same_gens(&a.first.gens, &["zp4 - z3", "zp1 - z1", "zp2 - z2", "zp3*(zp2^2 - zp1*zp3)"], 4), || {
        format!("first reflection {:?}", a.first.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>())
    })?;
    // with z3' = f3(z) = 0 on the graph, z2^2 = z1*z3' cuts out z2 = 0
    let mut all = corpus::tuples(&a.triple, Where::Samples).map_err(|e| e.to_string())?;
    let bad = corpus::degenerate_tuples(&a.triple).map_err(|e| e.to_string())?;
    ensure(!bad.is_empty(), || "no degenerate samples".into())?;
    all.extend(bad);
    for t in &all {
        let fz = a.triple.map.eval(&t.z);
        let on_bad = (&fz[1] * &fz[1] - &fz[0] * &fz[2]).is_zero() && t.z[1].is_zero();
        let res = graph_form(&a.triple, &a.shrunk, t);
        let failed = matches!(res, Err(ShrinkError::NotGraphRepresentable { .. }));
        ensure(failed == on_bad, || format!("graph_form at z = {:?}: {:?}", t.z.iter().map(|c| c.to_string()).collect::<Vec<_>>(), res.as_ref().err()))?;
        if let Ok(g) = res {
            ensure(g.solved.len() == a.shrunk.rank, || "solved block has the wrong size".into())?;
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let a = analysis("ex8");
    ensure(same_gens(&a.first.gens, &["zp4 - z2", "zp1 - z1", "zp3"], 4), || "pinned first reflection".into())?;
    let d = dims(&a, Where::Samples, Scope::Localized)?;
    let v: Vec<i64> = d.iter().map(|r| r.v.dim).collect();
    ensure(v.iter().all(|&x| x >= 1), || format!("dim V' {:?}", v))?;
    let x: Vec<i64> = d.iter().map(|r| r.x.map(|x| x.dim).unwrap_or(-2)).collect();
    ensure(x.iter().all(|&x| x == 0), || format!("dim X' = 0 required at every sample, computed {:?}", x))
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &[Var], terms: usize, deg: u32) -> MultiPoly {
    let mut p = MultiPoly::zero();
    for _ in 0..terms {
        let mut m = MultiPoly::constant(GaussRational::from_ints(rng.gen_range(-3..=3), rng.gen_range(-2..=2)));
        for _ in 0..rng.gen_range(0..=deg) {
            m = m * MultiPoly::var(vars[rng.gen_range(0..vars.len())]);
        }
        p += &m;
    }
    p
}

/// r(E) in target coordinates, with z′ as the only unknowns.
fn r(t: &Triple, fam: &AlgFamily) -> Result<Vec<MultiPoly>, ReflectionError> {
    Ok(reflect_set(&t.target, fam, Scope::Global)?.gens)
}

fn lemma_axioms(t: &Triple, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Outcome {
    let target = &t.target;
    let n = target.n;
    let zp = target_vars(n);
    let on_m = sample_points(target, 2, rng.gen()).map_err(|e| e.to_string())?;
    let mut centres = on_m.clone();
    centres.push(random_point(rng, n));
    for w in &centres {
        let wbar = conj_point(w);
        let e = segre_family(target, &wbar);
        let graph = e.decomposition.branches[0].graph.clone().unwrap();
        let re = r(t, &e).map_err(|e| e.to_string())?;
        // E ∩ r(E) ⊂ M′
        let mut meet = re.clone();
        meet.extend(e.decomposition.branches[0].ideal.gens.iter().cloned());
        for b in factor_split(&Ideal::new(meet, zp.clone())).branches {
            let Some(g) = b.graph else {
                tally.skipped += 1;
                continue;
            };
            let mut bind = g.bindings();
            for (v, p) in g.solved.iter() {
                bind.insert(v.partner().unwrap(), p.conjugate().map_err(|e| e.to_string())?);
            }
            for v in &g.free {
                bind.entry(v.partner().unwrap()).or_insert_with(|| MultiPoly::var(v.partner().unwrap()));
            }
            for rho in target.target_rhos() {
                ensure(rho.substitute(&bind).is_zero(), || format!("E ∩ r(E) leaves M' at w = {:?}", w))?;
            }
            tally.checked += 1;
        }
        // E ⊂ r(r(E))
        match r(t, &AlgFamily::from_ideal(&Ideal::new(re.clone(), zp.clone()))) {
            Ok(rre) => {
                let bind = graph.bindings();
                ensure(rre.iter().all(|g| g.substitute(&bind).is_zero()), || "E not inside r(r(E))".into())?;
                tally.checked += 1;
            }
            Err(ReflectionError::NotGraph(_)) => tally.skipped += 1,
        }
        // antitonicity: a point of E and E itself
        let mut e_pt: Vec<GaussRational> = random_point(rng, target.m);
        let vals = numeric_bindings(&e_pt, &wbar);
        for th in &target.theta {
            e_pt.push(th.eval(&vals).unwrap());
        }
        let small = r(t, &points_family(&[e_pt.clone()], n)).map_err(|e| e.to_string())?;
        for g in &small {
            ensure(in_radical(&re, &zp, g), || "r(E) not inside r({e}) for e in E".into())?;
        }
        let pair = r(t, &points_family(&[e_pt.clone(), w.clone()], n)).map_err(|e| e.to_string())?;
        for g in &small {
            ensure(in_radical(&pair, &zp, g), || "r({e, w}) not inside r({e})".into())?;
        }
        tally.checked += 2;
    }
    // z ∈ Q_w̄ ⇔ w ∈ Q_z̄ on both models
    for m in [&t.source, &t.target] {
        for _ in 0..3 {
            let w = random_point(rng, m.n);
            let wbar = conj_point(&w);
            let mut z = random_point(rng, m.m);
            z.extend(m.normal_at(&z.clone(), &wbar));
            ensure(m.rho_at(&z, &wbar).iter().all(|c| c.is_zero()), || "constructed point off Q_w".into())?;
            ensure(m.rho_at(&w, &conj_point(&z)).iter().all(|c| c.is_zero()), || "z in Q_w but w not in Q_z".into())?;
            let u = random_point(rng, m.n);
            let a = m.rho_at(&u, &wbar).iter().all(|c| c.is_zero());
            let b = m.rho_at(&w, &conj_point(&u)).iter().all(|c| c.is_zero());
            ensure(a == b, || "Segre symmetry fails on a random pair".into())?;
            tally.checked += 2;
        }
    }
    Ok(())
}

#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
}

fn pipeline_properties(a: &Analysis, tally: &mut Tally) -> Outcome {
    let t = &a.triple;
    let mut tuples = corpus::tuples(t, Where::Origin).map_err(|e| e.to_string())?;
    tuples.extend(corpus::tuples(t, Where::Samples).map_err(|e| e.to_string())?.into_iter().step_by(3));
    for scope in [Scope::Localized, Scope::Global] {
        for tu in &tuples {
            let d = a.dims_at(tu, scope).map_err(|e| e.to_string())?;
            ensure(d.monotone(), || format!("{} dims not monotone: {:?}", scope.name(), d))?;
            ensure(d.identity_holds == Some(true), || format!("{} M' != X' + Z' at a sample", scope.name()))?;
            tally.checked += 2;
        }
        match derived_sets(t, &a.first, &a.shrunk, scope) {
            Ok(ds) => {
                ensure(ds.identity_holds, || "generic M' != X' + Z'".into())?;
                tally.checked += 1;
            }
            Err(ShrinkError::Reflection(ReflectionError::NotGraph(_))) => tally.skipped += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    for gens in [&a.first.gens, &a.shrunk.system.gens] {
        gb_properties(gens, tally)?;
    }
    Ok(())
}

fn gb_properties(gens: &[MultiPoly], tally: &mut Tally) -> Outcome {
    for order in [TermOrder::Grevlex(vec![]), TermOrder::Lex(vec![])] {
        let a = groebner(gens, &order);
        let b = groebner(gens, &order);
        let mut rev = gens.to_vec();
        rev.reverse();
        let c = groebner(&rev, &order);
        ensure(a.basis == b.basis && a.basis == c.basis, || "Gröbner basis depends on input order".into())?;
        ensure(s_closed(gens, &order), || "S-polynomial does not reduce to zero".into())?;
        ensure(gens.iter().all(|g| a.contains(g)), || "generator outside its own ideal".into())?;
        tally.checked += 3;
    }
    Ok(())
}

fn algebra_properties(rng: &mut ChaCha8Rng, tally: &mut Tally) -> Outcome {
    let zs: Vec<Var> = (1..=3).map(Var::z).chain((1..=3).map(Var::wb)).collect();
    for _ in 0..40 {
        let p = random_poly(rng, &zs, 4, 3);
        let q = random_poly(rng, &zs, 3, 2);
        let (cp, cq) = (p.conjugate().unwrap(), q.conjugate().unwrap());
        ensure(cp.conjugate().unwrap() == p, || "conjugation is not an involution".into())?;
        ensure((&p * &q).conjugate().unwrap() == &cp * &cq, || "conjugation is not multiplicative".into())?;
        ensure((&p + &q).conjugate().unwrap() == &cp + &cq, || "conjugation is not additive".into())?;
        ensure(cp.vars().iter().all(|v| v.group == Group::Z || v.group == Group::Wb), || "conjugation left the variable pairs".into())?;
        tally.checked += 4;
    }
    for k in 0..40 {
        let nvars = 2 + k % 5;
        let vars: Vec<Var> = (1..=nvars as u16).map(Var::zp).collect();
        let count = rng.gen_range(1..=3);
        let gens: Vec<MultiPoly> = (0..count).map(|_| random_poly(rng, &vars, 3, 2)).filter(|g| !g.is_zero()).collect();
        let ideal = Ideal::new(gens.clone(), vars.clone());
        let (got, want) = (ideal.dimension(), elimination_dimension(&ideal));
        ensure(got == want, || format!("staircase dim {} vs elimination dim {} for {:?}", got, want, gens.iter().map(|g| g.to_string()).collect::<Vec<_>>()))?;
        gb_properties(&gens, tally)?;
        tally.checked += 1;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tally = Tally::default();
    let mut triples: Vec<(String, Triple)> =
        corpus::IDS.iter().map(|id| (id.to_string(), corpus::triple(id).unwrap())).collect();
    triples.extend((0..50).map(|s| (format!("random model {}", s), random_triple(s))));
    for (name, t) in &triples {
        let a = Analysis::new(t.clone(), Mode::Prop16).map_err(|e| format!("{}: {}", name, e))?;
        lemma_axioms(t, &mut rng, &mut tally).map_err(|e| format!("{}: {}", name, e))?;
        pipeline_properties(&a, &mut tally).map_err(|e| format!("{}: {}", name, e))?;
        // the coordinate embedding lies in its own first reflection
        ensure(a.first.gens.iter().all(|g| on_graph(t, g)), || format!("{}: graph outside the first reflection", name))?;
    }
    algebra_properties(&mut rng, &mut tally)?;
    println!("  criterion 7: {} checks, {} branches without graph form skipped", tally.checked, tally.skipped);
    Ok(())
}

fn criterion_8() -> Outcome {
    for id in corpus::IDS {
        let a = analysis(id);
        let tr = &a.shrunk.trace;
        ensure(tr.strictly_increasing(), || format!("{}: generator counts {:?}", id, tr.stages.iter().map(|s| s.generators).collect::<Vec<_>>()))?;
        ensure(tr.stages[..tr.terminal_stage].iter().all(|s| s.graph_contained), || format!("{}: graph escapes a stage", id))?;
        ensure(a.shrunk.system.gens.iter().all(|g| on_graph(&a.triple, g)), || format!("{}: graph outside the terminal stage", id))?;
        ensure(tr.witness_minor.is_some(), || format!("{}: no witness minor", id))?;
    }
    let want: [(&str, &[&str], u16); 2] =
        [("ex11", &["zp5 - z2", "zp1 - z1", "zp3", "zp4"], 5), ("ex12", &["zp4 - z2", "zp1 - z1", "zp2", "zp3"], 4)];
    for (id, gens, n) in want {
        let t = corpus::triple(id).unwrap();
        let first = first_reflection(&t);
        for mode in [Mode::Prop16, Mode::SingularLocus] {
            let w = minor_filtration(&t, &first, mode).map_err(|e| e.to_string())?;
            ensure(same_gens(&w.system.gens, gens, n), || format!("{} {}: terminal stage {:?}", id, mode.name(), w.system.gens.iter().map(|g| g.to_string()).collect::<Vec<_>>()))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Example 11 reflections, shrink and dimensions", criterion_1),
        ("Example 12 dimensions reverse Example 11", criterion_2),
        ("Example 13 semicontinuity failures", criterion_3),
        ("Example 15 localized versus global scope", criterion_4),
        ("Example 14 first reflection and bad set", criterion_5),
        ("Example 8 dimensions", criterion_6),
        ("property suites over corpus and random models", criterion_7),
        ("minor filtration traces", criterion_8),
    ];
    let results: Vec<(usize, &str, Outcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .enumerate()
            .map(|(k, (name, f))| (k + 1, *name, s.spawn(f)))
            .collect();
        handles
            .into_iter()
            .map(|(k, name, h)| (k, name, h.join().unwrap_or_else(|_| Err("panicked".into()))))
            .collect()
    });
    let mut failed = 0;
    for (k, name, r) in &results {
        match r {
            Ok(()) => println!("PASS {}: {}", k, name),
            Err(e) => {
                failed += 1;
                println!("FAIL {}: {}: {}", k, name, e);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
