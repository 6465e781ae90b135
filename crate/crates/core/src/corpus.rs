//! Bundled example triples with their expected outcomes.

use crate::determinacy::{classify, Analysis, DeterminacyError};
use crate::dsl::{parse_document, Document};
use crate::ideal::Ideal;
use crate::models::{sample_chain, sample_points, ChainTuple, Triple};
use crate::parse::parse_poly;
use crate::poly::MultiPoly;
use crate::reflection::{local_radical, reflect_set, target_vars, AlgFamily, Scope};
use crate::shrink::{graph_form, minor_filtration, Mode, ShrinkError};
use crate::GaussRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

const SAMPLES: usize = 4;
const SEED: u64 = 1;

pub const IDS: [&str; 8] = ["ex8", "ex11", "ex12", "ex13", "ex13-id", "ex14", "ex15", "trivial-id"];

pub fn source(id: &str) -> Option<&'static str> {
    Some(match id {
        "ex8" => include_str!("../corpus/ex8.crm"),
        "ex11" => include_str!("../corpus/ex11.crm"),
        "ex12" => include_str!("../corpus/ex12.crm"),
        "ex13" => include_str!("../corpus/ex13.crm"),
        "ex13-id" => include_str!("../corpus/ex13-id.crm"),
        "ex14" => include_str!("../corpus/ex14.crm"),
        "ex15" => include_str!("../corpus/ex15.crm"),
        "trivial-id" => include_str!("../corpus/trivial-id.crm"),
        _ => return None,
    })
}

pub fn document(id: &str) -> Option<Document> {
    source(id).map(|s| parse_document(s).expect("bundled corpus parses"))
}

pub fn triple(id: &str) -> Option<Triple> {
    document(id).map(|d| d.triple(None).expect("bundled corpus builds"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Stated together with the example.
    Stated,
    /// Pinned from an independent computation or a first run.
    Derived,
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetName {
    V,
    W,
    Z,
    X,
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Where {
    Origin,
    /// Diagonal and chain samples.
    Samples,
}

#[derive(Clone, Debug)]
pub enum Check {
    FirstReflection(Vec<&'static str>),
    Shrunk(Mode, Vec<&'static str>),
    Dim { set: SetName, at: Where, scope: Scope, dim: i64 },
    DimAtLeast { set: SetName, at: Where, dim: i64 },
    ImmersionRank { at: Where, rank: usize },
    /// Reflection of 𝒱′_w over generic w equals the given set; generators compared after local radicals.
    ReflectionOfFirst(Vec<&'static str>),
    /// graph_form fails exactly where the predicate holds on the tuple's z.
    BadSet(fn(&[GaussRational]) -> bool),
    Verdict { scopes: Vec<Scope>, theorem: &'static str, fires: bool },
    FiltrationWellFormed,
}

#[derive(Clone, Debug)]
pub struct Expectation {
    pub name: &'static str,
    pub provenance: Provenance,
    pub note: &'static str,
    pub check: Check,
}

fn e(name: &'static str, provenance: Provenance, note: &'static str, check: Check) -> Expectation {
    Expectation { name, provenance, note, check }
}

use Check::*;
use Provenance::*;
use Scope::{Global, Localized};
use SetName as S;

pub fn expectations(id: &str) -> Vec<Expectation> {
    let mut out = vec![e("filtration trace is well formed", Trivial, "noetherian termination", FiltrationWellFormed)];
    let more = match id {
        "ex11" => vec![
            e("first reflection", Stated, "two coordinate planes meeting along the graph", FirstReflection(vec!["zp5 - z2", "zp1 - z1", "zp3*zp4"])),
            e("singular-locus shrink", Stated, "adds zp3 and zp4", Shrunk(Mode::SingularLocus, vec!["zp5 - z2", "zp1 - z1", "zp3", "zp4"])),
            e("filtration shrink", Stated, "terminal stage equals the singular locus", Shrunk(Mode::Prop16, vec!["zp5 - z2", "zp1 - z1", "zp3", "zp4"])),
            e("dim V'", Stated, "union of 2-planes", Dim { set: S::V, at: Where::Samples, scope: Localized, dim: 2 }),
            e("dim W'", Stated, "zp2-line", Dim { set: S::W, at: Where::Samples, scope: Localized, dim: 1 }),
            e("dim Z'", Stated, "one-parameter family; the numeral is missing where stated", Dim { set: S::Z, at: Where::Samples, scope: Localized, dim: 1 }),
            e("dim X'", Stated, "X' = {f(z)}", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim M'", Derived, "M' inside X'", Dim { set: S::M, at: Where::Samples, scope: Localized, dim: 0 }),
            e("r(V'_w) = f(Q_w)", Stated, "reflection of the first stage is the Segre image", ReflectionOfFirst(vec!["zp2", "zp3", "zp4", "zp5 - w2b - i*zp1*w1b"])),
            e("immersion rank", Derived, "Jacobian of the radicals at the origin", ImmersionRank { at: Where::Origin, rank: 5 }),
            e("Theorem 1 fires", Stated, "C^3 holds", Verdict { scopes: vec![Localized, Global], theorem: "Theorem 1", fires: true }),
            e("Zaitsev inconclusive", Stated, "C^2 fails", Verdict { scopes: vec![Localized, Global], theorem: "Zaitsev", fires: false }),
        ],
        "ex12" => vec![
            e("first reflection", Stated, "", FirstReflection(vec!["zp4 - z2", "zp1 - z1", "zp2*zp3"])),
            e("shrink", Stated, "a single point", Shrunk(Mode::Prop16, vec!["zp4 - z2", "zp1 - z1", "zp2", "zp3"])),
            e("dim W'", Stated, "", Dim { set: S::W, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim Z'", Stated, "", Dim { set: S::Z, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim X'", Stated, "X' = V'", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 1 }),
            e("dim V'", Stated, "", Dim { set: S::V, at: Where::Samples, scope: Localized, dim: 1 }),
            e("immersion rank", Derived, "rank 2 after radicals; not an immersion", ImmersionRank { at: Where::Origin, rank: 2 }),
            e("Zaitsev fires", Stated, "C^2 holds", Verdict { scopes: vec![Localized, Global], theorem: "Zaitsev", fires: true }),
            e("Theorem 1 inconclusive", Stated, "C^1 and C^3 fail", Verdict { scopes: vec![Localized, Global], theorem: "Theorem 1", fires: false }),
        ],
        "ex13" => vec![
            e("first reflection", Derived, "truncated map, order 8", FirstReflection(vec!["zp4 - z2", "zp1 - z1", "zp2*zp3", "z2*zp3", "z1*zp3"])),
            e("dim X' at 0", Stated, "", Dim { set: S::X, at: Where::Origin, scope: Localized, dim: 0 }),
            e("dim X' off 0", Stated, "upper semicontinuity fails", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 1 }),
            e("dim M' at 0", Stated, "", Dim { set: S::M, at: Where::Origin, scope: Localized, dim: 0 }),
            e("dim M' off 0", Stated, "", Dim { set: S::M, at: Where::Samples, scope: Localized, dim: 1 }),
        ],
        "ex13-id" => vec![
            e("first reflection", Derived, "", FirstReflection(vec!["zp3 - z3", "zp1 - z1", "zp1*zp2 - z1*z2"])),
            e("dim X' at 0", Stated, "", Dim { set: S::X, at: Where::Origin, scope: Localized, dim: 1 }),
            e("dim X' off z1 = 0", Stated, "lower semicontinuity fails", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 0 }),
        ],
        "ex14" => vec![
            e("first reflection", Stated, "the last generator read in target coordinates", FirstReflection(vec!["zp4 - z3", "zp1 - z1", "zp2 - z2", "zp3*(zp2^2 - zp1*zp3)"])),
            e("bad set", Stated, "graph form fails exactly where z2^2 = z1*zp3 on the graph, i.e. z2 = 0", BadSet(|z| z[1].is_zero())),
        ],
        "ex15" => vec![
            e("first reflection", Stated, "", FirstReflection(vec!["zp4 - z2", "zp1 - z1", "(1 + zp3)*zp3"])),
            e("localized dim X'", Stated, "", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 1 }),
            e("localized dim X' at 0", Stated, "", Dim { set: S::X, at: Where::Origin, scope: Localized, dim: 1 }),
            e("global dim X'", Stated, "two points", Dim { set: S::X, at: Where::Samples, scope: Global, dim: 0 }),
            e("global dim X' at 0", Stated, "", Dim { set: S::X, at: Where::Origin, scope: Global, dim: 0 }),
            e("Theorem 1'' fires globally", Stated, "", Verdict { scopes: vec![Localized, Global], theorem: "Theorem 1''", fires: true }),
            e("Theorem 1'' needs global scope", Stated, "", Verdict { scopes: vec![Localized], theorem: "Theorem 1''", fires: false }),
            e("Theorem 1 inconclusive", Stated, "", Verdict { scopes: vec![Localized, Global], theorem: "Theorem 1", fires: false }),
        ],
        "ex8" => vec![
            e("first reflection", Derived, "pinned from first run", FirstReflection(vec!["zp4 - z2", "zp1 - z1", "zp3"])),
            e("dim V' positive", Stated, "", DimAtLeast { set: S::V, at: Where::Samples, dim: 1 }),
            e("dim V'", Derived, "pinned from first run", Dim { set: S::V, at: Where::Samples, scope: Localized, dim: 1 }),
            e("dim X'", Derived, "pinned from first run; the reflection of V'_w leaves zp2 free", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 1 }),
        ],
        "trivial-id" => vec![
            e("first reflection", Trivial, "V' = {f(z)}", FirstReflection(vec!["zp1 - z1", "zp2 - z2"])),
            e("dim V'", Trivial, "", Dim { set: S::V, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim Z'", Trivial, "", Dim { set: S::Z, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim X'", Trivial, "", Dim { set: S::X, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim M'", Trivial, "", Dim { set: S::M, at: Where::Samples, scope: Localized, dim: 0 }),
            e("dim at 0", Trivial, "", Dim { set: S::X, at: Where::Origin, scope: Global, dim: 0 }),
        ],
        _ => vec![],
    };
    out.extend(more);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub provenance: Provenance,
    pub note: String,
    pub passed: bool,
    pub expected: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryResult {
    pub id: String,
    pub checks: Vec<CheckResult>,
    pub error: Option<String>,
}

impl EntryResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

fn polys(gens: &[&str]) -> Vec<MultiPoly> {
    gens.iter().map(|s| parse_poly(s).expect("expectation parses")).collect()
}

fn show(gens: &[MultiPoly]) -> String {
    let v: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Origin first, then diagonal samples, then chain samples.
pub fn tuples(t: &Triple, at: Where) -> Result<Vec<ChainTuple>, DeterminacyError> {
    Ok(match at {
        Where::Origin => vec![ChainTuple::origin(t.n())],
        Where::Samples => {
            let mut v: Vec<ChainTuple> =
                sample_points(&t.source, SAMPLES, SEED)?.iter().map(|p| ChainTuple::diagonal(p)).collect();
            v.extend(sample_chain(&t.source, SAMPLES, SEED)?);
            v
        }
    })
}

fn pick(d: &crate::determinacy::DimRecord, s: SetName) -> Option<i64> {
    match s {
        S::V => Some(d.v.dim),
        S::W => Some(d.w.dim),
        S::Z => d.z.map(|x| x.dim),
        S::X => d.x.map(|x| x.dim),
        S::M => d.m.map(|x| x.dim),
    }
}

fn run_check(a: &Analysis, check: &Check) -> Result<(bool, String, String), DeterminacyError> {
    let t = &a.triple;
    let nt = t.n_target();
    let same = |got: &[MultiPoly], want: &[&str]| {
        Ideal::new(got.to_vec(), target_vars(nt)).same_as(&Ideal::new(polys(want), target_vars(nt)))
    };
    Ok(match check {
        FirstReflection(want) => (same(&a.first.gens, want), show(&polys(want)), show(&a.first.gens)),
        Shrunk(mode, want) => {
            let w = minor_filtration(t, &a.first, *mode)?;
            (same(&w.system.gens, want), show(&polys(want)), show(&w.system.gens))
        }
        Dim { set, at, scope, dim } => {
            let mut got = Vec::new();
            for tu in tuples(t, *at)? {
                got.push(pick(&a.dims_at(&tu, *scope)?, *set).unwrap_or(-2));
            }
            (got.iter().all(|g| g == dim), format!("{} at every tuple", dim), format!("{:?}", got))
        }
        DimAtLeast { set, at, dim } => {
            let mut got = Vec::new();
            for tu in tuples(t, *at)? {
                got.push(pick(&a.dims_at(&tu, Localized)?, *set).unwrap_or(-2));
            }
            (got.iter().all(|g| g >= dim), format!(">= {} at every tuple", dim), format!("{:?}", got))
        }
        ImmersionRank { at, rank } => {
            let mut got = Vec::new();
            for tu in tuples(t, *at)? {
                got.push(a.dims_at(&tu, Localized)?.immersion_rank);
            }
            (got.iter().all(|g| *g == Some(*rank)), format!("{}", rank), format!("{:?}", got))
        }
        ReflectionOfFirst(want) => {
            let fam = AlgFamily::from_ideal(&a.first.ideal(nt));
            let r = reflect_set(&t.target, &fam, Localized)?;
            let rad: Vec<MultiPoly> = r.gens.iter().map(local_radical).collect();
            (same(&rad, want), show(&polys(want)), show(&r.gens))
        }
        BadSet(bad) => {
            let mut tus = tuples(t, Where::Origin)?;
            tus.extend(tuples(t, Where::Samples)?);
            tus.extend(degenerate_tuples(t)?);
            let mut agree = true;
            let mut log = Vec::new();
            for tu in &tus {
                let failed = matches!(graph_form(t, &a.shrunk, tu), Err(ShrinkError::NotGraphRepresentable { .. }));
                agree &= failed == bad(&tu.z);
                log.push(if failed { 'N' } else { 'G' });
            }
            let want: String = tus.iter().map(|tu| if bad(&tu.z) { 'N' } else { 'G' }).collect();
            (agree, want, log.into_iter().collect())
        }
        Verdict { scopes, theorem, fires } => {
            let r = classify(a, SAMPLES, SEED, scopes)?;
            let got = r.fired(theorem);
            (got == *fires, format!("fires = {}", fires), format!("fires = {}", got))
        }
        FiltrationWellFormed => {
            let tr = &a.shrunk.trace;
            let ok = tr.strictly_increasing()
                && tr.witness_minor.is_some()
                && tr.stages[..tr.terminal_stage].iter().all(|s| s.graph_contained);
            let counts: Vec<usize> = tr.stages.iter().map(|s| s.generators).collect();
            (ok, "increasing counts, contained stages, witness".into(), format!("counts {:?}, witness {:?}", counts, tr.witness_minor.as_ref().map(|m| m.to_string())))
        }
    })
}

/// Diagonal points of M with z2 = 0, built from the regular samples.
pub fn degenerate_tuples(t: &Triple) -> Result<Vec<ChainTuple>, DeterminacyError> {
    let m = &t.source;
    if m.m < 2 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for p in sample_points(m, SAMPLES, SEED + 1)? {
        let mut z_cr = p[..m.m as usize].to_vec();
        z_cr[1] = GaussRational::zero();
        let wbar: Vec<GaussRational> = z_cr.iter().map(|c| c.conj()).chain((0..m.d()).map(|_| GaussRational::zero())).collect();
        let phi = m.normal_at(&z_cr, &wbar);
        let mut q = z_cr.clone();
        for (k, f) in phi.iter().enumerate() {
            let y = f / &GaussRational::from_ints(0, 2);
            q.push(GaussRational::new(p[m.m as usize + k].re.clone(), y.re));
        }
        let tu = ChainTuple::diagonal(&q);
        if tu.admissible(m) {
            out.push(tu);
        }
    }
    Ok(out)
}

pub fn verify(id: &str) -> Option<EntryResult> {
    let t = triple(id)?;
    let analysis = match Analysis::new(t, Mode::Prop16) {
        Ok(a) => a,
        Err(err) => return Some(EntryResult { id: id.into(), checks: Vec::new(), error: Some(err.to_string()) }),
    };
    let checks = expectations(id)
        .into_iter()
        .map(|x| {
            let (passed, expected, computed) = run_check(&analysis, &x.check)
                .unwrap_or_else(|err| (false, "no error".into(), err.to_string()));
            CheckResult { name: x.name.into(), provenance: x.provenance, note: x.note.into(), passed, expected, computed }
        })
        .collect();
    Some(EntryResult { id: id.into(), checks, error: None })
}

/// Entries run on separate threads; results come back in `IDS` order.
pub fn verify_all() -> Vec<EntryResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = IDS.iter().map(|id| s.spawn(move || verify(id))).collect();
        handles.into_iter().filter_map(|h| h.join().expect("corpus entry panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_round_trips() {
        for id in IDS {
            let d = document(id).unwrap();
            let once = d.emit();
            let twice = parse_document(&once).unwrap().emit();
            assert_eq!(once, twice, "{}", id);
            assert!(d.triple(None).unwrap().validate().passed(), "{}", id);
        }
    }

    #[test]
    fn every_entry_has_expectations() {
        for id in IDS {
            assert!(expectations(id).len() > 1, "{}", id);
        }
    }
}
