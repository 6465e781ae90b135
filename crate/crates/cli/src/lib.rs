//! Command dispatch and report rendering for the `segre` binary.

use clap::{Parser, Subcommand, ValueEnum};
use segre_core::corpus;
use segre_core::determinacy::{algebraic_dependence, classify, Analysis, DeterminacyError, Route, DEFAULT_SAMPLES};
use segre_core::dsl::{default_truncation, parse_document_with, Document};
use segre_core::ideal::Decomposition;
use segre_core::models::{conj_point, ChainTuple, Triple};
use segre_core::parse::parse_constant;
use segre_core::reflection::{first_reflection, AlgFamily, ReflectionSystem, Scope};
use segre_core::shrink::{derived_sets, minor_filtration, Mode};
use segre_core::GaussRational;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "segre", version, about = "Reflection and determinacy computations for CR maps")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Repeat for more log output on stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Order used by bare `trunc;` lines; overrides SEGRE_TRUNC_ORDER.
    #[arg(long, global = true)]
    pub trunc: Option<u32>,
    /// Map to use when a file declares several.
    #[arg(long, global = true)]
    pub map: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Local,
    Global,
    Both,
}

impl ScopeArg {
    fn scopes(self) -> Vec<Scope> {
        match self {
            ScopeArg::Local => vec![Scope::Localized],
            ScopeArg::Global => vec![Scope::Global],
            ScopeArg::Both => vec![Scope::Localized, Scope::Global],
        }
    }

    fn single(self) -> Scope {
        match self {
            ScopeArg::Global => Scope::Global,
            _ => Scope::Localized,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Prop16,
    Sing,
}

impl ModeArg {
    fn mode(self) -> Mode {
        match self {
            ModeArg::Prop16 => Mode::Prop16,
            ModeArg::Sing => Mode::SingularLocus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    X,
    Z,
    M,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check reality of both models and that f maps into the target.
    Validate { file: String },
    /// Parametrise the Segre variety of a point.
    Segre {
        file: String,
        #[arg(long)]
        at: String,
    },
    /// First reflection system and its branches.
    Reflect1 { file: String },
    /// Second reflection and the derived sets over generic (z, w̄).
    Reflect2 {
        file: String,
        #[arg(long, value_enum, default_value_t = ScopeArg::Local)]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Prop16)]
        mode: ModeArg,
    },
    /// Shrink the first reflection system.
    Shrink {
        file: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Prop16)]
        mode: ModeArg,
    },
    /// Local dimensions at a point of M or a chain tuple.
    Dims {
        file: String,
        /// `p` for the diagonal tuple, or `z; w̄; z1`.
        #[arg(long)]
        at: String,
        #[arg(long, value_enum, default_value_t = ScopeArg::Local)]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Prop16)]
        mode: ModeArg,
    },
    /// Evaluate the determinacy conditions at samples and report verdicts.
    Classify {
        file: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ScopeArg::Both)]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Prop16)]
        mode: ModeArg,
    },
    /// Annihilating polynomials of the components of f on a Segre variety.
    Depend {
        file: String,
        /// The conjugate point w̄.
        #[arg(long)]
        fix: String,
        #[arg(long, value_enum, default_value_t = RouteArg::X)]
        route: RouteArg,
        #[arg(long, value_enum, default_value_t = ScopeArg::Local)]
        scope: ScopeArg,
    },
    /// Run a bundled example against its expectations.
    VerifyExample { id: String },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    pub text: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => render_json(&self.report),
            Format::Text => self.text.clone(),
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Failure {
        Failure { code: EXIT_INVALID, message: message.to_string() }
    }
    fn usage(message: impl ToString) -> Failure {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<DeterminacyError> for Failure {
    fn from(e: DeterminacyError) -> Failure {
        Failure::invalid(e)
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serialises")
}

struct Ctx {
    trunc: u32,
    map: Option<String>,
}

impl Ctx {
    fn document(&self, file: &str) -> Result<Document, Failure> {
        let src = std::fs::read_to_string(file).map_err(|e| Failure::invalid(format!("{}: {}", file, e)))?;
        parse_document_with(&src, self.trunc).map_err(|e| Failure::invalid(format!("{}: {}", file, e)))
    }

    fn triple(&self, file: &str) -> Result<Triple, Failure> {
        self.document(file)?.triple(self.map.as_deref()).map_err(Failure::invalid)
    }

    fn analysis(&self, file: &str, mode: ModeArg) -> Result<Analysis, Failure> {
        Ok(Analysis::new(self.triple(file)?, mode.mode())?)
    }
}

fn parse_point(s: &str, n: u16) -> Result<Vec<GaussRational>, Failure> {
    let s = s.trim();
    if s == "origin" || s == "0" {
        return Ok(vec![GaussRational::from(0); n as usize]);
    }
    let pts = s
        .split(',')
        .map(|c| parse_constant(c.trim()).map_err(|e| Failure::usage(format!("bad coordinate '{}': {}", c.trim(), e))))
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() != n as usize {
        return Err(Failure::usage(format!("expected {} coordinates, got {}", n, pts.len())));
    }
    Ok(pts)
}

fn parse_tuple(s: &str, n: u16) -> Result<ChainTuple, Failure> {
    let groups: Vec<&str> = s.split(';').collect();
    match groups.as_slice() {
        [p] => Ok(ChainTuple::diagonal(&parse_point(p, n)?)),
        [z, w, z1] => Ok(ChainTuple { z: parse_point(z, n)?, wbar: parse_point(w, n)?, z1: parse_point(z1, n)? }),
        _ => Err(Failure::usage("a tuple is one point or three ';'-separated points z; w̄; z1")),
    }
}

fn strings(gens: &[segre_core::MultiPoly]) -> Value {
    Value::Array(gens.iter().map(|g| Value::String(g.to_string())).collect())
}

fn system_value(s: &ReflectionSystem) -> Value {
    json!({
        "generators": strings(&s.gens),
        "provenance": s.provenance,
        "scope": s.scope.map(|x| x.name()),
        "truncation": s.truncation,
    })
}

fn decomposition_value(d: &Decomposition) -> Value {
    let branches: Vec<Value> = d
        .branches
        .iter()
        .map(|b| {
            json!({
                "generators": strings(&b.ideal.gens),
                "dimension": b.dimension,
                "possibly_reducible": b.possibly_reducible,
                "graph": b.graph.as_ref().map(|g| json!({
                    "solved": g.solved.iter().map(|(v, p)| (v.to_string(), Value::String(p.to_string()))).collect::<serde_json::Map<_, _>>(),
                    "free": g.free.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                })),
            })
        })
        .collect();
    json!({ "branches": branches, "truncated": d.truncated })
}

/// Parse arguments and run; never panics on bad input.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let report = json!({ "schema_version": SCHEMA_VERSION, "status": code, "error": text });
            return Outcome { code, report, text };
        }
    };
    run_cli(&cli, &argv[1.min(argv.len())..])
}

pub fn run_cli(cli: &Cli, echo: &[String]) -> Outcome {
    let ctx = Ctx { trunc: cli.trunc.unwrap_or_else(default_truncation), map: cli.map.clone() };
    let mut seed = Value::Null;
    let result = dispatch(&ctx, &cli.command, &mut seed);
    let (code, payload, text, error, truncation) = match result {
        Ok((code, payload, text, truncation)) => (code, payload, text, Value::Null, truncation),
        Err(f) => (f.code, Value::Null, format!("error: {}\n", f.message), Value::String(f.message), None),
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": echo,
        "seed": seed,
        "truncation": truncation,
        "status": code,
        "payload": payload,
        "error": error,
    });
    Outcome { code, report, text }
}

type Done = (i32, Value, String, Option<u32>);

fn dispatch(ctx: &Ctx, cmd: &Command, seed: &mut Value) -> Result<Done, Failure> {
    match cmd {
        Command::Validate { file } => {
            let t = ctx.triple(file)?;
            let r = t.validate();
            let code = if r.passed() { EXIT_OK } else { EXIT_INVALID };
            let mut text = format!("{}\n", if r.passed() { "valid" } else { "INVALID" });
            for e in &r.errors {
                text.push_str(&format!("  {}\n", e));
            }
            for res in &r.residuals {
                text.push_str(&format!("  equation {} leaves {}\n", res.equation, res.polynomial));
            }
            Ok((code, to_value(&r), text, t.map.order()))
        }
        Command::Segre { file, at } => {
            let t = ctx.triple(file)?;
            let p = parse_point(at, t.n())?;
            let par = t.source.segre_parametrize(Some(&conj_point(&p)));
            let text: String = par.iter().enumerate().map(|(k, c)| format!("z{} = {}\n", k + 1, c)).collect();
            let at: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            Ok((EXIT_OK, json!({ "point": at, "parametrization": strings(&par) }), text, t.map.order()))
        }
        Command::Reflect1 { file } => {
            let t = ctx.triple(file)?;
            let s = first_reflection(&t);
            let fam = AlgFamily::from_ideal(&s.ideal(t.n_target()));
            let mut text = String::new();
            for g in &s.gens {
                text.push_str(&format!("{} = 0\n", g));
            }
            text.push_str(&format!("{} branch(es)\n", fam.decomposition.branches.len()));
            let v = json!({ "system": system_value(&s), "decomposition": decomposition_value(&fam.decomposition) });
            Ok((EXIT_OK, v, text, t.map.order()))
        }
        Command::Reflect2 { file, scope, mode } => {
            let a = ctx.analysis(file, *mode)?;
            let d = derived_sets(&a.triple, &a.first, &a.shrunk, scope.single())
                .map_err(Failure::invalid)?;
            let mut text = String::new();
            for (name, s) in [("X'", &d.x_prime), ("Z'", &d.z_prime), ("M'", &d.m_prime)] {
                text.push_str(&format!("{}:\n", name));
                for g in &s.gens {
                    text.push_str(&format!("  {} = 0\n", g));
                }
            }
            text.push_str(&format!("M' = X' + Z': {}\n", d.identity_holds));
            let v = json!({
                "scope": scope.single().name(),
                "x_prime": system_value(&d.x_prime),
                "z_prime": system_value(&d.z_prime),
                "m_prime": system_value(&d.m_prime),
                "identity_holds": d.identity_holds,
            });
            Ok((EXIT_OK, v, text, a.triple.map.order()))
        }
        Command::Shrink { file, mode } => {
            let t = ctx.triple(file)?;
            let first = first_reflection(&t);
            let w = minor_filtration(&t, &first, mode.mode()).map_err(Failure::invalid)?;
            let mut text = String::new();
            for (k, st) in w.trace.stages.iter().enumerate() {
                text.push_str(&format!(
                    "stage {}: {} generators, {} minors of order {}, contained {}\n",
                    k,
                    st.generators,
                    st.added.len(),
                    st.minor_order,
                    st.graph_contained
                ));
            }
            for g in &w.system.gens {
                text.push_str(&format!("  {} = 0\n", g));
            }
            let v = json!({
                "mode": w.mode.name(),
                "generators": strings(&w.system.gens),
                "rank": w.rank,
                "trace": to_value(&w.trace),
            });
            Ok((EXIT_OK, v, text, t.map.order()))
        }
        Command::Dims { file, at, scope, mode } => {
            let a = ctx.analysis(file, *mode)?;
            let tuple = parse_tuple(at, a.triple.n())?;
            let mut records = Vec::new();
            let mut text = String::new();
            for sc in scope.scopes() {
                let d = a.dims_at(&tuple, sc)?;
                let show = |x: Option<segre_core::ideal::LocalDim>| x.map(|x| x.dim.to_string()).unwrap_or("?".into());
                text.push_str(&format!(
                    "{}: V' {} W' {} Z' {} X' {} M' {} rank {}\n",
                    sc.name(),
                    d.v.dim,
                    d.w.dim,
                    show(d.z),
                    show(d.x),
                    show(d.m),
                    d.immersion_rank.map(|r| r.to_string()).unwrap_or("?".into())
                ));
                records.push(json!({ "scope": sc.name(), "dims": to_value(&d) }));
            }
            Ok((EXIT_OK, json!({ "tuple": to_value(&tuple), "records": records }), text, a.triple.map.order()))
        }
        Command::Classify { file, samples, seed: s, scope, mode } => {
            *seed = json!(s);
            let a = ctx.analysis(file, *mode)?;
            let r = classify(&a, *samples, *s, &scope.scopes())?;
            let mut text = String::new();
            for c in &r.conditions {
                text.push_str(&format!("{:<24} {:?} ({}/{})\n", c.id.label(), c.status, c.zero_samples, c.tested));
            }
            for v in &r.verdicts {
                let what = if v.algebraic { "f is algebraic" } else { "inconclusive" };
                text.push_str(&format!("{}: {} ({})\n", v.theorem, what, v.note));
            }
            for c in &r.caveats {
                text.push_str(&format!("caveat: {}\n", c));
            }
            Ok((EXIT_OK, to_value(&r), text, a.triple.map.order()))
        }
        Command::Depend { file, fix, route, scope } => {
            let a = ctx.analysis(file, ModeArg::Prop16)?;
            let w = parse_point(fix, a.triple.n())?;
            let route = match route {
                RouteArg::X => Route::X,
                RouteArg::Z => Route::Z,
                RouteArg::M => Route::M,
            };
            let deps = algebraic_dependence(&a, &w, scope.single(), route)?;
            let text: String = deps
                .iter()
                .map(|d| format!("P{} = {} (degree {}, verified {})\n", d.coordinate, d.polynomial, d.degree, d.verified))
                .collect();
            let fixed: Vec<String> = w.iter().map(|c| c.to_string()).collect();
            let v = json!({ "route": route.name(), "scope": scope.single().name(), "fixed": fixed, "relations": to_value(&deps) });
            Ok((EXIT_OK, v, text, a.triple.map.order()))
        }
        Command::VerifyExample { id } => {
            let results = if id == "all" {
                corpus::verify_all()
            } else {
                vec![corpus::verify(id).ok_or_else(|| {
                    Failure::usage(format!("unknown example '{}'; known: {}", id, corpus::IDS.join(", ")))
                })?]
            };
            let ok = results.iter().all(|r| r.passed());
            let mut text = String::new();
            for r in &results {
                let passed: Vec<&str> = r.checks.iter().filter(|c| c.passed).map(|c| c.name.as_str()).collect();
                text.push_str(&format!("{} {}: {}\n", if r.passed() { "PASS" } else { "FAIL" }, r.id, passed.join("; ")));
                if let Some(e) = &r.error {
                    text.push_str(&format!("  error: {}\n", e));
                }
                for c in r.checks.iter().filter(|c| !c.passed) {
                    text.push_str(&format!("  mismatch {}: expected {}, computed {}\n", c.name, c.expected, c.computed));
                }
            }
            let code = if ok { EXIT_OK } else { EXIT_MISMATCH };
            Ok((code, json!({ "entries": to_value(&results), "passed": ok }), text, None))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_parse() {
        let t = parse_tuple("origin", 2).ok().unwrap();
        assert_eq!(t, ChainTuple::origin(2));
        let t = parse_tuple("1/8, i/128; 1/8, -i/128; 1/8, i/128", 2).ok().unwrap();
        assert_eq!(t.z, t.z1);
        assert!(parse_tuple("1, 2; 3, 4", 2).is_err());
        assert!(parse_point("1, 2, 3", 2).is_err());
    }

    #[test]
    fn errors_carry_the_envelope() {
        let out = run(["segre", "validate", "/no/such/file.crm"]);
        assert_eq!(out.code, EXIT_INVALID);
        assert_eq!(out.report["schema_version"], SCHEMA_VERSION);
        assert_eq!(out.report["status"], EXIT_INVALID);
        assert!(out.report["payload"].is_null());
    }
}
