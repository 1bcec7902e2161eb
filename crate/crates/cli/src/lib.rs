//! The `compers` command line. Every command prints one JSON report on
//! stdout; artifacts (modules, complexes, encodings) are embedded in the
//! report and also written to `--out` when given.
//!
//! Exit codes: 0 success, 2 the input was rejected on mathematical grounds,
//! 3 unreadable or malformed input, 4 a search budget ran out or the verdict
//! is unknown.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use compers_core::analysis::{
    decompose, end_report, enumerate_component_modules, verify_idempotent_decomposition,
    AnalysisError, AnalysisOptions, EnumerationOptions, Verdict, ENUMERATION_BUDGET,
};
use compers_core::component::{
    classify, component_split, extend_module, is_interval, ComponentError, ComponentKind,
};
use compers_core::encoding::{build_encoding, validate_encoding, EncodingError};
use compers_core::homology::{h0, realize, HomologyError};
use compers_core::io::{self, IoError};
use compers_core::linalg::Field;
use compers_core::pmodule::{ModuleError, PersistenceModule};
use compers_core::poset::Poset;

pub const ISO_BUDGET_VAR: &str = "COMPERS_ISO_BUDGET";
pub const ENUM_BUDGET_VAR: &str = "COMPERS_ENUM_BUDGET";
pub const DEFAULT_ISO_BUDGET: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "compers", version, about = "Exact tools for component persistence modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Field override: Q, GF:p or GF(p).
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (a directory for `split`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Compact canonical JSON.
    Json,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a module and report its component structure.
    Check { module: PathBuf },
    /// Zero-dimensional homology of a filtered complex.
    H0 { complex: PathBuf },
    /// Filtered graph whose H0 is the given component module.
    Realize { module: PathBuf },
    /// Split a component module with a minimal generator into an interval
    /// and a semi-component module.
    Split { module: PathBuf },
    /// Component extension of a semi-component module.
    Extend {
        module: PathBuf,
        /// Element receiving the new generator; defaults to the bottom.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Decompose into summands via idempotents of the endomorphism algebra.
    Decompose { module: PathBuf },
    /// Endomorphism algebra summary and indecomposability verdict.
    Endo { module: PathBuf },
    /// Check a natural idempotent and split along it.
    Idempotent { module: PathBuf, transformation: PathBuf },
    /// Grid encoding of a module over a bounded poset.
    Encode { module: PathBuf },
    /// Pre-grading of a poset (or of a module's poset).
    Pregrade { input: PathBuf },
    /// Count component modules with a given dimension vector.
    Enumerate {
        poset: PathBuf,
        /// Dimensions in element order, e.g. `1,2`, or `a=1,b=2`.
        #[arg(long)]
        dims: String,
        #[arg(long, value_enum, default_value_t = KindArg::Component)]
        kind: KindArg,
        /// Merge classes that are isomorphic as modules.
        #[arg(long)]
        refine: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Component,
    Semi,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error("bad argument: {0}")]
    Argument(String),
    #[error("{message}")]
    Rejected { message: String, witness: Option<Value> },
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(e) => match e {
                IoError::Module(_) | IoError::Component(_) | IoError::Homology(_) => 2,
                _ => 3,
            },
            CliError::Argument(_) => 3,
            CliError::Rejected { .. } => 2,
            CliError::Budget(_) => 4,
        }
    }
}

fn rejected(e: impl std::fmt::Display) -> CliError {
    CliError::Rejected {
        message: e.to_string(),
        witness: None,
    }
}

fn module_error(e: ModuleError) -> CliError {
    let witness = match &e {
        ModuleError::NonCommutingSquare {
            lower,
            upper,
            path_a,
            path_b,
        } => Some(json!({
            "lower": lower,
            "upper": upper,
            "path_a": path_a,
            "path_b": path_b,
        })),
        _ => None,
    };
    CliError::Rejected {
        message: e.to_string(),
        witness,
    }
}

impl From<ComponentError> for CliError {
    fn from(e: ComponentError) -> Self {
        rejected(e)
    }
}

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        rejected(e)
    }
}

impl From<EncodingError> for CliError {
    fn from(e: EncodingError) -> Self {
        rejected(e)
    }
}

impl From<ModuleError> for CliError {
    fn from(e: ModuleError) -> Self {
        module_error(e)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => rejected(other),
        }
    }
}

/// Budgets in effect, read from the environment.
#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub iso: usize,
    pub enumeration: u64,
}

impl Budgets {
    pub fn from_env() -> Result<Self, CliError> {
        fn var<T: std::str::FromStr>(name: &str, default: T) -> Result<T, CliError> {
            match std::env::var(name) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Argument(format!("{name}={v} is not a non-negative integer"))),
                Err(_) => Ok(default),
            }
        }
        Ok(Budgets {
            iso: var(ISO_BUDGET_VAR, DEFAULT_ISO_BUDGET)?,
            enumeration: var(ENUM_BUDGET_VAR, ENUMERATION_BUDGET)?,
        })
    }
}

/// What a command produced: the report and its exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => io::canonical(&self.report),
            Format::Pretty => io::pretty(&self.report),
        }
    }
}

struct Ctx {
    field: Option<Field>,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
    budgets: Budgets,
}

impl Ctx {
    fn analysis(&self) -> AnalysisOptions {
        AnalysisOptions {
            seed: self.seed,
            random_budget: self.budgets.iso,
            ..AnalysisOptions::default()
        }
    }

    fn render(&self, v: &Value) -> String {
        match self.format {
            Format::Json => io::canonical(v),
            Format::Pretty => io::pretty(v),
        }
    }

    fn write_artifact(&self, v: &Value) -> Result<(), CliError> {
        if let Some(path) = &self.out {
            io::write_text(path, &self.render(v))?;
        }
        Ok(())
    }

    fn module(&self, path: &Path) -> Result<Arc<PersistenceModule>, CliError> {
        let m = io::read_module(path, self.field)?;
        if let Err(e) = m.validate() {
            return Err(module_error(e));
        }
        Ok(Arc::new(m))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome {
            code: if e.use_stderr() { 3 } else { 0 },
            report: json!({ "status": "usage", "message": e.to_string() }),
        },
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let name = command_name(&cli.command);
    let budgets = Budgets::from_env();
    let recorded = *budgets.as_ref().unwrap_or(&Budgets {
        iso: DEFAULT_ISO_BUDGET,
        enumeration: ENUMERATION_BUDGET,
    });
    let result = budgets.and_then(|budgets| {
        let field = cli
            .field
            .as_deref()
            .map(|f| f.parse::<Field>().map_err(|e| CliError::Argument(e.to_string())))
            .transpose()?;
        let ctx = Ctx {
            field,
            seed: cli.seed,
            out: cli.out.clone(),
            format: cli.format,
            budgets,
        };
        dispatch(&ctx, &cli.command)
    });
    let mut report = Map::new();
    report.insert("command".into(), json!(name));
    report.insert("seed".into(), json!(cli.seed));
    report.insert(
        "budgets".into(),
        json!({ "idempotent_search": recorded.iso, "enumeration": recorded.enumeration }),
    );
    let code = match result {
        Ok((code, body)) => {
            report.insert("status".into(), json!(if code == 0 { "ok" } else { "incomplete" }));
            if let Value::Object(o) = body {
                report.extend(o);
            }
            code
        }
        Err(e) => {
            let code = e.exit_code();
            let status = match code {
                2 => "rejected",
                4 => "budget_exceeded",
                _ => "input_error",
            };
            report.insert("status".into(), json!(status));
            report.insert("error".into(), json!(e.to_string()));
            if let CliError::Rejected {
                witness: Some(w), ..
            } = &e
            {
                report.insert("witness".into(), w.clone());
            }
            code
        }
    };
    Outcome {
        code,
        report: Value::Object(report),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::H0 { .. } => "h0",
        Command::Realize { .. } => "realize",
        Command::Split { .. } => "split",
        Command::Extend { .. } => "extend",
        Command::Decompose { .. } => "decompose",
        Command::Endo { .. } => "endo",
        Command::Idempotent { .. } => "idempotent",
        Command::Encode { .. } => "encode",
        Command::Pregrade { .. } => "pregrade",
        Command::Enumerate { .. } => "enumerate",
    }
}

fn kind_name(k: ComponentKind) -> &'static str {
    match k {
        ComponentKind::Component => "Component",
        ComponentKind::SemiComponent => "SemiComponent",
    }
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> Result<(i32, Value), CliError> {
    match cmd {
        Command::Check { module } => check(ctx, module),
        Command::H0 { complex } => {
            let x = io::complex_from_json(&io::read_json(complex)?, complex.parent())?;
            let cs = h0(&x, ctx.field.unwrap_or(Field::Rationals))?;
            let out = io::structure_to_json(&cs);
            ctx.write_artifact(&out)?;
            Ok((0, json!({ "module": out })))
        }
        Command::Realize { module } => {
            let cs = classify(&ctx.module(module)?)?;
            let out = io::complex_to_json(&realize(&cs)?);
            ctx.write_artifact(&out)?;
            Ok((0, json!({ "complex": out })))
        }
        Command::Split { module } => split(ctx, module),
        Command::Extend { module, basepoint } => {
            let m = ctx.module(module)?;
            let base = basepoint
                .as_deref()
                .map(|b| m.poset().index_of(b).map_err(rejected))
                .transpose()?;
            let ext = extend_module(&m, base)?;
            let out = io::module_to_json(&ext);
            ctx.write_artifact(&out)?;
            Ok((0, json!({ "module": out })))
        }
        Command::Decompose { module } => {
            let m = ctx.module(module)?;
            let d = decompose(&m, ctx.analysis())?;
            let summands: Vec<Value> = d.summands.iter().map(|s| io::module_to_json(s)).collect();
            let witness_iso = d.witness.as_ref().is_none_or(|w| w.is_isomorphism());
            let body = json!({
                "summands": summands,
                "dimension_vectors": d.summands.iter().map(|s| s.dims().to_vec()).collect::<Vec<_>>(),
                "certified": d.certified,
                "complete": d.complete,
                "sum_isomorphic_to_input": witness_iso,
            });
            ctx.write_artifact(&body)?;
            Ok((if d.complete { 0 } else { 4 }, body))
        }
        Command::Endo { module } => {
            let m = ctx.module(module)?;
            let r = end_report(&m, ctx.analysis())?;
            let idem = match &r.verdict {
                Verdict::Decomposes(e) => io::transformation_to_json(e),
                _ => Value::Null,
            };
            let code = if matches!(r.verdict, Verdict::Unknown) { 4 } else { 0 };
            Ok((
                code,
                json!({
                    "end_dim": r.dim,
                    "radical_dim": r.radical_dim,
                    "verdict": r.verdict.name(),
                    "idempotent": idem,
                    "note": r.note,
                }),
            ))
        }
        Command::Idempotent {
            module,
            transformation,
        } => idempotent(ctx, module, transformation),
        Command::Encode { module } => encode(ctx, module),
        Command::Pregrade { input } => {
            let v = io::read_json(input)?;
            let p = match v.get("poset") {
                Some(_) => io::module_from_json(&v, input.parent(), None)?.poset().clone(),
                None => io::poset_from_json(&v)?,
            };
            let g = p.pre_grading();
            let grades: Map<String, Value> = (0..p.len()).map(|e| (p.id(e).to_string(), json!(g.grade(e)))).collect();
            Ok((
                0,
                json!({ "grades": grades, "height": p.height(), "valid": g.is_valid_for(&p) }),
            ))
        }
        Command::Enumerate {
            poset,
            dims,
            kind,
            refine,
        } => enumerate(ctx, poset, dims, *kind, *refine),
    }
}

fn check(ctx: &Ctx, path: &Path) -> Result<(i32, Value), CliError> {
    let m = ctx.module(path)?;
    let mut body = json!({
        "valid": true,
        "field": m.field().to_string(),
        "dims": dims_json(&m),
    });
    match classify(&m) {
        Ok(cs) => {
            let p = m.poset();
            let gens: Vec<Value> = cs.generators().iter().map(|&(e, k)| json!([p.id(e), k])).collect();
            body["kind"] = json!(kind_name(cs.kind()));
            body["generators"] = Value::Array(gens);
            body["minimal_generator"] = match cs.minimal_generator() {
                Some((e, k)) => json!([p.id(e), k]),
                None => Value::Null,
            };
            body["interval"] = json!(is_interval(&m));
            body["splittable"] = json!(cs.kind() == ComponentKind::Component
                && cs.generators().len() >= 2
                && cs.minimal_generator().is_some());
        }
        Err(e) => {
            body["kind"] = Value::Null;
            body["classification"] = json!(e.to_string());
        }
    }
    Ok((0, body))
}

fn dims_json(m: &PersistenceModule) -> Value {
    let p = m.poset();
    Value::Object((0..p.len()).map(|e| (p.id(e).to_string(), json!(m.dim(e)))).collect())
}

fn split(ctx: &Ctx, path: &Path) -> Result<(i32, Value), CliError> {
    let m = ctx.module(path)?;
    let cs = classify(&m)?;
    let s = component_split(&cs)?;
    let interval = io::module_to_json(&s.interval.module);
    let semi = io::module_to_json(&s.semi.module);
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("module");
    let files = [
        (dir.join(format!("{stem}_interval.json")), &interval),
        (dir.join(format!("{stem}_semi.json")), &semi),
    ];
    for (f, v) in &files {
        io::write_text(f, &ctx.render(v))?;
    }
    let witness = s.sum_witness()?;
    let p = m.poset();
    let (g, k) = s.minimal_generator;
    Ok((
        0,
        json!({
            "interval": interval,
            "semi": semi,
            "idempotent": io::transformation_to_json(&s.idempotent),
            "minimal_generator": [p.id(g), k],
            "sum_isomorphic_to_input": witness.is_isomorphism(),
            "files": files.iter().map(|(f, _)| f.display().to_string()).collect::<Vec<_>>(),
        }),
    ))
}

fn idempotent(ctx: &Ctx, module: &Path, transformation: &Path) -> Result<(i32, Value), CliError> {
    let m = ctx.module(module)?;
    let v = io::read_json(transformation)?;
    let f = io::transformation_from_json(&v, &m, &m)?;
    let p = m.poset();
    let bases = |key: &str, cols: Box<dyn Fn(usize) -> usize + '_>| -> Result<Option<Vec<_>>, CliError> {
        match v.get(key) {
            None => Ok(None),
            Some(x) => {
                // column counts come from the listed matrices themselves
                let shape = |e: usize| (m.dim(e), cols(e));
                Ok(Some(io::matrices_from_json(x, p, m.field(), shape)?))
            }
        }
    };
    let ranks: Vec<usize> = (0..p.len()).map(|e| f.component(e).rank()).collect();
    let kernel = bases("kernel", Box::new(|e| m.dim(e) - ranks[e]))?;
    let image = bases("image", Box::new(|e| ranks[e]))?;
    let r = verify_idempotent_decomposition(&m, &f, kernel.as_deref(), image.as_deref())?;
    Ok((
        0,
        json!({
            "idempotent": true,
            "natural": true,
            "exponent": r.split.exponent,
            "kernel_dims": r.kernel_dims,
            "image_dims": r.image_dims,
            "kernel": io::module_to_json(&r.split.kernel.module),
            "image": io::module_to_json(&r.split.image.module),
        }),
    ))
}

fn encode(ctx: &Ctx, path: &Path) -> Result<(i32, Value), CliError> {
    let m = ctx.module(path)?;
    let (m, adjoined) = if m.poset().is_bounded() {
        (m, false)
    } else {
        (Arc::new(m.with_adjoined_bounds().0), true)
    };
    let enc = build_encoding(&m)?;
    validate_encoding(&enc, &m)?;
    let out = io::encoding_to_json(&enc, m.poset());
    ctx.write_artifact(&out)?;
    Ok((
        0,
        json!({ "encoding": out, "valid": true, "bounds_adjoined": adjoined }),
    ))
}

fn parse_dims(p: &Poset, spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Argument(format!("cannot read dimension vector {spec:?}"));
    let parts: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.iter().all(|s| s.contains('=')) && !parts.is_empty() {
        let mut dims = vec![0; p.len()];
        for part in parts {
            let (id, d) = part.split_once('=').ok_or_else(bad)?;
            let e = p.index_of(id.trim()).map_err(|e| CliError::Argument(e.to_string()))?;
            dims[e] = d.trim().parse().map_err(|_| bad())?;
        }
        Ok(dims)
    } else {
        parts.iter().map(|s| s.parse().map_err(|_| bad())).collect()
    }
}

fn enumerate(ctx: &Ctx, path: &Path, dims: &str, kind: KindArg, refine: bool) -> Result<(i32, Value), CliError> {
    let p = Arc::new(io::poset_from_json(&io::read_json(path)?)?);
    let dims = parse_dims(&p, dims)?;
    let kind = match kind {
        KindArg::Component => ComponentKind::Component,
        KindArg::Semi => ComponentKind::SemiComponent,
    };
    let opts = EnumerationOptions {
        budget: ctx.budgets.enumeration,
        refine_iso: refine,
        field: ctx.field.unwrap_or(Field::Rationals),
        ..EnumerationOptions::default()
    };
    let r = enumerate_component_modules(&p, &dims, kind, opts)?;
    let reps: Vec<Value> = r.representatives.iter().map(|m| io::module_to_json(m)).collect();
    Ok((
        0,
        json!({
            "kind": kind_name(kind),
            "dims": dims,
            "count": r.count(),
            "candidates": r.candidates,
            "functorial": r.functorial,
            "refined": refine,
            "representatives": reps,
        }),
    ))
}
