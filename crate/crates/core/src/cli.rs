//! Command-line front end. Every command prints one JSON report on stdout
//! and a short human-readable summary on stderr.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cycles::{mod_i_equivalent, FaceStatus, TriangularCycle};
use crate::document::{from_json, parse_element, to_json, CycleDocument, SymbolDocument, TraceDocument};
use crate::error::{Error, Result};
use crate::milnor::MilnorSymbolSum;
use crate::mpoly::{var_names, Eps};
use crate::parse::{parse_scalar, parse_series};
use crate::reduction::{regulator, replay_trace, Replay};
use crate::scalars::FieldSpec;
use crate::witness::{product_witness, steinberg_witness, Witness};
use crate::witt::WittVector;

/// Environment variable overriding the default working precision `2m + 4`.
pub const PRECISION_ENV: &str = "FATPOINT_PRECISION";

#[derive(Parser, Debug)]
#[command(name = "fatpoint", version, about = "Cycles, regulators and Witt vectors over k[t]/(t^m)")]
pub struct Cli {
    /// Print elapsed time on stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check admissibility of cycle documents and report their faces.
    Validate(BatchArgs),
    /// Reduce cycles to graph cycles and print the regulator symbol.
    Reduce {
        #[command(flatten)]
        batch: BatchArgs,
        /// Write the replayable trace to this file.
        #[arg(long, value_name = "FILE")]
        emit_trace: Option<PathBuf>,
        /// Print only the symbol document.
        #[arg(long)]
        symbol_only: bool,
    },
    /// Same as `reduce --symbol-only`.
    Regulator(BatchArgs),
    /// Decide mod-t^m equivalence of two cycle documents.
    Equiv {
        first: String,
        second: String,
        #[arg(long = "mod", value_name = "M")]
        m: usize,
    },
    /// Build the graph cycle of a tuple of units.
    Graph {
        #[arg(long, default_value = "Q")]
        field: FieldSpec,
        #[arg(long = "mod", value_name = "M")]
        m: usize,
        #[arg(long)]
        precision: Option<usize>,
        #[arg(required = true, allow_hyphen_values = true)]
        units: Vec<String>,
    },
    /// Witness curves for the Steinberg and product relations.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Big Witt vector arithmetic on series literals.
    #[command(subcommand)]
    Witt(WittCommand),
    /// Replay every certificate of a trace.
    Replay { trace: String },
    /// Norm of an element of a cycle's coordinate algebra.
    Norm {
        input: String,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long = "mod", value_name = "M")]
        m: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct BatchArgs {
    /// Cycle documents; `-` reads stdin.
    #[arg(required = true)]
    inputs: Vec<String>,
    #[arg(long = "mod", value_name = "M")]
    m: Option<usize>,
    /// Worker threads for several documents.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long, default_value = "Q")]
    field: FieldSpec,
    #[arg(long, default_value_t = 8)]
    precision: usize,
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    Steinberg {
        #[command(flatten)]
        opts: WitnessArgs,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        tail: Vec<String>,
    },
    Product {
        #[command(flatten)]
        opts: WitnessArgs,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        tail: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct WittArgs {
    #[arg(long, default_value = "Q")]
    field: FieldSpec,
    #[arg(long = "mod", value_name = "M")]
    m: usize,
}

#[derive(Subcommand, Debug)]
enum WittCommand {
    Add {
        #[command(flatten)]
        opts: WittArgs,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    Mul {
        #[command(flatten)]
        opts: WittArgs,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    Coords {
        #[command(flatten)]
        opts: WittArgs,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    Ghost {
        #[command(flatten)]
        opts: WittArgs,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
}

/// What a command run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    stderr: Vec<String>,
}

impl Ctx<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        if path == "-" {
            if self.stdin_used {
                return Err(Error::ShapeMismatch("stdin can only be read once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::Parse { line: 0, column: 0, message: format!("cannot read stdin: {e}") })?;
            return Ok(s);
        }
        std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: format!("cannot read {path}: {e}"),
        })
    }

    fn note(&mut self, line: impl Into<String>) {
        self.stderr.push(line.into());
    }
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `N` for documents without an explicit precision.
pub fn default_precision(m: usize) -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(2 * m + 4)
}

fn symbol_pairs(s: &MilnorSymbolSum) -> Value {
    Value::Array(
        s.terms()
            .map(|(c, e)| json!([c, e.iter().map(ToString::to_string).collect::<Vec<_>>()]))
            .collect(),
    )
}

fn eps_name(e: Eps) -> &'static str {
    match e {
        Eps::Zero => "0",
        Eps::Infinity => "inf",
    }
}

fn error_report(command: &str, e: &Error) -> Value {
    json!({
        "command": command,
        "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() }
    })
}

fn load_cycle(src: &str, m: usize) -> Result<TriangularCycle> {
    from_json::<CycleDocument>(src)?.to_cycle(default_precision(m))
}

fn validate_one(src: &str, m: Option<usize>) -> Result<(Value, String)> {
    let c = load_cycle(src, m.unwrap_or(4))?;
    let report = c.validate()?;
    let faces: Vec<Value> = report
        .faces
        .iter()
        .map(|(level, eps, status)| {
            let status = match status {
                FaceStatus::Empty => "empty".to_string(),
                FaceStatus::Nonempty(w) => w.clone(),
            };
            json!({ "level": level, "face": eps_name(*eps), "status": status })
        })
        .collect();
    let summary = format!("admissible: {c}, all {} faces empty", faces.len());
    Ok((
        json!({
            "command": "validate",
            "input_sha256": digest(src.as_bytes()),
            "admissible": true,
            "n": c.n(),
            "precision": c.precision(),
            "degree_vector": c.degree_vector(),
            "faces": faces,
        }),
        summary,
    ))
}

struct Reduced {
    report: Value,
    symbol_doc: Value,
    trace: TraceDocument,
    summary: String,
}

fn reduce_one(src: &str, m: usize) -> Result<Reduced> {
    let c = load_cycle(src, m)?;
    let (sym, trace) = regulator(&c, m)?;
    let schedule = trace.indices();
    let report = json!({
        "command": "reduce",
        "input_sha256": digest(src.as_bytes()),
        "n": c.n(),
        "m": m,
        "precision": c.precision(),
        "symbol": symbol_pairs(&sym),
        "multiplicity": trace.multiplicity,
        "coordinates": trace.coordinates.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "schedule": schedule,
        "precision_audit": {
            "available": c.precision(),
            "consumed": trace.consumed,
            "required": m,
        },
    });
    let summary = format!("{sym} after {} step(s)", schedule.len());
    let symbol_doc = serde_json::to_value(SymbolDocument::from_sum(&sym)).expect("serializes");
    Ok(Reduced { report, symbol_doc, trace: TraceDocument::from_trace(&c, &trace), summary })
}

fn parse_units(field: FieldSpec, prec: usize, items: &[String]) -> Result<Vec<crate::tseries::TruncatedSeries>> {
    items.iter().map(|s| parse_series(s, field, prec)).collect()
}

fn witness_report(kind: &str, w: &Witness) -> Result<Value> {
    let faces = w.faces()?;
    let agree = w.implicit_faces()? == faces;
    let names = var_names(w.nvars, false);
    let faces: Vec<Value> = faces
        .iter()
        .map(|f| {
            json!({
                "index": f.index,
                "face": eps_name(f.eps),
                "graphs": f.graphs.iter().map(|g| g.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "command": "witness",
        "kind": kind,
        "nvars": w.nvars,
        "precision": w.precision,
        "equations": w.equations.iter().map(|e| e.display_with(&names).to_string()).collect::<Vec<_>>(),
        "faces": faces,
        "implicit_faces_agree": agree,
        "boundary": symbol_pairs(&w.boundary()?),
    }))
}

fn witt_input(opts: &WittArgs, src: &str) -> Result<WittVector> {
    let s = parse_series(src, opts.field, opts.m + 1)?;
    WittVector::from_series(&s, opts.m)
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

/// Runs a batch of documents on `jobs` threads, keeping input order.
fn batch<T: Send>(srcs: &[String], jobs: usize, f: impl Fn(&str) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, srcs.len().max(1));
    if jobs == 1 {
        return srcs.iter().map(|s| f(s)).collect();
    }
    let chunk = srcs.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = srcs
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(|s| f(s)).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn combine(reports: Vec<Value>) -> Value {
    if reports.len() == 1 {
        reports.into_iter().next().unwrap()
    } else {
        Value::Array(reports)
    }
}

fn execute(cmd: Command, ctx: &mut Ctx<'_>) -> (Value, i32) {
    macro_rules! attempt {
        ($name:expr, $body:expr) => {
            match (|| -> Result<Value> { $body })() {
                Ok(v) => (v, 0),
                Err(e) => {
                    ctx.note(format!("error: {e}"));
                    (error_report($name, &e), e.exit_code())
                }
            }
        };
    }
    match cmd {
        Command::Validate(args) => {
            let srcs = match read_all(ctx, &args.inputs) {
                Ok(s) => s,
                Err(e) => return fail(ctx, "validate", e),
            };
            let results = batch(&srcs, args.jobs, |s| validate_one(s, args.m));
            collect(ctx, "validate", results)
        }
        Command::Reduce { batch: args, emit_trace, symbol_only } => {
            run_reduce(ctx, &args, emit_trace, symbol_only, "reduce")
        }
        Command::Regulator(args) => run_reduce(ctx, &args, None, true, "regulator"),
        Command::Equiv { first, second, m } => attempt!("equiv", {
            let a = ctx.read(&first)?;
            let b = ctx.read(&second)?;
            let (c1, c2) = (load_cycle(&a, m)?, load_cycle(&b, m)?);
            c1.validate()?;
            c2.validate()?;
            let eq = mod_i_equivalent(&c1, &c2, m)?;
            ctx.note(format!("{} mod t^{m}", if eq { "equivalent" } else { "not equivalent" }));
            Ok(json!({
                "command": "equiv",
                "input_sha256": [digest(a.as_bytes()), digest(b.as_bytes())],
                "m": m,
                "equivalent": eq,
            }))
        }),
        Command::Graph { field, m, precision, units } => attempt!("graph", {
            let prec = precision.unwrap_or_else(|| default_precision(m));
            let a = parse_units(field, prec, &units)?;
            let c = crate::cycles::graph(&a)?;
            let (sym, _) = regulator(&c, m)?;
            ctx.note(format!("{c} with symbol {sym}"));
            Ok(json!({
                "command": "graph",
                "input_sha256": digest(units.join("\n").as_bytes()),
                "cycle": serde_json::to_value(CycleDocument::from_cycle(&c)).expect("serializes"),
                "symbol": symbol_pairs(&sym),
            }))
        }),
        Command::Witness(WitnessCommand::Steinberg { opts, a, tail }) => attempt!("witness", {
            let a = parse_series(&a, opts.field, opts.precision)?;
            let tail = parse_units(opts.field, opts.precision, &tail)?;
            let w = steinberg_witness(&a, &tail)?;
            ctx.note(format!("Steinberg witness in {} coordinates", w.nvars));
            witness_report("steinberg", &w)
        }),
        Command::Witness(WitnessCommand::Product { opts, a, b, tail }) => attempt!("witness", {
            let a = parse_series(&a, opts.field, opts.precision)?;
            let b = parse_series(&b, opts.field, opts.precision)?;
            let tail = parse_units(opts.field, opts.precision, &tail)?;
            let w = product_witness(&a, &b, &tail)?;
            ctx.note(format!("product witness in {} coordinates", w.nvars));
            witness_report("product", &w)
        }),
        Command::Witt(op) => attempt!("witt", {
            let (name, m, out) = match op {
                WittCommand::Add { opts, x, y } => {
                    let r = witt_input(&opts, &x)?.add(&witt_input(&opts, &y)?)?;
                    ("add", opts.m, json!({ "result": r.to_string(), "coordinates": strings(&r.coordinates()) }))
                }
                WittCommand::Mul { opts, x, y } => {
                    let r = witt_input(&opts, &x)?.mul(&witt_input(&opts, &y)?)?;
                    ("mul", opts.m, json!({ "result": r.to_string(), "coordinates": strings(&r.coordinates()) }))
                }
                WittCommand::Coords { opts, x } => {
                    let r = witt_input(&opts, &x)?;
                    ("coords", opts.m, json!({ "coordinates": strings(&r.coordinates()) }))
                }
                WittCommand::Ghost { opts, x } => {
                    let r = witt_input(&opts, &x)?;
                    ("ghost", opts.m, json!({ "ghost": strings(&r.ghost()) }))
                }
            };
            let mut out = out;
            out["command"] = json!("witt");
            out["op"] = json!(name);
            out["m"] = json!(m);
            ctx.note(format!("witt {name} done"));
            Ok(out)
        }),
        Command::Replay { trace } => {
            let loaded = ctx.read(&trace).and_then(|src| {
                let doc: TraceDocument = from_json(&src)?;
                Ok((digest(src.as_bytes()), doc.to_trace()?))
            });
            let (sha, t) = match loaded {
                Ok(x) => x,
                Err(e) => return fail(ctx, "replay", e),
            };
            match replay_trace(&t) {
                Replay::Verified => {
                    ctx.note("all certificates verified");
                    (
                        json!({
                            "command": "replay",
                            "input_sha256": sha,
                            "certificates": t.certificates.len(),
                            "verified": true,
                            "message": "all certificates verified",
                        }),
                        0,
                    )
                }
                Replay::Rejected(why) => {
                    ctx.note(format!("replay failed: {why}"));
                    (
                        json!({
                            "command": "replay",
                            "input_sha256": sha,
                            "certificates": t.certificates.len(),
                            "verified": false,
                            "message": why,
                        }),
                        3,
                    )
                }
            }
        }
        Command::Norm { input, element, m } => attempt!("norm", {
            let src = ctx.read(&input)?;
            let c = load_cycle(&src, m.unwrap_or(4))?;
            let algebra = c.algebra()?;
            let b = algebra.reduce(&parse_element(&element, &c)?)?;
            let norm = algebra.norm(&b);
            ctx.note(format!("norm {norm}"));
            Ok(json!({
                "command": "norm",
                "input_sha256": digest(src.as_bytes()),
                "rank": algebra.rank(),
                "norm": norm.to_string(),
                "unit": norm.is_unit(),
            }))
        }),
    }
}

fn fail(ctx: &mut Ctx<'_>, name: &str, e: Error) -> (Value, i32) {
    ctx.note(format!("error: {e}"));
    (error_report(name, &e), e.exit_code())
}

fn read_all(ctx: &mut Ctx<'_>, inputs: &[String]) -> Result<Vec<String>> {
    inputs.iter().map(|p| ctx.read(p)).collect()
}

fn collect(ctx: &mut Ctx<'_>, name: &str, results: Vec<Result<(Value, String)>>) -> (Value, i32) {
    let mut code = 0;
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok((v, summary)) => {
                ctx.note(format!("{name}: {summary}"));
                reports.push(v);
            }
            Err(e) => {
                ctx.note(format!("error: {e}"));
                code = code.max(e.exit_code());
                reports.push(error_report(name, &e));
            }
        }
    }
    (combine(reports), code)
}

fn run_reduce(
    ctx: &mut Ctx<'_>,
    args: &BatchArgs,
    emit_trace: Option<PathBuf>,
    symbol_only: bool,
    name: &str,
) -> (Value, i32) {
    let Some(m) = args.m else {
        return fail(ctx, name, Error::ShapeMismatch("--mod is required".into()));
    };
    if emit_trace.is_some() && args.inputs.len() != 1 {
        return fail(ctx, name, Error::ShapeMismatch("--emit-trace takes a single document".into()));
    }
    let srcs = match read_all(ctx, &args.inputs) {
        Ok(s) => s,
        Err(e) => return fail(ctx, name, e),
    };
    let results = batch(&srcs, args.jobs, |s| reduce_one(s, m));
    let mut mapped = Vec::with_capacity(results.len());
    for r in results {
        mapped.push(match r {
            Ok(red) => {
                if let Some(path) = &emit_trace {
                    if let Err(e) = std::fs::write(path, to_json(&red.trace) + "\n") {
                        return fail(ctx, name, Error::ShapeMismatch(format!("cannot write {}: {e}", path.display())));
                    }
                }
                let mut v = if symbol_only { red.symbol_doc } else { red.report };
                if !symbol_only && name != "reduce" {
                    v["command"] = json!(name);
                }
                Ok((v, red.summary))
            }
            Err(e) => Err(e),
        });
    }
    collect(ctx, name, mapped)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx { stdin, stdin_used: false, stderr: Vec::new() };
    let (value, code) = execute(cli.command, &mut ctx);
    if cli.timing {
        ctx.note(format!("elapsed: {:.3} ms", start.elapsed().as_secs_f64() * 1e3));
    }
    let mut stderr = ctx.stderr.join("\n");
    if !stderr.is_empty() {
        stderr.push('\n');
    }
    Outcome { stdout: to_json(&value) + "\n", stderr, code }
}

/// Scalar literal helper shared with the FFI layer.
pub fn scalar(src: &str, field: FieldSpec) -> Result<crate::scalars::FieldElement> {
    parse_scalar(src, field)
}
