//! `fpt-mix` command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// `println!` that tolerates a closed stdout (e.g. piping into `head`).
macro_rules! emit {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use fptmix::bounds::{eval_bound, reproduce, TABLE_NAMES};
use fptmix::budget::{Budget, DEFAULT_BUDGET};
use fptmix::error::Error;
use fptmix::gen::{gen_instance, GenKind, GenParams};
use fptmix::io::{family_value, parse_instance, parse_instance_with, serialize_instance, Instance};
use fptmix::kpath::{parse_ratio, KcwpTradeoffs};
use fptmix::matching::max_matching;
use fptmix::registry::{oracle, solver, SolveOutcome, SolveParams};
use fptmix::repsets::{gen_rep_alg, start_trace, take_trace, Part, PartitionSpec, RepTrace};
use fptmix::types::{ElemSet, Objective};
use fptmix::unisets::{build_universal, builder, verify_universal, UniversalSet};

#[derive(Parser, Debug)]
#[command(name = "fpt-mix", version, about = "Exact parameterized solvers built on representative families")]
struct Cli {
    /// Enumeration cap shared by solvers and checkers.
    #[arg(long, global = true, env = "FPTMIX_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Worker threads for bench rows (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a solver and print a run report.
    Solve {
        problem: String,
        file: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Print the brute-force verdict.
    Check {
        problem: String,
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "W", allow_hyphen_values = true)]
        w: Option<i64>,
    },
    /// Reproduce a bound table, or evaluate one formula with `eval`.
    Bounds {
        table: String,
        /// Formula name for `bounds eval` (kiob-det, kiob-rand, kpath, wsp, p2p).
        formula: Option<String>,
        /// Comma-separated `name=value` pairs for `bounds eval`.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build an (n,k,p)-universal set; one line of 0/1 per function.
    Uniset {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value = "greedy")]
        mode: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exhaustively verify a universal set file.
    CheckUniset {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
    },
    /// Compute a representative subfamily.
    Repfam {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_enum, default_value_t = Obj::Max)]
        objective: Obj,
    },
    /// Maximum matching of a graph document.
    Matching { file: PathBuf },
    /// Generate a seeded random instance, optionally with a planted solution.
    Gen {
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        sets: usize,
        /// Inclusive weight range `lo:hi`.
        #[arg(long, default_value = "1:10", allow_hyphen_values = true)]
        weights: String,
        #[arg(long)]
        plant: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the instance here instead of stdout; the certificate goes to `<out>.cert.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a solver over every `*.json` instance in a directory.
    Bench {
        suite: PathBuf,
        #[arg(long)]
        problem: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Cap for the oracle cross-check; rows beyond it are marked skipped.
        #[arg(long, default_value_t = 10_000_000)]
        oracle_budget: u128,
        #[command(flatten)]
        knobs: Knobs,
    },
}

#[derive(Args, Debug, Clone)]
struct Knobs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "W", allow_hyphen_values = true)]
    w: Option<i64>,
    #[arg(long)]
    inv_eps: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    /// Rational `p/q`.
    #[arg(long)]
    delta: Option<String>,
    /// Rational `p/q`.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    cl: Option<f64>,
    #[arg(long)]
    cr: Option<f64>,
    /// Keep every partial solution (no representative-family pruning).
    #[arg(long)]
    no_reduce: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Obj {
    Max,
    Min,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Csv,
    Json,
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExceeded { .. }) { 3 } else { 2 };
        Fail { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into() }
}

type Res<T> = std::result::Result<T, Fail>;

fn read(path: &Path) -> Res<Vec<u8>> {
    fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Res<Value> {
    serde_json::from_slice(&read(path)?).map_err(|e| Fail::from(Error::Malformed(format!("{}: {e}", path.display()))))
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

impl Knobs {
    fn params(&self) -> Res<SolveParams> {
        let d = KcwpTradeoffs::default();
        Ok(SolveParams {
            k: self.k,
            w: self.w,
            inv_eps: self.inv_eps,
            c: self.c,
            delta: self.delta.as_deref().map(parse_ratio).transpose()?,
            gamma: self.gamma.as_deref().map(parse_ratio).transpose()?,
            tradeoffs: KcwpTradeoffs {
                c1: self.c1.unwrap_or(d.c1),
                c2: self.c2.unwrap_or(d.c2),
                cl: self.cl.unwrap_or(d.cl),
                cr: self.cr.unwrap_or(d.cr),
            },
            reduce: !self.no_reduce,
        })
    }
}

#[derive(Serialize)]
struct Timings {
    parse_ms: f64,
    solve_ms: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunReport {
    command: Vec<String>,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    timings: Timings,
    rep_trace: RepTrace,
    seed: Option<u64>,
}

fn verdict(o: &SolveOutcome) -> &'static str {
    if o.accept {
        "accept"
    } else {
        "reject"
    }
}

fn exit_for(o: &SolveOutcome) -> u8 {
    if o.accept {
        0
    } else {
        1
    }
}

fn cmd_solve(budget: u128, problem: &str, file: &Path, knobs: &Knobs) -> Res<u8> {
    let s = solver(problem)?;
    let params = knobs.params()?;
    let t = Instant::now();
    let doc = read_json(file)?;
    let parse_ms = ms(t);
    let t = Instant::now();
    start_trace();
    let out = s.solve(&doc, &params, &mut Budget::new(budget, "solve"));
    let trace = take_trace().unwrap_or_default();
    let out = out?;
    let report = RunReport {
        command: std::env::args().skip(1).collect(),
        verdict: verdict(&out),
        witness: out.witness.clone(),
        timings: Timings { parse_ms, solve_ms: ms(t) },
        rep_trace: trace,
        seed: None,
    };
    emit!("{}", pretty(&report));
    Ok(exit_for(&out))
}

fn cmd_check(budget: u128, problem: &str, file: &Path, k: Option<usize>, w: Option<i64>) -> Res<u8> {
    let o = oracle(problem)?;
    let doc = read_json(file)?;
    let params = SolveParams { k, w, ..SolveParams::default() };
    let out = o.decide(&doc, &params, &mut Budget::new(budget, "oracle"))?;
    let mut doc = json!({ "verdict": verdict(&out) });
    if let Some(w) = &out.witness {
        doc["witness"] = w.clone();
    }
    emit!("{}", pretty(&doc));
    Ok(exit_for(&out))
}

fn cmd_bounds(table: &str, formula: Option<&str>, params: &[String], as_json: bool) -> Res<u8> {
    if table == "eval" {
        let name = formula.ok_or_else(|| usage("bounds eval needs a formula name"))?;
        let mut map = BTreeMap::new();
        for kv in params {
            let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("expected name=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| usage(format!("`{v}` is not a number")))?;
            map.insert(k.trim().to_string(), v);
        }
        let b = eval_bound(name, &map)?;
        emit!("{}", pretty(&b));
        return Ok(0);
    }
    if formula.is_some() || !params.is_empty() {
        return Err(usage("tables take no formula or parameters"));
    }
    if !TABLE_NAMES.contains(&table) {
        return Err(Error::UnknownStrategy(table.to_string()).into());
    }
    let rows = reproduce(table)?;
    if as_json {
        emit!("{}", pretty(&rows));
        return Ok(0);
    }
    emit!("{table}");
    for r in &rows {
        let cols: Vec<String> = r
            .columns
            .iter()
            .map(|c| format!("{} {:.7} (published {}, delta {:+.1e})", c.name, c.computed, c.published, c.delta))
            .collect();
        emit!("{:<40} {}", r.label, cols.join("  "));
    }
    Ok(0)
}

fn cmd_uniset(budget: u128, n: usize, k: usize, p: usize, mode: &str, seed: Option<u64>) -> Res<u8> {
    let b = builder(mode, seed)?;
    let u = build_universal(n, k, p, b.as_ref(), &mut Budget::new(budget, "universal set"))?;
    for line in u.to_lines() {
        emit!("{line}");
    }
    Ok(0)
}

fn cmd_check_uniset(budget: u128, file: &Path, n: usize, k: usize, p: usize) -> Res<u8> {
    let text = String::from_utf8(read(file)?).map_err(|_| usage("file is not UTF-8"))?;
    let u = UniversalSet::from_lines(n, k, p, &text)?;
    match verify_universal(&u, &mut Budget::new(budget, "universal set check"))? {
        None => {
            emit!("valid ({} functions)", u.len());
            Ok(0)
        }
        Some(v) => {
            emit!("invalid: positions {:?} never get ones exactly at {:?}", v.positions, v.ones);
            Ok(1)
        }
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PartDoc {
    elements: Vec<Value>,
    k: usize,
    p: usize,
    #[serde(default)]
    c: Option<f64>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    parts: Vec<PartDoc>,
}

fn cmd_repfam(budget: u128, spec: &Path, family: &Path, objective: Obj) -> Res<u8> {
    let objective = match objective {
        Obj::Max => Objective::Max,
        Obj::Min => Objective::Min,
    };
    let fam = match parse_instance_with(&read(family)?, objective)? {
        Instance::SetFamily(f) => f.family,
        other => return Err(usage(format!("expected a set family, got a {}", other.kind()))),
    };
    let doc: SpecDoc =
        serde_json::from_value(read_json(spec)?).map_err(|e| Fail::from(Error::Malformed(e.to_string())))?;
    let mut parts = Vec::new();
    for pd in doc.parts {
        let mut elements = ElemSet::EMPTY;
        for e in &pd.elements {
            let l = match e {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let r = fam
                .universe
                .rank(&l)
                .ok_or_else(|| Fail::from(Error::IndexOutOfRange(format!("unknown element `{l}`"))))?;
            elements.insert(r);
        }
        let mut part = Part::new(elements, pd.k, pd.p);
        if let Some(c) = pd.c {
            part.c = c;
        }
        parts.push(part);
    }
    let spec = PartitionSpec { parts };
    let (out, stats) = gen_rep_alg(&spec, &fam, objective, &mut Budget::new(budget, "representative family"))?;
    emit!("{}", pretty(&json!({ "family": Value::Object(family_value(&out)), "stats": stats })));
    Ok(0)
}

fn cmd_matching(file: &Path) -> Res<u8> {
    let g = match parse_instance(&read(file)?)? {
        Instance::Graph(g) => g.graph,
        other => return Err(usage(format!("expected a graph, got a {}", other.kind()))),
    };
    let m = max_matching(&g);
    emit!("{}", pretty(&json!({ "size": m.len(), "edges": m.edges })));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: &str,
    n: usize,
    density: f64,
    sets: usize,
    weights: &str,
    plant: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Res<u8> {
    let kind: GenKind = kind.parse()?;
    let seed = seed.ok_or_else(|| usage("gen requires --seed"))?;
    let (lo, hi) = weights.split_once(':').ok_or_else(|| usage("--weights must be lo:hi"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| usage("bad lower weight"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| usage("bad upper weight"))?;
    if !(0.0..=1.0).contains(&density) {
        return Err(usage("--density must lie in [0, 1]"));
    }
    let g = gen_instance(kind, &GenParams { n, density, sets, weights: (lo, hi), plant }, seed)?;
    let doc = serialize_instance(&g.instance);
    match out {
        Some(path) => {
            fs::write(path, &doc).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if let Some(c) = &g.certificate {
                let mut cert = path.as_os_str().to_owned();
                cert.push(".cert.json");
                fs::write(&cert, serde_json::to_string(c).expect("serializable"))
                    .map_err(|e| usage(format!("{}: {e}", cert.to_string_lossy())))?;
            }
        }
        None => {
            emit!("{doc}");
            if let Some(c) = &g.certificate {
                eprintln!("{}", serde_json::to_string(c).expect("serializable"));
            }
        }
    }
    Ok(0)
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(rename_all = "camelCase")]
struct BenchRow {
    instance: String,
    verdict: String,
    oracle: String,
    wall_ms: f64,
    peak_family: usize,
}

fn bench_row(path: &Path, problem: &str, params: &SolveParams, budget: u128, oracle_budget: u128) -> BenchRow {
    let instance = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let t = Instant::now();
    let doc = match fs::read(path).map_err(|e| e.to_string()).and_then(|b| {
        serde_json::from_slice::<Value>(&b).map_err(|e| e.to_string())
    }) {
        Ok(d) => d,
        Err(e) => {
            return BenchRow { instance, verdict: format!("error: {e}"), oracle: "skipped".into(), wall_ms: 0.0, peak_family: 0 }
        }
    };
    start_trace();
    let got = solver(problem).and_then(|s| s.solve(&doc, params, &mut Budget::new(budget, "solve")));
    let trace = take_trace().unwrap_or_default();
    let wall_ms = ms(t);
    let verdict = match &got {
        Ok(o) => verdict(o).to_string(),
        Err(Error::BudgetExceeded { .. }) => "budget-exceeded".to_string(),
        Err(e) => format!("error: {e}"),
    };
    let oracle = match (&got, oracle(problem).and_then(|o| o.decide(&doc, params, &mut Budget::new(oracle_budget, "oracle")))) {
        (Ok(a), Ok(b)) if a.accept == b.accept => "agree",
        (Ok(_), Ok(_)) => "disagree",
        _ => "skipped",
    };
    BenchRow { instance, verdict, oracle: oracle.into(), wall_ms, peak_family: trace.peak_output }
}

fn cmd_bench(budget: u128, suite: &Path, problem: &str, format: Format, oracle_budget: u128, knobs: &Knobs) -> Res<u8> {
    solver(problem)?;
    let params = knobs.params()?;
    let entries = fs::read_dir(suite).map_err(|e| usage(format!("suite {}: {e}", suite.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.to_string_lossy().ends_with(".cert.json"))
        .collect();
    files.sort();
    // Rows are computed in parallel; collect() keeps them in file order.
    let rows: Vec<BenchRow> =
        files.par_iter().map(|f| bench_row(f, problem, &params, budget, oracle_budget)).collect();
    match format {
        Format::Json => emit!("{}", pretty(&rows)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            if rows.is_empty() {
                w.write_record(["instance", "verdict", "oracle", "wallMs", "peakFamily"]).map_err(|e| usage(e.to_string()))?;
            }
            for r in &rows {
                w.serialize(r).map_err(|e| usage(e.to_string()))?;
            }
            w.flush().map_err(|e| usage(e.to_string()))?;
        }
    }
    Ok(if rows.iter().any(|r| r.oracle == "disagree") { 1 } else { 0 })
}

fn run(cli: Cli) -> Res<u8> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global().map_err(|e| usage(e.to_string()))?;
    }
    let budget = cli.budget;
    match &cli.cmd {
        Cmd::Solve { problem, file, knobs } => cmd_solve(budget, problem, file, knobs),
        Cmd::Check { problem, file, k, w } => cmd_check(budget, problem, file, *k, *w),
        Cmd::Bounds { table, formula, params, json } => cmd_bounds(table, formula.as_deref(), params, *json),
        Cmd::Uniset { n, k, p, mode, seed } => cmd_uniset(budget, *n, *k, *p, mode, *seed),
        Cmd::CheckUniset { file, n, k, p } => cmd_check_uniset(budget, file, *n, *k, *p),
        Cmd::Repfam { spec, family, objective } => cmd_repfam(budget, spec, family, *objective),
        Cmd::Matching { file } => cmd_matching(file),
        Cmd::Gen { kind, n, density, sets, weights, plant, seed, out } => {
            cmd_gen(kind, *n, *density, *sets, weights, *plant, *seed, out.as_deref())
        }
        Cmd::Bench { suite, problem, format, oracle_budget, knobs } => {
            cmd_bench(budget, suite, problem, *format, *oracle_budget, knobs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fpt-mix: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
