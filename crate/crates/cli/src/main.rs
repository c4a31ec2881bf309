use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use slantrel::backtrack::{reconstruct_slant_rel, PathPolicy};
use slantrel::cartogram::realize_areas;
use slantrel::gadget::enumerate_gadgets;
use slantrel::graph::validate_proper_triangular;
use slantrel::growing::run_face_growing;
use slantrel::layout::{rel_to_layout, render_svg};
use slantrel::oracle::{for_each_rel, has_slant_rel_bruteforce, random_instance, DEFAULT_CAP};
use slantrel::rel::{is_slant, validate_rel};
use slantrel::{Error, PlaneGraph, Rel};

/// Area-universal rectangular layouts through slant regular edge labelings.
#[derive(Parser)]
#[command(name = "slantrel", version)]
struct Cli {
    /// Human-readable summaries instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// SVG width in pixels.
    #[arg(long, global = true, default_value_t = 480.0)]
    width: f64,
    /// SVG height in pixels.
    #[arg(long, global = true, default_value_t = 480.0)]
    height: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a graph is proper triangular.
    Validate { graph: PathBuf },
    /// List every gadget of a graph.
    Gadgets { graph: PathBuf },
    /// Check a labeling for validity and the slant property.
    CheckRel { graph: PathBuf, rel: PathBuf },
    /// Decide whether a slant labeling exists and reconstruct one.
    Solve {
        graph: PathBuf,
        /// One JSON line per admission.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        emit_rel: Option<PathBuf>,
        /// SVG drawing of the layout.
        #[arg(long)]
        emit_layout: Option<PathBuf>,
        /// Try the last backbone path first when reconstructing.
        #[arg(long)]
        last_path: bool,
    },
    /// Exhaustive search over all labelings.
    Oracle {
        graph: PathBuf,
        /// Write every labeling as one JSON line.
        #[arg(long)]
        list_rels: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare face growing with the oracle on random instances.
    Sweep {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Draw the layout of a labeling.
    Layout {
        graph: PathBuf,
        rel: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Realize target areas (a JSON array indexed by vertex id).
    Cartogram {
        graph: PathBuf,
        rel: PathBuf,
        areas: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Self {
        Fail { code: 1, kind: "usage", message: message.into() }
    }
    fn invalid(message: impl Into<String>) -> Self {
        Fail { code: 2, kind: "validation", message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::invalid(e.to_string())
    }
}

type Outcome = Result<u8, Fail>;

fn diag(level: &str, kind: &str, message: &str) {
    let line = json!({ "level": level, "kind": kind, "message": message });
    eprintln!("{line}");
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<PlaneGraph, Fail> {
    Ok(PlaneGraph::from_json(&read(path)?)?)
}

fn load_valid_graph(path: &Path) -> Result<PlaneGraph, Fail> {
    let g = load_graph(path)?;
    let report = validate_proper_triangular(&g);
    if !report.passed() {
        for v in &report.violations {
            diag("error", "validation", &serde_json::to_string(v).unwrap_or_default());
        }
        return Err(Fail::invalid("graph is not proper triangular"));
    }
    Ok(g)
}

fn load_rel(path: &Path) -> Result<Rel, Fail> {
    Ok(Rel::from_json(&read(path)?)?)
}

/// Writes a line to stdout. A closed pipe is not an error.
fn say(text: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit(cli: &Cli, value: &Value, pretty: impl FnOnce() -> String) {
    if cli.pretty {
        say(pretty());
    } else {
        say(value);
    }
}

fn validate(cli: &Cli, graph: &Path) -> Outcome {
    let g = load_graph(graph)?;
    let report = validate_proper_triangular(&g);
    for v in &report.violations {
        say(serde_json::to_string(v).unwrap_or_default());
    }
    let value = json!({ "passed": report.passed(), "violations": report.violations.len() });
    emit(cli, &value, || {
        if report.passed() {
            "proper triangular".into()
        } else {
            format!("{} violation(s)", report.violations.len())
        }
    });
    Ok(if report.passed() { 0 } else { 2 })
}

fn gadgets(graph: &Path) -> Outcome {
    let g = load_valid_graph(graph)?;
    let set = enumerate_gadgets(&g);
    say(serde_json::to_string(&set.gadgets).unwrap_or_default());
    Ok(0)
}

fn check_rel(cli: &Cli, graph: &Path, rel: &Path) -> Outcome {
    let g = load_valid_graph(graph)?;
    let r = load_rel(rel)?;
    let report = validate_rel(&g, &r);
    let witness = if report.passed() { is_slant(&g, &r)? } else { None };
    let slant = report.passed() && witness.is_none();
    let value = json!({ "valid": report.passed(), "slant": slant, "witness": witness, "violations": report });
    emit(cli, &value, || format!("valid: {}, slant: {}", report.passed(), slant));
    Ok(if report.passed() { 0 } else { 2 })
}

fn solve(
    cli: &Cli,
    graph: &Path,
    trace: Option<&Path>,
    emit_rel: Option<&Path>,
    emit_layout: Option<&Path>,
    last_path: bool,
) -> Outcome {
    let g = load_valid_graph(graph)?;
    let out = run_face_growing(&g)?;
    if let Some(path) = trace {
        let mut text = String::new();
        for a in &out.trace {
            text.push_str(&serde_json::to_string(a).unwrap_or_default());
            text.push('\n');
        }
        write(path, &text)?;
    }
    let mut value = json!({
        "has_slant": out.has_slant,
        "gadgets": out.gadgets.len(),
        "admitted": out.admitted.len(),
        "connections": out.connections.len(),
        "iterations": out.iterations,
    });
    if !out.has_slant {
        emit(cli, &value, || "no slant REL exists".into());
        return Ok(3);
    }
    let policy = if last_path { PathPolicy::Last } else { PathPolicy::First };
    let r = reconstruct_slant_rel(&g, &out, policy)?;
    let layout = rel_to_layout(&g, &r)?;
    if let Some(path) = emit_rel {
        write(path, &r.to_json())?;
    }
    if let Some(path) = emit_layout {
        write(path, &render_svg(&layout, &g, cli.width, cli.height))?;
    }
    value["rel"] = serde_json::from_str(&r.to_json()).unwrap_or(Value::Null);
    value["layout"] = serde_json::from_str(&layout.to_json()).unwrap_or(Value::Null);
    emit(cli, &value, || format!("slant REL found ({} admitted gadgets, {} iterations)", out.admitted.len(), out.iterations));
    Ok(0)
}

fn oracle(cli: &Cli, graph: &Path, list_rels: Option<&Path>, cap: usize) -> Outcome {
    let g = load_valid_graph(graph)?;
    let mut lines = String::new();
    let (mut total, mut slant) = (0usize, 0usize);
    let mut err = None;
    for_each_rel(&g, cap, |r| {
        total += 1;
        match is_slant(&g, r) {
            Ok(w) => slant += usize::from(w.is_none()),
            Err(e) => {
                err = Some(e);
                return false;
            }
        }
        if list_rels.is_some() {
            lines.push_str(&r.to_json().replace('\n', ""));
            lines.push('\n');
        }
        true
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    if let Some(path) = list_rels {
        write(path, &lines)?;
    }
    let value = json!({ "has_slant": slant > 0, "rels": total, "slant_rels": slant });
    emit(cli, &value, || format!("{total} REL(s), {slant} slant"));
    Ok(if slant > 0 { 0 } else { 3 })
}

fn gen(n: usize, seed: u64, out: Option<&Path>) -> Outcome {
    if n == 0 {
        return Err(Fail::usage("--n must be positive"));
    }
    let text = random_instance(n, seed).to_json();
    match out {
        Some(path) => write(path, &text)?,
        None => say(text),
    }
    Ok(0)
}

#[derive(Clone, Copy)]
struct SweepRow {
    n: usize,
    oracle: bool,
    growing: bool,
    witness: bool,
}

fn sweep_one(n: usize, seed: u64) -> Result<SweepRow, Error> {
    let g = random_instance(n, seed);
    let oracle = has_slant_rel_bruteforce(&g, n.max(DEFAULT_CAP))?;
    let out = run_face_growing(&g)?;
    let witness = !out.has_slant
        || reconstruct_slant_rel(&g, &out, PathPolicy::First)
            .map(|r| validate_rel(&g, &r).passed() && is_slant(&g, &r).ok().flatten().is_none())
            .unwrap_or(false);
    Ok(SweepRow { n, oracle, growing: out.has_slant, witness })
}

fn sweep(cli: &Cli, count: usize, min_n: usize, max_n: usize, seed: u64, jobs: usize) -> Outcome {
    if min_n == 0 || max_n < min_n || jobs == 0 {
        return Err(Fail::usage("need 1 <= --min-n <= --max-n and --jobs >= 1"));
    }
    let span = max_n - min_n + 1;
    let tasks: Vec<(usize, u64)> = (0..count).map(|i| (min_n + i % span, seed + (i / span) as u64)).collect();
    let mut rows: Vec<Option<Result<SweepRow, Error>>> = (0..count).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunks: Vec<_> = rows.chunks_mut(count.div_ceil(jobs).max(1)).zip(tasks.chunks(count.div_ceil(jobs).max(1))).collect();
        for (out, work) in chunks {
            s.spawn(move || {
                for (slot, &(n, sd)) in out.iter_mut().zip(work) {
                    *slot = Some(sweep_one(n, sd));
                }
            });
        }
    });
    let mut table = Vec::new();
    let mut disagreements = 0;
    for n in min_n..=max_n {
        let (mut pos, mut neg, mut agree, mut witnessed) = (0, 0, 0, 0);
        for (i, row) in rows.iter().enumerate() {
            if tasks[i].0 != n {
                continue;
            }
            let row = match row.as_ref().unwrap() {
                Ok(r) => *r,
                Err(e) => return Err(Fail::invalid(e.to_string())),
            };
            debug_assert_eq!(row.n, n);
            if row.oracle {
                pos += 1;
            } else {
                neg += 1;
            }
            if row.oracle == row.growing {
                agree += 1;
            } else {
                disagreements += 1;
                diag("warn", "disagreement", &format!("n={n} seed={}", tasks[i].1));
            }
            witnessed += usize::from(row.witness);
        }
        table.push(json!({ "n": n, "positive": pos, "negative": neg, "agree": agree, "witnessed": witnessed }));
    }
    let value = json!({ "instances": count, "disagreements": disagreements, "rows": table });
    emit(cli, &value, || {
        let mut s = String::from("  n  positive  negative  agree  witnessed\n");
        for r in &table {
            s.push_str(&format!(
                "{:>3}  {:>8}  {:>8}  {:>5}  {:>9}\n",
                r["n"].as_u64().unwrap_or(0),
                r["positive"].as_u64().unwrap_or(0),
                r["negative"].as_u64().unwrap_or(0),
                r["agree"].as_u64().unwrap_or(0),
                r["witnessed"].as_u64().unwrap_or(0)
            ));
        }
        s.push_str(&format!("{count} instances, {disagreements} disagreement(s)"));
        s
    });
    Ok(if disagreements == 0 { 0 } else { 2 })
}

fn layout(cli: &Cli, graph: &Path, rel: &Path, svg: Option<&Path>) -> Outcome {
    let g = load_valid_graph(graph)?;
    let r = load_rel(rel)?;
    let report = validate_rel(&g, &r);
    if !report.passed() {
        return Err(Fail::invalid(format!("invalid labeling: {}", serde_json::to_string(&report).unwrap_or_default())));
    }
    let l = rel_to_layout(&g, &r)?;
    if let Some(path) = svg {
        write(path, &render_svg(&l, &g, cli.width, cli.height))?;
    }
    say(l.to_json());
    Ok(0)
}

fn cartogram(cli: &Cli, graph: &Path, rel: &Path, areas: &Path, svg: Option<&Path>) -> Outcome {
    let g = load_valid_graph(graph)?;
    let r = load_rel(rel)?;
    let a: Vec<f64> = serde_json::from_str(&read(areas)?).map_err(|e| Fail::invalid(format!("areas: {e}")))?;
    let real = realize_areas(&g, &r, &a)?;
    if let Some(path) = svg {
        write(path, &render_svg(&real.layout, &g, cli.width, cli.height))?;
    }
    let layout: Value = serde_json::from_str(&real.layout.to_json()).unwrap_or(Value::Null);
    let value = json!({ "iterations": real.iterations, "residual": real.residual, "layout": layout });
    emit(cli, &value, || format!("realized in {} iterations, max relative error {:e}", real.iterations, real.residual));
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { graph } => validate(cli, graph),
        Command::Gadgets { graph } => gadgets(graph),
        Command::CheckRel { graph, rel } => check_rel(cli, graph, rel),
        Command::Solve { graph, trace, emit_rel, emit_layout, last_path } => {
            solve(cli, graph, trace.as_deref(), emit_rel.as_deref(), emit_layout.as_deref(), *last_path)
        }
        Command::Oracle { graph, list_rels, cap } => oracle(cli, graph, list_rels.as_deref(), *cap),
        Command::Gen { n, seed, out } => gen(*n, *seed, out.as_deref()),
        Command::Sweep { count, max_n, min_n, seed, jobs } => sweep(cli, *count, *min_n, *max_n, *seed, *jobs),
        Command::Layout { graph, rel, svg } => layout(cli, graph, rel, svg.as_deref()),
        Command::Cartogram { graph, rel, areas, svg } => cartogram(cli, graph, rel, areas, svg.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            diag("error", "usage", e.to_string().trim());
            return ExitCode::from(1);
        }
    };
    let code = match run(&cli) {
        Ok(c) => c,
        Err(f) => {
            diag("error", f.kind, &f.message);
            f.code
        }
    };
    let _ = std::io::stdout().flush();
    ExitCode::from(code)
}
