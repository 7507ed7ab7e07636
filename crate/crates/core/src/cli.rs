//! The `geobst` command line. `run` returns the process exit status:
//! 0 success, 1 a checked property failed, 2 usage or input error,
//! 3 a search hit its resource limit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::decomposition::{decompose, k_decomposition, DecompositionTree};
use crate::error::{Error, Result};
use crate::gadgets::{find_gadget_violations, GadgetMode};
use crate::generators::gen_class;
use crate::geometry::{first_unsatisfied, PointGrid};
use crate::greedy::{run_greedy_sided, run_sgreedy, ExecutionTrace, Side};
use crate::harness::experiment::{run_suite, to_csv, to_json_lines, SuiteParams};
use crate::harness::regress::{self, Bounds, Target, Witness};
use crate::opt::{brute_force_opt, decomposition_lower_bound_check, hardness_survey, search_opt, split_sequence, OptLimits};
use crate::patterns::{contains, find_occurrence, parse_pattern};
use crate::perm::{format_list, parse_list};
use crate::rgreedy::run_rgreedy;
use crate::sequence::AccessSequence;
use crate::tree::parse_initial_spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "geobst", version, about = "Geometric BST experiments: Greedy, RGreedy, patterns and exact OPT")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate an access sequence.
    Gen(GenArgs),
    /// Run an algorithm on a sequence.
    Run(RunArgs),
    /// Check that a trace or point set is arborally satisfied.
    Verify(VerifyArgs),
    /// Print a decomposition tree.
    Decompose(DecomposeArgs),
    /// Pattern containment in a sequence or trace, or gadget violations.
    Pattern(PatternArgs),
    /// Exact OPT search and related checks.
    Opt(OptArgs),
    /// Run an experiment suite and emit CSV.
    Experiment(ExperimentArgs),
    /// Search for, store and re-check counterexample witnesses.
    Regress(RegressArgs),
}

#[derive(Args, Debug)]
struct Caps {
    /// Node cap for searches.
    #[arg(long, default_value_t = 10_000_000)]
    node_cap: u64,
    /// Wall-clock cap for searches in milliseconds.
    #[arg(long)]
    time_cap_ms: Option<u64>,
}

impl Caps {
    fn time_cap(&self) -> Option<Duration> {
        self.time_cap_ms.map(Duration::from_millis)
    }
}

#[derive(Args, Debug)]
struct Input {
    /// Sequence file (`n m` header, then keys).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inline permutation, e.g. `3,1,2`.
    #[arg(long, conflicts_with = "input")]
    perm: Option<String>,
}

impl Input {
    fn load(&self) -> Result<AccessSequence> {
        match (&self.input, &self.perm) {
            (Some(p), _) => AccessSequence::from_text(&read(p)?),
            (None, Some(s)) => AccessSequence::from_perm(parse_list(s)?),
            (None, None) => Err(Error::InvalidArgument("give --input FILE or --perm LIST".into())),
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    class: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, env = "GEOBST_SEED", default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of the text format.
    #[arg(long)]
    json: bool,
    /// Also write the generating decomposition tree, when the class has one.
    #[arg(long)]
    tree_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// greedy, greedy-left, greedy-right, sgreedy or rgreedy.
    #[arg(long, default_value = "greedy")]
    alg: String,
    #[command(flatten)]
    input: Input,
    /// none, balanced, random:SEED or preorder:LIST.
    #[arg(long, default_value = "none")]
    initial: String,
    /// Decomposition tree file for rgreedy; the canonical tree otherwise.
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long)]
    emit_trace: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Trace file as written by `run --emit-trace`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Point set file (`w h` header, then `x y` lines).
    #[arg(long, conflicts_with = "trace")]
    grid: Option<PathBuf>,
    /// Include the initial-tree stacks of a trace.
    #[arg(long)]
    with_initial: bool,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    input: Input,
    /// Look for a tree of arity at most k instead of the canonical one.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct PatternArgs {
    /// Permutation like `2,3,1` or a gadget: cap, inc:K, dec:K, alt:K.
    #[arg(long)]
    pattern: String,
    #[command(flatten)]
    input: Input,
    /// Search the touch matrix of this trace instead of the input.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// With --trace: report occurrences unexplained under this mode
    /// (capture, increasing:K, decreasing:K, alternating:K).
    #[arg(long, requires = "trace")]
    mode: Option<String>,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args, Debug)]
struct OptArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    caps: Caps,
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Return the Greedy bound flagged inexact instead of failing on a cap.
    #[arg(long)]
    allow_inexact: bool,
    /// Also check the block lower bound against the canonical tree.
    #[arg(long)]
    lower_bound: bool,
    /// Print the split permutation and its column map, no search.
    #[arg(long)]
    split: bool,
    /// Hardness survey at this n instead of a single instance.
    #[arg(long)]
    survey: Option<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, env = "GEOBST_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    suite: String,
    /// Sizes, comma separated; suite defaults when absent.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Instances per size for sampled suites.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, env = "GEOBST_SEED", default_value_t = 0)]
    seed: u64,
    /// csv or json (one record per line).
    #[arg(long, default_value = "csv")]
    out: String,
    #[arg(long)]
    json: bool,
    /// Write records to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args, Debug)]
struct RegressArgs {
    /// pattern-counter, decomp-counter, gadget-counter or all.
    #[arg(long, default_value = "all")]
    target: String,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    #[arg(long, default_value_t = 200)]
    trees: usize,
    #[arg(long, default_value_t = 32)]
    inputs: usize,
    #[arg(long, env = "GEOBST_SEED", default_value_t = 1)]
    seed: u64,
    /// Directory for `<target>.json` fixtures. Existing fixtures are
    /// re-checked; missing ones are written.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write_file(p: &Path, s: &str) -> Result<()> {
    fs::write(p, s).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn emit(out: &mut dyn Write, s: &str) -> Result<()> {
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Parses `args` (including the program name) and executes.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceLimit { upper_bound, .. } => {
                    if let Some(u) = upper_bound {
                        eprintln!("best known upper bound {u} (inexact)");
                    }
                    EXIT_LIMIT
                }
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Cmd::Gen(a) => cmd_gen(a, out),
        Cmd::Run(a) => cmd_run(a, out),
        Cmd::Verify(a) => cmd_verify(a, out),
        Cmd::Decompose(a) => cmd_decompose(a, out),
        Cmd::Pattern(a) => cmd_pattern(a, out),
        Cmd::Opt(a) => cmd_opt(a, out),
        Cmd::Experiment(a) => cmd_experiment(a, out),
        Cmd::Regress(a) => cmd_regress(a, out),
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let (x, tree) = gen_class(&a.class, a.n, a.k, a.seed)?;
    if a.json {
        emit(out, &(serde_json::to_string(&x).expect("sequence serializes") + "\n"))?;
    } else {
        emit(out, &x.to_text())?;
    }
    if let Some(p) = &a.tree_out {
        match tree {
            Some(t) => write_file(p, &(t.to_text() + "\n"))?,
            None => return Err(Error::InvalidArgument(format!("class {} has no generating tree", a.class))),
        }
    }
    Ok(EXIT_OK)
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<i32> {
    let x = a.input.load()?;
    let initial = parse_initial_spec(&a.initial, x.n())?;
    let (trace, check): (ExecutionTrace, bool) = match a.alg.as_str() {
        "greedy" => (run_greedy_sided(&x, initial.as_ref(), Side::Both)?, true),
        "greedy-left" => (run_greedy_sided(&x, initial.as_ref(), Side::Left)?, false),
        "greedy-right" => (run_greedy_sided(&x, initial.as_ref(), Side::Right)?, false),
        "sgreedy" => {
            let s = run_sgreedy(&x, initial.as_ref())?;
            if a.emit_trace {
                emit(out, &s.left.to_text())?;
                emit(out, &s.right.to_text())?;
            }
            emit(out, &format!("cost {}\n", s.cost))?;
            return Ok(EXIT_OK);
        }
        "rgreedy" => {
            if initial.is_some() {
                return Err(Error::InvalidArgument("rgreedy runs without an initial tree".into()));
            }
            let tree = match &a.tree {
                Some(p) => DecompositionTree::from_text(&read(p)?)?,
                None => decompose(x.keys())?,
            };
            (run_rgreedy(&x, &tree)?, true)
        }
        other => return Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
    };
    if a.json {
        let mut v = trace.to_json();
        if !a.emit_trace {
            v.as_object_mut().expect("object").remove("rows");
        }
        emit(out, &(v.to_string() + "\n"))?;
    } else {
        if a.emit_trace {
            emit(out, &trace.to_text())?;
        }
        emit(out, &format!("cost {}\n", trace.cost()))?;
    }
    if check {
        if let Some(r) = first_unsatisfied(&trace.combined_grid()) {
            eprintln!("trace is not satisfied: ({}, {}) and ({}, {})", r.p.x, r.p.y, r.q.x, r.q.y);
            return Ok(EXIT_FAIL);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let grid = match (&a.trace, &a.grid) {
        (Some(p), _) => {
            let t = ExecutionTrace::from_text(&read(p)?)?;
            if a.with_initial { t.combined_grid() } else { t.touch_grid() }
        }
        (None, Some(p)) => PointGrid::from_text(&read(p)?)?,
        (None, None) => return Err(Error::InvalidArgument("give --trace FILE or --grid FILE".into())),
    };
    match first_unsatisfied(&grid) {
        None => {
            emit(out, &format!("satisfied ({} points)\n", grid.weight()))?;
            Ok(EXIT_OK)
        }
        Some(r) => {
            emit(out, &format!("unsatisfied: ({}, {}) and ({}, {})\n", r.p.x, r.p.y, r.q.x, r.q.y))?;
            Ok(EXIT_FAIL)
        }
    }
}

fn cmd_decompose(a: DecomposeArgs, out: &mut dyn Write) -> Result<i32> {
    let x = a.input.load()?;
    let tree = match a.k {
        None => decompose(x.keys())?,
        Some(k) => match k_decomposition(x.keys(), k)? {
            Some(t) => t,
            None => {
                emit(out, &format!("not {k}-decomposable\n"))?;
                return Ok(EXIT_FAIL);
            }
        },
    };
    if a.json {
        emit(out, &(tree.to_json().to_string() + "\n"))?;
    } else {
        emit(out, &(tree.to_text() + "\n"))?;
    }
    Ok(EXIT_OK)
}

fn cmd_pattern(a: PatternArgs, out: &mut dyn Write) -> Result<i32> {
    let needle = parse_pattern(&a.pattern)?;
    if let Some(p) = &a.trace {
        let trace = ExecutionTrace::from_text(&read(p)?)?;
        if let Some(m) = &a.mode {
            let mode = GadgetMode::parse(m)?;
            let v = find_gadget_violations(&trace, &needle, mode, a.caps.node_cap)?;
            for b in &v {
                emit(out, &format!("violation [{}, {}] x [{}, {}]\n", b.xmin, b.xmax, b.ymin, b.ymax))?;
            }
            emit(out, &format!("{} violations\n", v.len()))?;
            return Ok(if v.is_empty() { EXIT_OK } else { EXIT_FAIL });
        }
        return report_occurrence(&trace.touch_grid(), &needle, out);
    }
    let x = a.input.load()?;
    report_occurrence(&x.access_grid(), &needle, out)
}

fn report_occurrence(hay: &PointGrid, needle: &crate::patterns::PatternMatrix, out: &mut dyn Write) -> Result<i32> {
    match find_occurrence(hay, needle) {
        Some(pts) => {
            let s: Vec<String> = pts.iter().map(|p| format!("({}, {})", p.x, p.y)).collect();
            emit(out, &format!("contains: {}\n", s.join(" ")))?;
        }
        None => emit(out, "avoids\n")?,
    }
    debug_assert_eq!(contains(hay, needle), find_occurrence(hay, needle).is_some());
    Ok(EXIT_OK)
}

fn cmd_opt(a: OptArgs, out: &mut dyn Write) -> Result<i32> {
    let limits = OptLimits {
        max_n: a.max_n,
        node_cap: a.caps.node_cap,
        time_cap: a.caps.time_cap(),
        scale: 1,
    };
    if let Some(n) = a.survey {
        let s = hardness_survey(n, a.samples, a.seed, &limits)?;
        emit(out, &(serde_json::to_string(&s).expect("summary serializes") + "\n"))?;
        return Ok(EXIT_OK);
    }
    let x = a.input.load()?;
    if a.split {
        let (p, map) = split_sequence(&x);
        emit(out, &p.to_text())?;
        emit(out, &format!("map {}\n", format_list(&map)))?;
        return Ok(EXIT_OK);
    }
    let r = if a.allow_inexact { search_opt(&x, &limits)? } else { brute_force_opt(&x, &limits)? };
    emit(out, &(r.to_json().to_string() + "\n"))?;
    if a.lower_bound {
        let tree = decompose(x.keys())?;
        let (whole, rhs) = decomposition_lower_bound_check(x.keys(), &tree, &limits)?;
        emit(out, &format!("lower bound: opt {whole} >= {rhs}: {}\n", whole as i64 >= rhs))?;
        if (whole as i64) < rhs {
            return Ok(EXIT_FAIL);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_experiment(a: ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    let params = SuiteParams {
        ns: a.n,
        ks: a.k,
        seeds: a.seeds,
        base_seed: a.seed,
        node_cap: a.caps.node_cap,
        time_cap: a.caps.time_cap(),
    };
    let recs = run_suite(&a.suite, &params)?;
    let body = match (a.json, a.out.as_str()) {
        (true, _) | (false, "json") => to_json_lines(&recs),
        (false, "csv") => to_csv(&recs),
        (false, other) => return Err(Error::InvalidArgument(format!("unknown output format {other:?}"))),
    };
    match &a.output {
        Some(p) => write_file(p, &body)?,
        None => emit(out, &body)?,
    }
    let failed = recs.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} records failed", recs.len());
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_OK)
}

fn cmd_regress(a: RegressArgs, out: &mut dyn Write) -> Result<i32> {
    let targets: Vec<Target> = if a.target == "all" {
        regress::TARGETS.iter().map(|t| Target::parse(t)).collect::<Result<_>>()?
    } else {
        vec![Target::parse(&a.target)?]
    };
    let bounds = Bounds { max_n: a.max_n, trees_per_input: a.trees, inputs_per_n: a.inputs, seed: a.seed };
    let mut code = EXIT_OK;
    for t in targets {
        let stored = a.fixtures.as_ref().map(|d| d.join(format!("{}.json", t.name())));
        if let Some(p) = stored.as_ref().filter(|p| p.exists()) {
            let w: Witness = serde_json::from_str(&read(p)?).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            let ok = regress::verify(&w)?;
            emit(out, &format!("{}: stored witness {} {}\n", t.name(), format_list(&w.keys), if ok { "verified" } else { "FAILED" }))?;
            if !ok {
                code = EXIT_FAIL;
            }
        }
        match regress::search(t, &bounds)? {
            Some(w) => {
                let ok = regress::verify(&w)?;
                emit(out, &format!("{}: found {} {}\n", t.name(), format_list(&w.keys), serde_json::to_string(&w.detail).expect("detail")))?;
                if !ok {
                    code = EXIT_FAIL;
                }
                if let Some(p) = stored.as_ref().filter(|p| !p.exists()) {
                    write_file(p, &(serde_json::to_string_pretty(&w).expect("witness") + "\n"))?;
                }
            }
            None => {
                emit(out, &format!("{}: no witness within bounds\n", t.name()))?;
                code = EXIT_FAIL;
            }
        }
    }
    Ok(code)
}
