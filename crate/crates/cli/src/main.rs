//! `kinkfree`: command-line front end for triangulation documents and walks.
//!
//! Exit codes: 0 success, 1 domain failure or inequality, 2 parse error,
//! 3 undefined operation (the kink-free section of an order-two class).

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use kinkfree::document::TriangulationDocument;
use kinkfree::flips::{self, FlipMove};
use kinkfree::kinks::{self, Kink, Strategy};
use kinkfree::triangulation::{LeafyDualGraph, Triangulation};
use kinkfree::walks::{self, format_walk, ClosedWalkClass, Walk};
use kinkfree::{dot, groupoid, selftest, Error};

#[derive(Parser)]
#[command(name = "kinkfree", version, about = "Kink-free normal forms of walks on signature-zero triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a document describes a signature-zero triangulation.
    Validate { file: PathBuf },
    /// Resolve all kinks of a walk and print the kink-free result.
    Normalize(NormalizeArgs),
    /// List the kinks of a walk, one JSON object per line.
    Kinks(WalkArgs),
    /// Print the sign sequence of a walk.
    Signs(WalkArgs),
    /// Compare two walks; exit 0 when equal, 1 otherwise.
    Equal {
        file: PathBuf,
        left: String,
        right: String,
        /// Compare in the orbifold groupoid instead of the plain one.
        #[arg(long)]
        orbifold: bool,
    },
    /// Decide whether a loop has order two in the orbifold groupoid.
    Order2 { file: PathBuf, walk: String },
    /// Flip arcs and print the resulting document.
    Flip {
        file: PathBuf,
        #[command(flatten)]
        moves: MoveArgs,
    },
    /// Carry a walk across flips and print its image.
    Transport {
        file: PathBuf,
        walk: String,
        #[command(flatten)]
        moves: MoveArgs,
        #[arg(long)]
        closed: bool,
    },
    /// Print the leafy dual graph (or the dual graph) in Graphviz format.
    Dot {
        file: PathBuf,
        /// Draw the dual graph without leaves.
        #[arg(long)]
        plain: bool,
        /// Highlight the edges of this walk.
        #[arg(long)]
        walk: Option<String>,
    },
    /// Run the seeded property suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct WalkArgs {
    file: PathBuf,
    /// `<start-vertex> <edge> <edge> ...`
    walk: String,
    /// Treat the walk as a closed walk up to rotation.
    #[arg(long)]
    closed: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    LeftmostInnermost,
    Random,
}

#[derive(Args)]
struct NormalizeArgs {
    file: PathBuf,
    /// Walk to normalize; omit with --stdin.
    walk: Option<String>,
    /// Read one walk per line from standard input.
    #[arg(long, conflicts_with = "walk")]
    stdin: bool,
    #[arg(long)]
    closed: bool,
    /// Print every resolution step before the result.
    #[arg(long)]
    trace: bool,
    /// Re-check that input and output are orbifold-equal.
    #[arg(long)]
    orbifold_check: bool,
    /// Refuse order-two loops instead of printing one of their two normal forms.
    #[arg(long)]
    iota_strict: bool,
    #[arg(long, value_enum, default_value = "leftmost-innermost")]
    strategy: StrategyName,
    #[arg(long, env = "KINK_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for --stdin.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MoveArgs {
    /// `standard:<arc>` or `double:<self-folded triangle>`.
    #[arg(long = "move")]
    mv: Vec<String>,
    /// JSON list of `{"kind": ..., "target": ...}` moves.
    #[arg(long)]
    script: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, env = "KINK_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, hide = true)]
    inject_fault: Option<Fault>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    SkipSignCondition,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::UnknownVertex(_)
            | Error::UnknownEdge(_)
            | Error::EdgeNotAtVertex { .. }
            | Error::NonConsecutive { .. }
            | Error::LoopAtVertex { .. } => 2,
            Error::OrderTwoClass => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn domain(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn load(path: &Path) -> CliResult<(Triangulation, LeafyDualGraph)> {
    let doc = TriangulationDocument::from_json(&read(path)?)?;
    let t = doc.to_triangulation()?;
    let lg = t.leafy_dual_graph()?;
    Ok((t, lg))
}

fn parse_closed(lg: &LeafyDualGraph, text: &str) -> CliResult<ClosedWalkClass> {
    let (start, edges) = walks::parse_word(&lg.graph, text)?;
    let w = Walk::from_word(&lg.graph, start, &edges)?;
    Ok(ClosedWalkClass::new(&lg.graph, &w)?)
}

fn kink_json(lg: &LeafyDualGraph, k: &Kink) -> serde_json::Value {
    json!({
        "j": k.j,
        "m": k.m,
        "multiplicity": k.multiplicity,
        "triangle": lg.self_folded[k.cluster].name,
        "shape": k.shape,
    })
}

fn strategy(args: &NormalizeArgs) -> Strategy {
    match args.strategy {
        StrategyName::LeftmostInnermost => Strategy::LeftmostInnermost,
        StrategyName::Random => Strategy::Random(args.seed),
    }
}

fn thread_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| domain(e.to_string()))
}

fn validate(file: &Path) -> CliResult {
    let doc = TriangulationDocument::from_json(&read(file)?)?;
    let diagnostics = doc.to_triangulation_unchecked().validate();
    if diagnostics.is_empty() {
        println!("valid");
        return Ok(());
    }
    for d in &diagnostics {
        let mut obj = serde_json::to_value(d).expect("serializable");
        obj["message"] = json!(d.to_string());
        eprintln!("{obj}");
    }
    Err(domain(format!("{} problem(s) found", diagnostics.len())))
}

/// Normalizes one query and returns the lines to print.
fn normalize_one(lg: &LeafyDualGraph, args: &NormalizeArgs, text: &str) -> CliResult<Vec<String>> {
    let g = &lg.graph;
    let s = strategy(args);
    let mut out = Vec::new();
    if args.closed {
        let c = parse_closed(lg, text)?;
        let (nf, steps) = kinks::normalize_closed_traced(lg, &c, s)?;
        if args.trace {
            out.extend(steps.iter().map(|st| step_line(lg, st)));
        }
        if args.orbifold_check {
            let again = kinks::normalize_closed(lg, &c, Strategy::Random(args.seed ^ 0x5eed))?;
            let key = |x: &Option<ClosedWalkClass>| x.as_ref().map(|k| k.unoriented(g));
            if key(&again) != key(&nf) {
                return Err(domain("orbifold check failed: normal forms disagree"));
            }
        }
        out.push(match nf {
            Some(k) => format_walk(g, k.representative()),
            None => "contractible".to_string(),
        });
        return Ok(out);
    }
    let w = walks::parse_walk(g, text)?;
    let order_two = w.is_closed() && !w.is_identity() && groupoid::is_order_two(lg, &w)?;
    if order_two && args.iota_strict {
        return Err(Error::OrderTwoClass.into());
    }
    let (nf, steps) = kinks::normalize_traced(lg, &w, s)?;
    if args.trace {
        out.extend(steps.iter().map(|st| step_line(lg, st)));
    }
    if args.orbifold_check && !groupoid::orbifold_equal(lg, &nf, &w)? {
        return Err(domain("orbifold check failed: output is not orbifold-equal to input"));
    }
    if order_two {
        out.push(format!(
            "# order-two class: the inverse {} is also kink-free",
            format_walk(g, &walks::invert(&nf))
        ));
    }
    out.push(format_walk(g, &nf));
    Ok(out)
}

fn step_line(lg: &LeafyDualGraph, st: &kinks::Step) -> String {
    let mut obj = kink_json(lg, &st.kink);
    obj["swap"] = json!(st.swap);
    obj["length"] = json!([st.length_before, st.length_after]);
    obj["total_multiplicity"] = json!([st.multiplicity_before, st.multiplicity_after]);
    obj["walk"] = match &st.result {
        Some(w) => json!(format_walk(&lg.graph, w)),
        None => json!("contractible"),
    };
    obj.to_string()
}

fn normalize(args: &NormalizeArgs) -> CliResult {
    let (_, lg) = load(&args.file)?;
    if matches!(args.strategy, StrategyName::Random) {
        eprintln!("# strategy random, rng {}, seed {}", selftest::RNG_NAME, args.seed);
    }
    let queries: Vec<String> = if args.stdin {
        io::stdin()
            .lock()
            .lines()
            .collect::<io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .collect()
    } else {
        match &args.walk {
            Some(w) => vec![w.clone()],
            None => return Err(Failure { code: 2, message: "no walk given (use --stdin to read walks)".into() }),
        }
    };
    let results: Vec<CliResult<Vec<String>>> = thread_pool(args.jobs)?
        .install(|| queries.par_iter().map(|q| normalize_one(&lg, args, q)).collect());
    let mut first_failure = None;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for r in results {
        match r {
            Ok(lines) => {
                for l in lines {
                    writeln!(out, "{l}")?;
                }
            }
            Err(f) => {
                if args.stdin {
                    writeln!(out, "error: {}", f.message)?;
                }
                first_failure.get_or_insert(f);
            }
        }
    }
    match first_failure {
        Some(f) if args.stdin => Err(Failure { code: f.code, message: "some queries failed".into() }),
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn kinks_cmd(a: &WalkArgs) -> CliResult {
    let (_, lg) = load(&a.file)?;
    let ks = if a.closed {
        kinks::find_kinks_closed(&lg, &parse_closed(&lg, &a.walk)?)?
    } else {
        kinks::find_kinks(&lg, &walks::parse_walk(&lg.graph, &a.walk)?)?
    };
    for k in &ks {
        println!("{}", kink_json(&lg, k));
    }
    Ok(())
}

fn signs(a: &WalkArgs) -> CliResult {
    let (_, lg) = load(&a.file)?;
    let s = if a.closed {
        parse_closed(&lg, &a.walk)?.sign_sequence(&lg.graph)?
    } else {
        walks::sign_sequence(&lg.graph, &walks::parse_walk(&lg.graph, &a.walk)?)?
    };
    println!("{s}");
    Ok(())
}

fn equal(file: &Path, left: &str, right: &str, orbifold: bool) -> CliResult {
    let (_, lg) = load(file)?;
    let f = walks::parse_walk(&lg.graph, left)?;
    let h = walks::parse_walk(&lg.graph, right)?;
    let same = if orbifold {
        groupoid::orbifold_equal(&lg, &f, &h)?
    } else {
        if (f.start, f.end) != (h.start, h.end) {
            return Err(Error::EndpointMismatch {
                left: format!("{} .. {}", lg.graph.vertex_label(f.start), lg.graph.vertex_label(f.end)),
                right: format!("{} .. {}", lg.graph.vertex_label(h.start), lg.graph.vertex_label(h.end)),
            }
            .into());
        }
        f == h
    };
    if same {
        println!("equal");
        Ok(())
    } else {
        println!("not equal");
        Err(Failure { code: 1, message: String::new() })
    }
}

fn order2(file: &Path, walk: &str) -> CliResult {
    let (_, lg) = load(file)?;
    let w = walks::parse_walk(&lg.graph, walk)?;
    println!("{}", groupoid::is_order_two(&lg, &w)?);
    Ok(())
}

fn moves(m: &MoveArgs) -> CliResult<Vec<FlipMove>> {
    if let Some(path) = &m.script {
        return Ok(flips::parse_script(&read(path)?)?);
    }
    Ok(m.mv.iter().map(|s| flips::parse_move(s)).collect::<Result<Vec<_>, _>>()?)
}

fn flip(file: &Path, m: &MoveArgs) -> CliResult {
    let (t, _) = load(file)?;
    let steps = flips::run_script(&t, &moves(m)?)?;
    let last = steps.last().map_or(&t, |f| &f.after);
    println!("{}", TriangulationDocument::from_triangulation(last).to_json());
    Ok(())
}

fn transport(file: &Path, walk: &str, m: &MoveArgs, closed: bool) -> CliResult {
    let (t, lg) = load(file)?;
    let steps = flips::run_script(&t, &moves(m)?)?;
    if closed {
        let mut c = parse_closed(&lg, walk)?;
        for f in &steps {
            c = f.transport_closed(&c)?;
        }
        let g = &steps.last().map_or(&lg, |f| f.new_graph()).graph;
        println!("{}", format_walk(g, c.representative()));
    } else {
        let mut w = walks::parse_walk(&lg.graph, walk)?;
        for f in &steps {
            w = f.transport(&w)?;
        }
        let g = &steps.last().map_or(&lg, |f| f.new_graph()).graph;
        println!("{}", format_walk(g, &w));
    }
    Ok(())
}

fn dot_cmd(file: &Path, plain: bool, walk: Option<&str>) -> CliResult {
    let (t, lg) = load(file)?;
    let name = file.file_stem().and_then(|s| s.to_str()).unwrap_or("triangulation");
    if plain {
        if walk.is_some() {
            return Err(domain("--walk is only supported on the leafy dual graph"));
        }
        print!("{}", dot::to_dot(&t.dual_graph()?.graph, name, None));
    } else {
        let w = walk.map(|w| walks::parse_walk(&lg.graph, w)).transpose()?;
        print!("{}", dot::to_dot(&lg.graph, name, w.as_ref()));
    }
    Ok(())
}

fn run_selftest(a: &SelftestArgs) -> CliResult {
    if let Some(Fault::SkipSignCondition) = a.inject_fault {
        kinks::inject_fault_skip_sign_condition(true);
    }
    println!("# rng {}, seed {}, cases {}", selftest::RNG_NAME, a.seed, a.cases);
    let reports = thread_pool(a.jobs)?.install(|| selftest::run_all(a.seed, a.cases));
    for r in &reports {
        println!("{r}");
    }
    println!("{} suites run", reports.len());
    if selftest::all_gating_passed(&reports) {
        return Ok(());
    }
    for r in reports.iter().filter(|r| !r.advisory && !r.passed()) {
        if let Some(c) = &r.counterexample {
            println!("counterexample: {}", c.dump());
        }
    }
    Err(domain("self-test failed"))
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Normalize(args) => normalize(&args),
        Command::Kinks(a) => kinks_cmd(&a),
        Command::Signs(a) => signs(&a),
        Command::Equal {
            file,
            left,
            right,
            orbifold,
        } => equal(&file, &left, &right, orbifold),
        Command::Order2 { file, walk } => order2(&file, &walk),
        Command::Flip { file, moves } => flip(&file, &moves),
        Command::Transport {
            file,
            walk,
            moves,
            closed,
        } => transport(&file, &walk, &moves, closed),
        Command::Dot { file, plain, walk } => dot_cmd(&file, plain, walk.as_deref()),
        Command::Selftest(a) => run_selftest(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
