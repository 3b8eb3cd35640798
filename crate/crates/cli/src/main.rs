use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use congest_apsp::apsp::ApspConfig;
use congest_apsp::oracle::verify_run;
use congest_apsp::{generate_gnp, parse_graph, run_apsp, Error, GnpSpec, Graph, Run};

#[derive(Parser)]
#[command(name = "congest-apsp", version, about = "Simulate deterministic exact weighted APSP in the CONGEST model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol and write the distance matrix as TSV.
    Run(RunArgs),
    /// Write a seeded G(n, p) graph in edge-list format.
    Gen(GenArgs),
    /// Run over several sizes and seeds and emit a CSV of round counts.
    Bench(BenchArgs),
    /// Run the protocol and check it against the sequential oracles.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Edge-list file.
    #[arg(long, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Generator spec `gnp:n,p,wmax[,directed]`, seeded by --seed.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Hop parameter; defaults to ceil(sqrt(n * ceil(log2 n))).
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Matrix destination; standard output if omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Per-phase round reports as JSON lines.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Blocker selections as JSON lines.
    #[arg(long, value_name = "PATH")]
    audit: Option<PathBuf>,
    /// Compare the result with the oracles.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    wmax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    directed: bool,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Weight bound; n² if omitted.
    #[arg(long)]
    wmax: Option<u64>,
    #[arg(long)]
    directed: bool,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as JSON.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// An error with the exit status it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = match err.downcast_ref::<Error>() {
            Some(Error::Engine(_)) => 3,
            _ => 1,
        };
        Failure { code, err }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn parse_gen_spec(spec: &str, seed: u64) -> anyhow::Result<GnpSpec> {
    let body = spec.strip_prefix("gnp:").ok_or_else(|| anyhow!("generator spec must start with `gnp:`, got {spec:?}"))?;
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    let directed = match parts.get(3) {
        None => false,
        Some(&"directed") => true,
        Some(&"undirected") => false,
        Some(other) => bail!("expected `directed` or `undirected`, got {other:?}"),
    };
    if !(3..=4).contains(&parts.len()) {
        bail!("generator spec is `gnp:n,p,wmax[,directed]`, got {spec:?}");
    }
    Ok(GnpSpec {
        n: parts[0].parse().with_context(|| format!("bad n {:?}", parts[0]))?,
        p: parts[1].parse().with_context(|| format!("bad p {:?}", parts[1]))?,
        w_max: parts[2].parse().with_context(|| format!("bad wmax {:?}", parts[2]))?,
        seed,
        directed,
    })
}

fn load_graph(source: &Source, seed: u64) -> Result<Graph, Failure> {
    if let Some(path) = &source.graph {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let g = parse_graph(&text).map_err(Error::from).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(g);
    }
    let spec = parse_gen_spec(source.gen.as_deref().expect("clap enforces one source"), seed)?;
    Ok(generate_gnp(&spec).map_err(Error::from)?)
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn trace_lines(run: &Run) -> String {
    let mut out = String::new();
    for r in run.log.iter().chain([&run.steps.step1, &run.steps.blocker, &run.steps.sssp, &run.steps.bcast, &run.total]) {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    out
}

fn summary(run: &Run) -> String {
    let mut s = String::new();
    for r in [&run.steps.step1, &run.steps.blocker, &run.steps.sssp, &run.steps.bcast, &run.total] {
        let _ = writeln!(s, "{:<8} rounds {:>9}  messages {:>12}", r.phase, r.rounds, r.messages);
    }
    let _ = writeln!(s, "h = {}, |Q| = {}, budget = {}", run.h, run.blockers.len(), run.budget());
    s
}

fn cmd_run(args: &RunArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.source, args.seed)?;
    let run = run_apsp(&g, &ApspConfig { h: args.h })?;
    write_or_print(args.out.as_deref(), &run.distances.to_tsv())?;
    if let Some(path) = &args.trace {
        fs::write(path, trace_lines(&run)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.audit {
        fs::write(path, run.blockers.audit_jsonl()).with_context(|| format!("writing {}", path.display()))?;
    }
    eprint!("{}", summary(&run));
    if args.verify {
        let report = verify_run(&g, &run);
        eprint!("{report}");
        if !report.passed() {
            return Ok(2);
        }
    }
    Ok(0)
}

fn cmd_gen(args: &GenArgs) -> Result<u8, Failure> {
    let spec = GnpSpec { n: args.n, p: args.p, w_max: args.wmax, seed: args.seed, directed: args.directed };
    let g: Graph = generate_gnp(&spec).map_err(Error::from)?;
    write_or_print(args.out.as_deref(), &g.to_edge_list())?;
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Failure> {
    let mut csv = String::from("n,seed,h,rounds_total,rounds_step1,rounds_blocker,rounds_sssp,rounds_bcast,Q_size\n");
    let mut c_max: Option<f64> = None;
    for &n in &args.n {
        for &seed in &args.seeds {
            let w_max = args.wmax.unwrap_or((n * n) as u64);
            let spec = GnpSpec { n, p: args.p, w_max, seed, directed: args.directed };
            let g: Graph = generate_gnp(&spec).map_err(Error::from)?;
            let run = run_apsp(&g, &ApspConfig::default())?;
            let s = &run.steps;
            let _ = writeln!(
                csv,
                "{n},{seed},{},{},{},{},{},{},{}",
                run.h,
                run.total.rounds,
                s.step1.rounds,
                s.blocker.rounds,
                s.sssp.rounds,
                s.bcast.rounds,
                run.blockers.len()
            );
            let log = (n as f64).log2().ceil().max(1.0);
            let c = run.budget() as f64 / ((n as f64).powf(1.5) * log.sqrt());
            c_max = Some(c_max.map_or(c, |m: f64| m.max(c)));
        }
    }
    write_or_print(args.out.as_deref(), &csv)?;
    if let Some(c) = c_max {
        eprintln!("C = {c:.3} (max budget / (n^1.5 * sqrt(ceil(log2 n))))");
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let g = load_graph(&args.source, args.seed)?;
    let run = run_apsp(&g, &ApspConfig { h: args.h })?;
    let report = verify_run(&g, &run);
    print!("{report}");
    if let Some(path) = &args.json {
        fs::write(path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.passed() { 0 } else { 2 })
}
