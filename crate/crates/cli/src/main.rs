use std::fs::{self, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use transversal::generators::{GeneratorKind, GeneratorSpec};
use transversal::harness::{bench, replay, run_suite, BenchKind, BenchRow, BenchSpec, InstanceRecord, Mode, SuiteKind, SuiteReport, SuiteSpec, Verdict};
use transversal::oracle::{SearchBudget, Shape};
use transversal::pipeline::{solve, PipelineParams, SolveMode};
use transversal::{Ratio, TournamentCollection};

#[derive(Parser)]
#[command(name = "transversal", version, about = "Transversal Hamilton paths and cycles in tournament collections")]
struct Cli {
    /// Base seed for generators, suites and the constructive branch.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Reports do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Node budget of every exact search.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Wall-clock budget of every exact search, in seconds.
    #[arg(long, global = true)]
    budget_secs: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generated collection as JSON.
    Gen {
        /// Generator: transitive, random_uniform, random_strongly_connected,
        /// directed_cycle_tournament, prop14_collection,
        /// fig1_path_counterexample, fig1_cycle_counterexample.
        kind: String,
        #[arg(short, default_value_t = 3)]
        n: usize,
        #[arg(short, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance read from a file (or stdin with `-`).
    Solve(SolveArgs),
    /// Run a verification suite and append its report.
    Verify(VerifyArgs),
    /// Time a building block over a range of sizes.
    Bench {
        /// oracle, h_partition, one_spare or pipeline.
        kind: String,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// Append the report here as one JSON line.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Path,
    Cycle,
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ShapeArg::Path)]
    mode: ShapeArg,
    /// Constructive branch only; failure is reported as budget_exhausted.
    #[arg(long, conflicts_with_all = ["exact", "auto"])]
    constructive: bool,
    /// Exact oracle only.
    #[arg(long, conflicts_with = "auto")]
    exact: bool,
    /// Oracle up to the fallback size, constructive above with oracle fallback (default).
    #[arg(long)]
    auto: bool,
    #[arg(long)]
    mu: Option<Ratio>,
    #[arg(long)]
    gamma: Option<Ratio>,
    #[arg(long)]
    beta: Option<Ratio>,
    #[arg(long)]
    alpha: Option<Ratio>,
    #[arg(long)]
    fallback_n: Option<usize>,
    /// Write the stage trace (JSON lines) here instead of stderr.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: theorem_path, theorem_cycle, prop14, oracles, agreement_path,
    /// agreement_cycle, scale_path, scale_cycle, h_partition, low_degree,
    /// absorber, one_spare, forcing_color, forcing_set, connect.
    suite: String,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long)]
    n_max: Option<usize>,
    /// Enumerate every labeled instance instead of sampling.
    #[arg(long)]
    exhaustive: bool,
    /// Instances per size in random mode.
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    /// Count counterexample classes up to relabeling.
    #[arg(long)]
    canonical: bool,
    /// Append the report here as one JSON line.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Re-run the failure and counterexample records of a saved report.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn parse_name<T>(s: &str, from: impl Fn(&str) -> Option<T>, what: &str) -> Result<T> {
    from(&s.replace('-', "_")).with_context(|| format!("unknown {what} `{s}`"))
}

fn budget(cli: &Cli) -> SearchBudget {
    let mut b = SearchBudget::unlimited();
    b.max_nodes = cli.budget_nodes;
    if let Some(s) = cli.budget_secs {
        b = b.with_time_limit(Duration::from_secs_f64(s));
    }
    b
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    writeln!(f, "{line}")?;
    Ok(())
}

fn print_report(cli: &Cli, r: &SuiteReport) {
    match cli.format {
        Format::Json => println!("{}", r.to_json_line()),
        Format::Csv => {
            println!("{}", SuiteReport::csv_header());
            println!("{}", r.csv_row());
        }
    }
}

fn cmd_gen(kind: &str, n: usize, m: usize, out: Option<&Path>, seed: u64) -> Result<ExitCode> {
    let kind: GeneratorKind = parse_name(kind, |s| serde_json::from_value(s.into()).ok(), "generator")?;
    let t = GeneratorSpec { kind, n, m, seed }.generate()?;
    let json = t.to_json();
    match out {
        Some(p) => fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Result<ExitCode> {
    let t = TournamentCollection::from_json(&read_input(&a.input)?)?;
    let mut params = PipelineParams::default();
    params.mu = a.mu.unwrap_or(params.mu);
    params.gamma = a.gamma.unwrap_or(params.gamma);
    params.beta = a.beta.unwrap_or(params.beta);
    params.alpha = a.alpha.unwrap_or(params.alpha);
    params.oracle_fallback_n = a.fallback_n.unwrap_or(params.oracle_fallback_n);
    let params = params.with_seed(cli.seed).with_budget(budget(cli));
    params.validate()?;
    let mode = if a.constructive {
        SolveMode::Constructive
    } else if a.exact {
        SolveMode::Exact
    } else {
        SolveMode::Auto
    };
    let shape = match a.mode {
        ShapeArg::Path => Shape::Path,
        ShapeArg::Cycle => Shape::Cycle,
    };
    let report = solve(&t, shape, mode, &params)?;
    let trace = report.trace.to_jsonl();
    match &a.trace {
        Some(p) => fs::write(p, trace)?,
        None => eprint!("{trace}"),
    }
    println!("{}", serde_json::to_string(&report.outcome)?);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<ExitCode> {
    let kind = parse_name(&a.suite, SuiteKind::from_name, "suite")?;
    let mode = if a.exhaustive { Mode::Exhaustive } else { Mode::Random };
    let spec = SuiteSpec::new(kind, a.n_min, a.n_max.unwrap_or(a.n_min), mode, a.seeds)
        .with_seed(cli.seed)
        .with_jobs(cli.jobs)
        .with_budget(budget(cli))
        .with_params(PipelineParams::default().with_seed(cli.seed).with_budget(budget(cli)))
        .with_canonical(a.canonical);
    if let Some(path) = &a.replay {
        return replay_file(&spec, path);
    }
    let report = run_suite(&spec)?;
    print_report(cli, &report);
    if let Some(p) = &a.report {
        append_line(p, &report.to_json_line())?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn replay_file(spec: &SuiteSpec, path: &Path) -> Result<ExitCode> {
    let text = read_input(path)?;
    let mut mismatches = 0;
    let mut replayed = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let report: SuiteReport = serde_json::from_str(line).context("parsing report line")?;
        if report.suite != spec.kind.name() {
            continue;
        }
        let tagged = |list: &[InstanceRecord], tag: &'static str| list.iter().map(move |r| (r.clone(), tag)).collect::<Vec<_>>();
        let mut records = tagged(&report.failures, "fail");
        records.extend(tagged(&report.counterexamples, "counterexample"));
        records.extend(tagged(&report.exhausted, "exhausted"));
        for (rec, tag) in records {
            replayed += 1;
            let v = replay(spec, &rec)?;
            let same = matches!(
                (&v, tag),
                (Verdict::Fail(_), "fail") | (Verdict::Counterexample(_), "counterexample") | (Verdict::Exhausted(_), "exhausted")
            );
            if !same {
                mismatches += 1;
                println!("{}", serde_json::json!({"n": rec.n, "index": rec.index, "recorded": tag, "replayed": v}));
            }
        }
    }
    println!("{}", serde_json::json!({"replayed": replayed, "mismatches": mismatches}));
    Ok(if mismatches == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_bench(cli: &Cli, kind: &str, sizes: &[usize], seeds: u64, report_path: Option<&Path>) -> Result<ExitCode> {
    let kind = parse_name(kind, BenchKind::from_name, "bench kind")?;
    if sizes.is_empty() {
        bail!("no sizes given");
    }
    let mut spec = BenchSpec::new(kind, sizes.to_vec(), seeds);
    spec.base_seed = cli.seed;
    spec.jobs = if cli.jobs == 0 { 1 } else { cli.jobs };
    if cli.budget_nodes.is_some() || cli.budget_secs.is_some() {
        spec.budget = budget(cli);
    }
    let report = bench(&spec)?;
    match cli.format {
        Format::Csv => {
            println!("{}", BenchRow::csv_header());
            for row in report.timing.iter().flat_map(|t| &t.bench_rows) {
                println!("{}", row.csv_row());
            }
        }
        Format::Json => println!("{}", report.to_json_line()),
    }
    if let Some(p) = report_path {
        append_line(p, &report.to_json_line())?;
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Gen { kind, n, m, out } => cmd_gen(kind, *n, *m, out.as_deref(), cli.seed),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Bench {
            kind,
            sizes,
            seeds,
            report,
        } => cmd_bench(cli, kind, sizes, *seeds, report.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
