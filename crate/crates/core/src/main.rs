use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ccbs_core::bench::{self, BenchOptions, BenchRecord, Scenario};
use ccbs_core::ccbs::{solve_with, Aggregate, Heuristics, SolverConfig, Status, Variant};
use ccbs_core::graph::{generate_roadmap, load_movingai_map, load_scen, serialize_roadmap, RoadmapParams};
use ccbs_core::instance::{is_grid_map, load_graph, load_instance};
use ccbs_core::planfile::{parse_plans, serialize_plans};
use ccbs_core::render::render_svg;
use ccbs_core::validate::validate_solution;
use ccbs_core::DEFAULT_RADIUS;

#[derive(Parser)]
#[command(
    name = "ccbs",
    version,
    about = "Continuous-time conflict-based search for disk agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write its joint plan.
    Solve(SolveArgs),
    /// Run the incremental-agent benchmark and emit CSV.
    Bench(BenchArgs),
    /// Sample a random roadmap.
    GenRoadmap(GenArgs),
    /// Draw a joint plan as SVG.
    Render(RenderArgs),
    /// Median expansion ratio between two benchmark CSVs.
    Ratio(RatioArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// MovingAI map or roadmap file.
    #[arg(long)]
    map: PathBuf,
    /// Grid neighbourhood exponent: 2^k-connected.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Disk radius of every agent.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// MovingAI scenario (grid maps) or `start goal` task file (roadmaps).
    #[arg(long)]
    scen: PathBuf,
    /// Number of agents; defaults to every pair in the task file.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value = "ds+pc+h", value_parser = parse_variant)]
    variant: Variant,
    /// Impact aggregate used to pick conflicts: min, max or sum.
    #[arg(long, default_value = "min", value_parser = parse_aggregate)]
    aggregate: Aggregate,
    /// Seconds.
    #[arg(long, default_value_t = 30.0)]
    time_limit: f64,
    /// Plan file to write.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Scenario files or directories of `.scen` files.
    #[arg(long, required = true, num_args = 1..)]
    scen: Vec<PathBuf>,
    /// Comma-separated variants.
    #[arg(long, value_delimiter = ',', default_value = "vanilla,pc,ds,ds+pc,ds+pc+h", value_parser = parse_variant)]
    variant: Vec<Variant>,
    #[arg(long, default_value_t = 30.0)]
    time_limit: f64,
    /// Largest agent count to try.
    #[arg(long)]
    agents: Option<usize>,
    /// Leave runtime columns empty so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 32.0)]
    width: f64,
    #[arg(long, default_value_t = 32.0)]
    height: f64,
    #[arg(long, default_value_t = 200)]
    nodes: usize,
    /// Connection radius; defaults to 1.1 * sqrt(4 * area / (pi * nodes)).
    #[arg(long)]
    connect_radius: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// MovingAI map whose blocked cells the roadmap must avoid.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Distance kept from blocked cells.
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Plan file produced by `solve`.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatioArgs {
    /// Baseline CSV.
    a: PathBuf,
    /// Compared CSV.
    b: PathBuf,
    /// Variant to take from the baseline CSV.
    #[arg(long)]
    variant_a: Option<String>,
    /// Variant to take from the compared CSV.
    #[arg(long)]
    variant_b: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
        format!("unknown variant `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_aggregate(s: &str) -> Result<Aggregate, String> {
    match s {
        "min" => Ok(Aggregate::Min),
        "max" => Ok(Aggregate::Max),
        "sum" => Ok(Aggregate::Sum),
        _ => Err(format!("unknown aggregate `{s}` (expected min, max or sum)")),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn time_limit(seconds: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(seconds).with_context(|| format!("bad time limit {seconds}"))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let g = &args.graph;
    let instance = load_instance(&read(&g.map)?, &read(&args.scen)?, args.agents, g.k, g.radius)?;
    let mut config = SolverConfig::variant(args.variant);
    config.aggregate = args.aggregate;
    config.time_limit = time_limit(args.time_limit)?;

    let t0 = std::time::Instant::now();
    let heuristics = Heuristics::new(&instance);
    let sol = solve_with(&instance, &config, &heuristics, t0.elapsed());
    let solved = sol.status == Status::Solved;
    if solved {
        let report = validate_solution(&instance, &sol.plans);
        if !report.ok() {
            bail!("solver output failed validation:\n{report}");
        }
        if let Some(out) = &args.out {
            std::fs::write(out, serialize_plans(&sol.plans)).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    let record = BenchRecord {
        map: stem(&g.map),
        scen: stem(&args.scen),
        variant: args.variant.name().to_string(),
        n: instance.num_agents(),
        solved,
        soc: solved.then_some(sol.soc),
        expansions: sol.expanded,
        runtime: Some(sol.runtime.as_secs_f64()),
        precompute: Some(sol.precompute.as_secs_f64()),
    };
    let csv = bench::write_csv(&[record]);
    print!("{}", csv.lines().nth(1).map(|l| format!("{l}\n")).unwrap_or_default());
    Ok(match sol.status {
        Status::Solved => ExitCode::SUCCESS,
        Status::Timeout => ExitCode::from(2),
        Status::Infeasible => ExitCode::from(3),
    })
}

fn scenario_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "scen"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        bail!("no scenario files found");
    }
    Ok(files)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let g = &args.graph;
    let map_text = read(&g.map)?;
    if !is_grid_map(&map_text) {
        bail!("bench expects a MovingAI grid map");
    }
    let graph = load_graph(&map_text, g.k, g.radius)?;
    let scenarios = scenario_files(&args.scen)?
        .iter()
        .map(|f| {
            Ok(Scenario {
                name: stem(f),
                entries: load_scen(&read(f)?).with_context(|| format!("parsing {}", f.display()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = BenchOptions {
        time_limit: time_limit(args.time_limit)?,
        radius: g.radius,
        max_agents: args.agents,
        timing: !args.no_timing,
    };
    let records = bench::run_protocol(&stem(&g.map), &graph, &scenarios, &args.variant, &opts);
    emit(args.out.as_deref(), &bench::write_csv(&records))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_roadmap(args: GenArgs) -> Result<ExitCode> {
    let obstacles = match args.map.as_deref() {
        Some(p) => Some(load_movingai_map(&read(p)?).with_context(|| format!("parsing {}", p.display()))?),
        None => None,
    };
    let (width, height) = match &obstacles {
        Some(m) => (m.width() as f64, m.height() as f64),
        None => (args.width, args.height),
    };
    let connect_radius = args
        .connect_radius
        .unwrap_or_else(|| 1.1 * (4.0 * width * height / (std::f64::consts::PI * args.nodes as f64)).sqrt());
    let graph = generate_roadmap(&RoadmapParams {
        width,
        height,
        n_nodes: args.nodes,
        connect_radius,
        seed: args.seed,
        obstacles: obstacles.as_ref(),
        clearance: args.radius,
    })?;
    emit(args.out.as_deref(), &serialize_roadmap(&graph))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(args: RenderArgs) -> Result<ExitCode> {
    let g = &args.graph;
    let graph = load_graph(&read(&g.map)?, g.k, g.radius)?;
    let plans = parse_plans(&read(&args.plan)?).with_context(|| format!("parsing {}", args.plan.display()))?;
    let svg = render_svg(&graph, &plans, &vec![g.radius; plans.len()])?;
    emit(args.out.as_deref(), &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ratio(args: RatioArgs) -> Result<ExitCode> {
    let a = bench::parse_csv(&read(&args.a)?).with_context(|| format!("parsing {}", args.a.display()))?;
    let b = bench::parse_csv(&read(&args.b)?).with_context(|| format!("parsing {}", args.b.display()))?;
    let rows = bench::expansion_ratio(&a, args.variant_a.as_deref(), &b, args.variant_b.as_deref())?;
    emit(args.out.as_deref(), &bench::format_ratio_table(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::GenRoadmap(a) => cmd_gen_roadmap(a),
        Command::Render(a) => cmd_render(a),
        Command::Ratio(a) => cmd_ratio(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
