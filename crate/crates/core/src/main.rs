use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qtg_qaoa::experiment::{
    load_instances, report_figures, run_benchmark, write_timings, EngineBudgets, ExperimentSpec, GenerateSpec,
    InstanceSource,
};
use qtg_qaoa::knapsack::{lazy_greedy, read_instance, solve_exact_dp, very_greedy, InstanceClass};
use qtg_qaoa::optimize::OptimizeConfig;
use qtg_qaoa::qaoa::{CircuitConfig, Engine};
use qtg_qaoa::qtg::{build_superposition, BiasConfig};
use qtg_qaoa::resources::{copula_cycles, qtg_cycles, write_cycles_csv, LayeredToffoliAdderModel};
use qtg_qaoa::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "qtg-qaoa", version, about = "Knapsack QAOA simulator: QTG mixer vs. copula baseline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize angles on an instance set and write figure CSVs.
    Bench(BenchArgs),
    /// Print a summary of one instance file.
    Inspect { file: PathBuf },
    /// Cycle counts only, no simulation.
    Cycles(CyclesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineChoice {
    Qtg,
    Copula,
    Both,
}

impl EngineChoice {
    fn engines(self) -> Vec<Engine> {
        match self {
            EngineChoice::Qtg => vec![Engine::Qtg],
            EngineChoice::Copula => vec![Engine::Copula],
            EngineChoice::Both => vec![Engine::Qtg, Engine::Copula],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassChoice {
    Uncorrelated,
    StronglyCorrelated,
}

#[derive(Args)]
struct SourceArgs {
    /// Directory of instance files.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    instances: Option<PathBuf>,
    /// Comma-separated item counts to generate random instances for.
    #[arg(long, value_delimiter = ',')]
    generate: Option<Vec<usize>>,
    /// Generated instances per item count.
    #[arg(long, default_value_t = 10)]
    per_n: usize,
    /// Profit/weight relation of generated instances.
    #[arg(long, value_enum, default_value = "uncorrelated")]
    class: ClassChoice,
    #[arg(long, default_value_t = 0.5)]
    capacity_ratio: f64,
    #[arg(long, default_value_t = 100)]
    max_profit: u64,
    #[arg(long, default_value_t = 100)]
    max_weight: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SourceArgs {
    fn source(&self) -> InstanceSource {
        match (&self.instances, &self.generate) {
            (Some(dir), _) => InstanceSource::Dir(dir.clone()),
            (None, Some(ns)) => InstanceSource::Generate(GenerateSpec {
                class: match self.class {
                    ClassChoice::Uncorrelated => InstanceClass::Uncorrelated,
                    ClassChoice::StronglyCorrelated => InstanceClass::StronglyCorrelated,
                },
                ns: ns.clone(),
                per_n: self.per_n,
                max_profit: self.max_profit,
                max_weight: self.max_weight,
                capacity_ratio: self.capacity_ratio,
                seed: self.seed,
            }),
            (None, None) => unreachable!("clap enforces a source"),
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "both")]
    engine: EngineChoice,
    /// Comma-separated circuit depths.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    q: Vec<usize>,
    /// Logistic steepness of the copula warm start.
    #[arg(long, default_value_t = qtg_qaoa::qaoa::DEFAULT_COPULA_K)]
    k: f64,
    /// Grid points per angle axis.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// Evaluation budget of each joint refinement.
    #[arg(long, default_value_t = 2000)]
    max_evals: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value_t = 24)]
    copula_max_n: usize,
    #[arg(long, default_value_t = 34)]
    qtg_max_n: usize,
}

#[derive(Args)]
struct CyclesArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "both")]
    engine: EngineChoice,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    q: Vec<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        Error::ResourceLimit(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Inspect { file } => inspect(&file),
        Command::Cycles(args) => cycles(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn bench(args: BenchArgs) -> Result<u8, Error> {
    let spec = ExperimentSpec {
        source: args.source.source(),
        engines: args.engine.engines(),
        qs: args.q,
        circuit: CircuitConfig {
            bias: BiasConfig::Uniform,
            copula_k: args.k,
        },
        optimize: OptimizeConfig {
            grid_points: args.grid,
            local_max_evals: args.max_evals,
            seed: args.source.seed,
            ..OptimizeConfig::default()
        },
        budgets: EngineBudgets {
            copula_max_n: args.copula_max_n,
            qtg_max_n: args.qtg_max_n,
        },
    };
    let outcome = run_benchmark(&spec)?;
    for s in &outcome.skipped {
        let engine = s.engine.map(|e| e.to_string()).unwrap_or_else(|| "all".into());
        eprintln!("skipped {} ({engine}): {}", s.instance, s.reason);
    }
    if outcome.rows.is_empty() {
        eprintln!("error: no runs completed");
        return Ok(if outcome.skipped.is_empty() { EXIT_USAGE } else { EXIT_BUDGET });
    }
    report_figures(&outcome.rows, &args.out)?;
    write_timings(&outcome.rows, &args.out.join("timings.csv"))?;
    eprintln!("wrote {} rows to {}", outcome.rows.len(), args.out.display());
    Ok(0)
}

fn inspect(file: &std::path::Path) -> Result<u8, Error> {
    let inst = read_instance(file)?;
    let exact = solve_exact_dp(&inst)?;
    let lg = lazy_greedy(&inst);
    let vg = very_greedy(&inst);
    println!("instance: {}", inst.name());
    println!("n: {}", inst.n());
    println!("capacity: {}", inst.capacity());
    println!("f_opt: {}", exact.optimum);
    println!("optimal_packing: {}", exact.witness);
    println!("lazy_greedy: {}", lg.total_profit);
    println!("very_greedy: {}", vg.total_profit);
    match lg.r_stop {
        Some(r) => println!("r_stop: {r} ({:.6})", r.as_f64()),
        None => println!("r_stop: none (all items fit)"),
    }
    if inst.n() <= 25 {
        let sup = build_superposition(&inst, &BiasConfig::Uniform)?;
        println!("feasible_states: {}", sup.len());
        println!("qtg_min_amplitude: {:.12e}", sup.min_amplitude());
        println!("qtg_max_amplitude: {:.12e}", sup.max_amplitude());
    } else {
        println!("feasible_states: skipped (n > 25)");
    }
    Ok(0)
}

fn cycles(args: CyclesArgs) -> Result<u8, Error> {
    let instances = load_instances(&args.source.source())?;
    let mut reports = Vec::new();
    for inst in &instances {
        for &q in &args.q {
            for engine in args.engine.engines() {
                reports.push(match engine {
                    Engine::Qtg => qtg_cycles(inst, q, &LayeredToffoliAdderModel)?,
                    Engine::Copula => copula_cycles(inst.n(), q)?,
                });
            }
        }
    }
    match args.out {
        Some(path) => write_cycles_csv(&reports, std::fs::File::create(path)?)?,
        None => write_cycles_csv(&reports, std::io::stdout().lock())?,
    }
    Ok(0)
}
