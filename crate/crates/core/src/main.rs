use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use wmc::dimacs::parse_dimacs;
use wmc::generate::{generate_random, GenSpec};
use wmc::graphs::{dual_graph, primal_graph};
use wmc::oracle::brute_wmc;
use wmc::pathdecomp::{heuristic_decompose, PathDecomposition};
use wmc::pwdp::{dual_count, primal_count};
use wmc::reduce::checks::check_reduced;
use wmc::reduce::reduce_fixpoint;
use wmc::report::{Algorithm, RunReport};
use wmc::solver::{alg2cnf, alg3cnf, SearchStats, SolverConfig};
use wmc::{Error, Instance};

#[derive(Parser)]
#[command(name = "wmc", version, about = "Exact weighted model counting for 2-CNF and 3-CNF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Alg2,
    Alg3,
    Brute,
    PrimalPw,
    DualPw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Primal,
    Dual,
}

#[derive(Subcommand)]
enum Command {
    /// Print the weighted model count of a DIMACS file.
    Count {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        algo: Algo,
        #[arg(long)]
        alpha: Option<f64>,
        /// Write search statistics as JSON to this path.
        #[arg(long)]
        stats_json: Option<PathBuf>,
        #[arg(long)]
        brute_cap: Option<usize>,
        /// Fail when a branch or phase-three check does not hold.
        #[arg(long)]
        paranoid: bool,
    },
    /// Print a seeded random instance in DIMACS form.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        max_weight: u64,
    },
    /// Reduce a formula and report its structure.
    Check {
        file: PathBuf,
        /// Validate a decomposition file against the input's graph.
        #[arg(long)]
        decomp: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "primal")]
        graph: GraphKind,
        /// Write the chosen graph in DOT form.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Invariant(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    parse_dimacs(&text)
        .map(|p| p.instance)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn count(
    file: &Path,
    algo: Algo,
    alpha: Option<f64>,
    stats_json: Option<&Path>,
    brute_cap: Option<usize>,
    paranoid: bool,
) -> Result<(), Failure> {
    let inst = load(file)?;
    let f = &inst.formula;
    let mut cfg = SolverConfig { paranoid, ..SolverConfig::default() };
    if let Some(a) = alpha {
        cfg.alpha = a;
    }
    if let Some(c) = brute_cap {
        cfg.brute_cap = c;
    }
    let algorithm = match algo {
        Algo::Auto if f.is_k_cnf(2) => Algorithm::Alg2,
        Algo::Auto if f.is_k_cnf(3) => Algorithm::Alg3,
        Algo::Auto => {
            return Err(Failure::Usage(format!(
                "formula has a clause of length {}; only 2-CNF and 3-CNF are supported",
                f.max_clause_len()
            )))
        }
        Algo::Alg2 => Algorithm::Alg2,
        Algo::Alg3 => Algorithm::Alg3,
        Algo::Brute => Algorithm::Brute,
        Algo::PrimalPw => Algorithm::PrimalPw,
        Algo::DualPw => Algorithm::DualPw,
    };

    let start = Instant::now();
    let single = |widths: Vec<isize>| SearchStats { nodes: 1, widths, ..SearchStats::default() };
    let (result, stats) = match algorithm {
        Algorithm::Alg2 => alg2cnf(&inst, &cfg)?,
        Algorithm::Alg3 => alg3cnf(&inst, &cfg)?,
        Algorithm::Brute => (brute_wmc(f, &inst.weights)?, single(Vec::new())),
        Algorithm::PrimalPw => {
            let p = heuristic_decompose(&primal_graph(f));
            (primal_count(f, &inst.weights, &p)?, single(vec![p.width()]))
        }
        Algorithm::DualPw => {
            let p = heuristic_decompose(&dual_graph(f));
            (dual_count(f, &inst.weights, &p)?, single(vec![p.width()]))
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    println!("{result}");

    if let Some(path) = stats_json {
        let report = RunReport::new(
            algorithm,
            result.to_string(),
            !inst.weights.is_unweighted(),
            f.num_vars(),
            f.num_clauses(),
            elapsed,
            stats,
        );
        write(path, &report.to_json())?;
    }
    Ok(())
}

fn check(file: &Path, decomp: Option<&Path>, graph: GraphKind, dot: Option<&Path>) -> Result<bool, Failure> {
    let inst = load(file)?;
    let f = &inst.formula;
    let g = match graph {
        GraphKind::Primal => primal_graph(f),
        GraphKind::Dual => dual_graph(f),
    };
    if let Some(path) = dot {
        write(path, &g.to_dot(if graph == GraphKind::Primal { "x" } else { "C" }))?;
    }

    let two_cnf = f.is_k_cnf(2);
    let profile = f.degree_profile();
    println!("input: n={} m={} m2={} m3={} max_degree={}", f.num_vars(), f.num_clauses(), profile.m2(), profile.m3(), profile.max_degree);

    let cfg = SolverConfig::default();
    let r = reduce_fixpoint(&inst, &cfg.reduce)?;
    let reduced = &r.instance.formula;
    let rp = reduced.degree_profile();
    println!(
        "reduced: n={} m={} m2={} m3={} max_degree={} applications={} (bound {})",
        reduced.num_vars(),
        reduced.num_clauses(),
        rp.m2(),
        rp.m3(),
        rp.max_degree,
        r.applied.len(),
        r.initial_potential
    );
    let histogram: Vec<String> = rp.histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
    println!("degree histogram: {}", histogram.join(" "));
    if reduced.has_empty_clause() {
        println!("reduced formula contains an empty clause");
    }

    let mut ok = r.applied.len() <= r.initial_potential;
    let violations = check_reduced(&r.instance, two_cnf, &cfg.reduce)?;
    if reduced.has_empty_clause() {
        println!("reduced-structure checks: skipped");
    } else if violations.is_empty() {
        println!("reduced-structure checks: all hold{}", if two_cnf { " (2-CNF checks included)" } else { "" });
    } else {
        ok = false;
        for v in &violations {
            println!("violation: {v}");
        }
    }

    if let Some(path) = decomp {
        let p = PathDecomposition::from_text(&read(path)?)?;
        match p.validate(&g) {
            Ok(()) => println!("decomposition: valid, width {}", p.width()),
            Err(v) => {
                ok = false;
                println!("decomposition: invalid, {v}");
            }
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Count { file, algo, alpha, stats_json, brute_cap, paranoid } => {
            count(&file, algo, alpha, stats_json.as_deref(), brute_cap, paranoid).map(|()| true)
        }
        Command::Gen { vars, clauses, width, seed, max_weight } => {
            let spec = GenSpec { vars, clauses, width, max_weight, seed };
            print!("{}", generate_random(&spec)?);
            Ok(true)
        }
        Command::Check { file, decomp, graph, dot } => check(&file, decomp.as_deref(), graph, dot.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
