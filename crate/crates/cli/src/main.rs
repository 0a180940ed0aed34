use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pd_core::bench::{run_bench, summarize, write_csv, BenchBackend, BenchSpec};
use pd_core::query::{build_system, check, literal_bounds, solve_framework, Pipeline};
use pd_core::reasoner::{aa_to_pd, label_aa};
use pd_core::report::{build_report, render_table};
use pd_core::solver::is_feasible;
use pd_core::{
    marginal, parse_aa, parse_pd, serialize_pd, Backend, EntropyMode, PDFramework, PdError, SolverConfig,
    WorldMode,
};

#[derive(Parser)]
#[command(name = "pd", version, about = "Probabilistic deduction over p-rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the rules have a model under the chosen world mode.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Pcwa)]
        mode: ModeArg,
    },
    /// Solve for a joint distribution and report everything derived from it.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Probability of one literal.
    Query {
        file: PathBuf,
        #[arg(long)]
        literal: String,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Arguments, their probabilities and attacks.
    Args {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Probabilistic labelling of an abstract argumentation graph.
    Label {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Translate an argumentation graph (.aaf/.apx) into p-rules.
    Convert {
        file: PathBuf,
        /// Write here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Race solvers on random satisfiable rule sets.
    Bench {
        #[arg(long, default_value_t = 6)]
        literals: usize,
        #[arg(long, default_value_t = 64)]
        rules: usize,
        /// Longest rule, head included.
        #[arg(long)]
        max_body: Option<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, value_delimiter = ',', default_value = "sgd,direct-entropy")]
        backends: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Include system construction in the timings.
        #[arg(long)]
        include_build: bool,
        #[arg(long, value_enum, default_value_t = OutArg::Csv)]
        out: OutArg,
    },
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Pcwa)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = EntropyArg::Max)]
    entropy: EntropyArg,
    #[arg(long, value_enum, default_value_t = SolverArg::Direct)]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Threshold for in/out labels.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Also report the tightest probability bounds.
    #[arg(long)]
    bounds: bool,
    /// Minimise the L1 violation of the rules instead of solving exactly.
    #[arg(long)]
    relax: bool,
    /// Write the linear system as CSV.
    #[arg(long, value_name = "PATH")]
    dump_system: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutArg::Json)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Owa,
    Pcwa,
}

#[derive(Clone, Copy, ValueEnum)]
enum EntropyArg {
    None,
    Linear,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Sgd,
    Direct,
    Lp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutArg {
    Json,
    Csv,
}

impl From<ModeArg> for WorldMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Owa => WorldMode::Owa,
            ModeArg::Pcwa => WorldMode::Pcwa,
        }
    }
}

impl SolveArgs {
    fn pipeline(&self) -> Pipeline {
        let entropy = match self.entropy {
            EntropyArg::None => EntropyMode::None,
            EntropyArg::Linear => EntropyMode::Linear,
            EntropyArg::Max => EntropyMode::Max,
        };
        let backend = match (self.entropy, self.solver) {
            (EntropyArg::Max, _) => Backend::Newton,
            (_, SolverArg::Sgd) => Backend::Sgd,
            (_, SolverArg::Direct) => Backend::Direct,
            (_, SolverArg::Lp) => Backend::Lp,
        };
        Pipeline {
            mode: self.mode.into(),
            entropy,
            backend,
            config: SolverConfig { tol: self.tol, seed: self.seed, ..SolverConfig::default() },
            relax: self.relax,
        }
    }

    fn dump(&self, fw: &PDFramework) -> Result<(), Failure> {
        if let Some(path) = &self.dump_system {
            let system = build_system(fw, self.mode.into())?;
            let file = fs::File::create(path).map_err(|e| Failure::io(path, e))?;
            system.write_csv(io::BufWriter::new(file))?;
        }
        Ok(())
    }
}

/// Exit status 1 for usage, IO and parse errors, 2 for inputs without a model.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { message: message.into(), code: 1 }
    }

    fn semantic(message: impl Into<String>) -> Self {
        Failure { message: message.into(), code: 2 }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure::usage(format!("{}: {e}", path.display()))
    }
}

impl From<PdError> for Failure {
    fn from(e: PdError) -> Self {
        let code = if e.is_semantic() { 2 } else { 1 };
        Failure { message: e.to_string(), code }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_pd(path: &Path) -> Result<PDFramework, Failure> {
    let text = read(path)?;
    parse_pd(&text).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn emit_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { file, mode } => {
            let fw = load_pd(&file)?;
            let mode: WorldMode = mode.into();
            let (_, excess) = is_feasible(&build_system(&fw, mode)?)?;
            let outcome = check(&fw, mode);
            let status = match &outcome {
                Ok(()) => "satisfiable",
                Err(PdError::NotRulePsat) => "not-rule-psat",
                Err(PdError::NotPcwaConsistent) => "not-pcwa-consistent",
                Err(_) => "error",
            };
            emit_json(&json!({
                "mode": mode,
                "satisfiable": outcome.is_ok(),
                "status": status,
                "residual": excess,
                "rules": fw.rules.len(),
                "atoms": fw.n_atoms(),
            }));
            eprintln!("{status} (residual {excess:.3e})");
            outcome.map_err(Failure::from)
        }
        Command::Solve { file, solve } => {
            let fw = load_pd(&file)?;
            solve.dump(&fw)?;
            let report = build_report(&fw, &solve.pipeline(), solve.bounds, solve.epsilon)?;
            eprint!("{}", render_table(&report));
            if solve.out == OutArg::Csv {
                println!("world,probability");
                for w in &report.worlds {
                    println!("{},{}", w.world, w.probability);
                }
            } else {
                emit_json(&serde_json::to_value(&report).expect("report serializes"));
            }
            Ok(())
        }
        Command::Query { file, literal, solve } => {
            let fw = load_pd(&file)?;
            let lit = fw.literal(&literal)?;
            solve.dump(&fw)?;
            let pipeline = solve.pipeline();
            let solved = solve_framework(&fw, &pipeline)?;
            let p = marginal(&solved.dist, &[lit]);
            let bounds = if solve.bounds { Some(literal_bounds(&fw, lit, pipeline.mode)?) } else { None };
            let name = fw.literal_name(lit);
            match bounds {
                Some((lo, hi)) => eprintln!("Pr({name}) = {p:.6}  bounds [{lo:.6}, {hi:.6}]"),
                None => eprintln!("Pr({name}) = {p:.6}"),
            }
            if solve.out == OutArg::Csv {
                match bounds {
                    Some((lo, hi)) => println!("literal,probability,lower,upper\n{},{p},{lo},{hi}", csv_field(&name)),
                    None => println!("literal,probability\n{},{p}", csv_field(&name)),
                }
            } else {
                let mut doc = json!({
                    "literal": name,
                    "probability": p,
                    "converged": solved.converged,
                    "residual": solved.dist.residual,
                    "mode": solved.dist.mode,
                });
                if let Some((lo, hi)) = bounds {
                    doc["bounds"] = json!([lo, hi]);
                }
                emit_json(&doc);
            }
            Ok(())
        }
        Command::Args { file, solve } => {
            let fw = load_pd(&file)?;
            solve.dump(&fw)?;
            let report = build_report(&fw, &solve.pipeline(), false, solve.epsilon)?;
            eprint!("{}", render_table(&report));
            if solve.out == OutArg::Csv {
                println!("id,claim,support,probability,label");
                for a in &report.arguments {
                    let label = serde_json::to_value(a.label).expect("label serializes");
                    println!(
                        "{},{},{},{},{}",
                        a.id,
                        csv_field(&a.claim),
                        csv_field(&a.support.join(" ")),
                        a.probability,
                        label.as_str().unwrap_or_default()
                    );
                }
            } else {
                emit_json(&json!({
                    "arguments": report.arguments,
                    "attacks": report.attacks,
                    "converged": report.converged,
                }));
            }
            Ok(())
        }
        Command::Label { file, solve } => {
            let text = read(&file)?;
            let graph = parse_aa(&text).map_err(|e| Failure::usage(format!("{}:{e}", file.display())))?;
            let refuse = |detail: String| Failure::semantic(format!("no consistent labelling under PD semantics ({detail})"));
            let result = match label_aa(&graph, &solve.pipeline(), solve.epsilon) {
                Ok(r) => r,
                Err(e) if e.is_semantic() => return Err(refuse(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            if !result.complete {
                return Err(refuse("labelling is not complete".into()));
            }
            let entries: Vec<Value> = graph
                .arguments
                .iter()
                .zip(&result.probabilities)
                .zip(&result.labelling.labels)
                .map(|((name, p), label)| json!({ "argument": name, "probability": p, "label": label }))
                .collect();
            for e in &entries {
                eprintln!("{:<12} {:>8.4}  {}", e["argument"].as_str().unwrap_or(""), e["probability"], e["label"]);
            }
            if solve.out == OutArg::Csv {
                println!("argument,probability,label");
                for e in &entries {
                    println!(
                        "{},{},{}",
                        csv_field(e["argument"].as_str().unwrap_or("")),
                        e["probability"],
                        e["label"].as_str().unwrap_or("")
                    );
                }
            } else {
                emit_json(&json!({ "epsilon": solve.epsilon, "complete": true, "arguments": entries }));
            }
            Ok(())
        }
        Command::Convert { file, output } => {
            let text = read(&file)?;
            let fw = match parse_aa(&text) {
                Ok(graph) => aa_to_pd(&graph),
                Err(aa_err) => parse_pd(&text).map_err(|_| Failure::usage(format!("{}:{aa_err}", file.display())))?,
            };
            let rendered = serialize_pd(&fw);
            match output {
                Some(path) => fs::write(&path, rendered).map_err(|e| Failure::io(&path, e))?,
                None => print!("{rendered}"),
            }
            Ok(())
        }
        Command::Bench { literals, rules, max_body, reps, backends, seed, tol, include_build, out } => {
            let backends = backends
                .iter()
                .map(|b| b.trim().parse::<BenchBackend>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(e.to_string()))?;
            let spec = BenchSpec {
                max_body,
                backends,
                repetitions: reps,
                include_build,
                config: SolverConfig { tol, seed, ..SolverConfig::default() },
                ..BenchSpec::new(literals, rules, seed)
            };
            let rows = run_bench(&spec).map_err(|e| Failure::usage(e.to_string()))?;
            let summary = summarize(&rows);
            for s in &summary {
                eprintln!(
                    "{:<15} runs {:>3}  mean {:>10.3} ms  converged {:>5.1}%  residual {:.2e}  entropy {:.4} bits",
                    s.backend.name(),
                    s.runs,
                    s.mean_wall_ms,
                    100.0 * s.convergence_rate,
                    s.mean_residual,
                    s.mean_entropy_bits
                );
            }
            match out {
                OutArg::Csv => {
                    let stdout = io::stdout();
                    write_csv(&rows, stdout.lock())?;
                }
                OutArg::Json => emit_json(&json!({ "rows": rows, "summary": summary })),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("pd: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
