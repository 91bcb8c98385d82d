use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use conrel::generator::{generate_affine, paper_suite, Plan};
use conrel::gradient::{gradient_relationship, GradientMode, DEFAULT_STEP};
use conrel::graph::{decompose, infer_transitive};
use conrel::independence::{effective_supports, verdict_from_supports};
use conrel::pairwise::{analyze_pair, crossing_count, DEFAULT_EPS_TIE};
use conrel::plot::{emit_matrix_csv, emit_parallel_coordinates_svg, emit_scatter_svg};
use conrel::problem::{Problem, SamplingStrategy, DEFAULT_EPS_FEAS};
use conrel::report::{
    analyze, named_supports, AnalysisConfig, AnalysisReport, Namer, DEFAULT_SAMPLES,
};
use conrel::Error;

#[derive(Parser)]
#[command(
    name = "conrel",
    version,
    about = "Pairwise constraint relationship analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Sampling {
    /// Number of sampled points.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// uniform, lhs or grid.
    #[arg(long, default_value = "lhs")]
    strategy: SamplingStrategy,
    #[arg(long, default_value_t = DEFAULT_EPS_TIE)]
    eps_tie: f64,
    #[arg(long, default_value_t = DEFAULT_EPS_FEAS)]
    eps_feas: f64,
    /// symbolic or fd.
    #[arg(long, default_value = "symbolic")]
    gradients: GradientMode,
    /// Central-difference step.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
}

impl Sampling {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            samples: self.samples,
            strategy: self.strategy,
            eps_tie: self.eps_tie,
            eps_feas: self.eps_feas,
            gradient_mode: self.gradients,
            step: self.step,
            ..AnalysisConfig::with_seed(self.seed)
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    Affine,
    Paper,
}

#[derive(Copy, Clone, ValueEnum)]
enum PlotKind {
    Parallel,
    Scatter,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline; writes a JSON report.
    Analyze {
        problem: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        out: PathBuf,
        /// Also write the relationship matrix as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One constraint pair with full evidence.
    Pair {
        problem: PathBuf,
        #[arg(short = 'i')]
        first: String,
        #[arg(short = 'j')]
        second: String,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        svg_parallel: Option<PathBuf>,
        #[arg(long)]
        svg_scatter: Option<PathBuf>,
    },
    /// Gradient-direction aggregates for every pair.
    Gradients {
        problem: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Split into independent sub-problems.
    Decompose {
        problem: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Transitive inference over the graph stored in a report.
    Infer {
        #[arg(long)]
        report: PathBuf,
    },
    /// Write generated problems.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// `random`, a label for all pairs (TH, TC, IND) or `1-2:TH,2-3:TC,...`.
        #[arg(long, default_value = "random")]
        plan: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Problem file (affine) or output directory (paper).
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Render one pair of a report as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        /// Two constraint names separated by a comma.
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_problem(path: &Path) -> Result<Problem, Error> {
    Problem::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(inner) => Error::Validation(format!(
            "{}: line {}, column {}: {inner}",
            path.display(),
            inner.line(),
            inner.column()
        )),
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn constraint_index(problem: &Problem, name: &str) -> Result<usize, Error> {
    problem
        .constraint_index(name)
        .ok_or_else(|| Error::Validation(format!("no constraint named `{name}`")))
}

#[derive(Serialize)]
struct PairOutput {
    pair: conrel::report::PairRecord,
    crossings: u64,
    independence: conrel::report::IndependenceRecord,
    gradient: conrel::report::GradientRecord,
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze {
            problem,
            sampling,
            out,
            csv,
        } => {
            let problem = load_problem(&problem)?;
            let report = analyze(&problem, &sampling.config())?;
            write(&out, &report.to_json())?;
            if let Some(csv) = csv {
                emit_matrix_csv(&report.graph()?, &csv)?;
            }
            eprintln!(
                "analyzed {} constraint pairs of `{}` -> {}",
                report.pairs.len(),
                problem.name(),
                out.display()
            );
        }
        Command::Pair {
            problem,
            first,
            second,
            sampling,
            svg_parallel,
            svg_scatter,
        } => {
            let problem = load_problem(&problem)?;
            let (i, j) = (
                constraint_index(&problem, &first)?,
                constraint_index(&problem, &second)?,
            );
            let config = sampling.config();
            let samples = config.sample(&problem)?;
            let verdict = analyze_pair(&problem, i, j, &samples, config.eps_tie)?;
            let (vi, vj) = (samples.column(i), samples.column(j));
            let crossings = crossing_count(&vi, &vj, config.eps_tie)?;
            let supports =
                effective_supports(&problem, &samples, config.probe_fraction, config.eps_value)?;
            let independence = verdict_from_supports(&problem, i, j, &supports)?;
            let gradient =
                gradient_relationship(&problem, i, j, &samples, config.gradient_mode, config.step)?;
            let namer = Namer::new(&problem);
            print_json(&PairOutput {
                pair: namer.pair(&verdict, &config),
                crossings,
                independence: namer.independence(&independence),
                gradient: namer.gradient(&gradient),
            });
            if let Some(path) = svg_parallel {
                emit_parallel_coordinates_svg(&vi, &vj, (&first, &second), &path)?;
            }
            if let Some(path) = svg_scatter {
                emit_scatter_svg(&vi, &vj, (&first, &second), &path)?;
            }
        }
        Command::Gradients { problem, sampling } => {
            let problem = load_problem(&problem)?;
            let config = sampling.config();
            let samples = config.sample(&problem)?;
            let namer = Namer::new(&problem);
            let m = problem.constraint_count();
            let mut records = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    let agg = gradient_relationship(
                        &problem,
                        i,
                        j,
                        &samples,
                        config.gradient_mode,
                        config.step,
                    )?;
                    records.push(namer.gradient(&agg));
                }
            }
            print_json(&records);
        }
        Command::Decompose { problem, sampling } => {
            let problem = load_problem(&problem)?;
            let config = sampling.config();
            let samples = problem.sample(config.samples, config.seed, config.strategy)?;
            let supports =
                effective_supports(&problem, &samples, config.probe_fraction, config.eps_value)?;
            let decomposition = decompose(&problem, &supports)?;
            #[derive(Serialize)]
            struct DecomposeOutput {
                supports: Vec<Vec<String>>,
                decomposition: conrel::report::DecompositionRecord,
            }
            print_json(&DecomposeOutput {
                supports: named_supports(&problem, &supports),
                decomposition: Namer::new(&problem).decomposition(&decomposition),
            });
        }
        Command::Infer { report } => {
            let report = AnalysisReport::from_json(&read(&report)?)?;
            let problem = report.problem()?;
            let inference = infer_transitive(&report.graph()?);
            print_json(&Namer::new(&problem).inference(&inference));
        }
        Command::Generate {
            family,
            n,
            m,
            plan,
            seed,
            out,
            labels,
        } => match family {
            Family::Paper => {
                fs::create_dir_all(&out)?;
                for problem in paper_suite() {
                    let path = out.join(format!("{}.json", problem.name()));
                    write(&path, &(problem.to_json() + "\n"))?;
                    eprintln!("wrote {}", path.display());
                }
            }
            Family::Affine => {
                let plan: Plan = plan.parse().map_err(Error::Validation)?;
                let planted = generate_affine(n, m, seed, &plan)?;
                write(&out, &(planted.problem.to_json() + "\n"))?;
                if let Some(labels) = labels {
                    let doc = serde_json::to_string_pretty(&planted.labels_file())?;
                    write(&labels, &(doc + "\n"))?;
                }
            }
        },
        Command::Plot {
            report,
            pair,
            kind,
            out,
        } => {
            let report = AnalysisReport::from_json(&read(&report)?)?;
            let problem = report.problem()?;
            let (a, b) = pair.split_once(',').ok_or_else(|| {
                Error::Validation(format!("--pair expects NAME,NAME, got `{pair}`"))
            })?;
            let (i, j) = (
                constraint_index(&problem, a)?,
                constraint_index(&problem, b)?,
            );
            let samples = report.parameters.sample(&problem)?;
            let (vi, vj) = (samples.column(i), samples.column(j));
            match kind {
                PlotKind::Parallel => emit_parallel_coordinates_svg(&vi, &vj, (a, b), &out)?,
                PlotKind::Scatter => emit_scatter_svg(&vi, &vj, (a, b), &out)?,
            }
        }
    }
    Ok(())
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
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
