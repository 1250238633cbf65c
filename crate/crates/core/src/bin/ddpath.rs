//! Command-line front end. Exit codes: 0 when the run succeeds and every
//! requested condition holds, 1 when a condition or audit fails, 2 on any
//! error (unreadable input, dimension mismatch, singular matrix, ...).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ddpath::ensemble::default_sweep_specs;
use ddpath::homotopy::{monotonicity_audit, solve_path, verify_path, LassoProblem, PathOpts};
use ddpath::io::{
    audit_comment_block, frequency_csv, parse_path_csv, path_to_csv, read_matrix, read_text,
    read_vector, rebuild_path, tv_path_to_csv, write_text,
};
use ddpath::tv::{first_difference_matrix, solve_tv_path, TvProblem};
use ddpath::{
    check_coherence_bound, check_gram_inverse_dominance_eps, check_kstep_bound,
    check_positive_cone, gram, run_frequency_study, run_frequency_study_allow_wide,
    ConditionReport, EnsembleSpec, FrequencyReport, MatrixDistribution, PositiveConeOpts, Result,
};

#[derive(Parser)]
#[command(
    name = "ddpath",
    version,
    about = "LASSO solution paths with diagonal-dominance certificates",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DistArg {
    Normal,
    Uniform01,
    Bernoulli,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify conditions on a dictionary read from a matrix file.
    ///
    /// With no condition flags this checks diagonal dominance of the
    /// inverse Gram matrix. Condition flags select what runs instead; pass
    /// several to combine them.
    Check {
        /// Dictionary file (rows of numbers, comma or whitespace separated).
        matrix: PathBuf,
        /// Check dominance of the inverse Gram matrix explicitly.
        #[arg(long)]
        dominance: bool,
        /// Check the k-step recovery bound for this sparsity level.
        #[arg(long = "donoho-k", value_name = "K")]
        donoho_k: Option<usize>,
        /// Check the coherence-ratio bound on the Gram matrix.
        #[arg(long)]
        coherence: bool,
        /// Check the positive cone condition over all index subsets.
        #[arg(long)]
        positive_cone: bool,
        /// With --positive-cone, enumerate signed inverses instead of the
        /// strict-dominance shortcut.
        #[arg(long, requires = "positive_cone")]
        exhaustive: bool,
        /// Classification slack absorbing rounding noise near ties.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Run even when the dictionary has fewer rows than columns.
        #[arg(long)]
        allow_wide: bool,
        /// Subset-enumeration size guard for --positive-cone.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Emit reports as JSON lines instead of key=value lines.
        #[arg(long)]
        json: bool,
    },
    /// Compute a breakpoint path for a dictionary and observation.
    Path {
        matrix: PathBuf,
        y: PathBuf,
        /// Stop the path at this lambda instead of 0.
        #[arg(long, default_value_t = 0.0)]
        lambda_min: f64,
        /// Append a monotonicity audit and the per-breakpoint trade-off
        /// pairs as CSV comments.
        #[arg(long)]
        audit: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a total-variation path for a signal.
    Tv {
        y: PathBuf,
        /// Difference operator file; defaults to first differences.
        #[arg(long)]
        operator: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        lambda_min: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate how often random dictionaries satisfy the dominance
    /// condition.
    Mc {
        #[arg(long, value_enum, default_value_t = DistArg::Normal)]
        dist: DistArg,
        /// Bernoulli parameter (only with --dist bernoulli).
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Thread count; defaults to all cores. Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Run the whole default grid (all distributions, n 2..=10,
        /// m in {n, 2n, 4n}) instead of a single cell.
        #[arg(long, conflicts_with_all = ["dist", "p", "m", "n"])]
        sweep: bool,
        /// Allow m < n (each trial's Gram matrix is then singular).
        #[arg(long)]
        allow_wide: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a previously emitted path CSV against its problem data.
    Audit {
        matrix: PathBuf,
        y: PathBuf,
        path_csv: PathBuf,
        /// Relative tolerance for the optimality conditions.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn print_report(r: &ConditionReport, json: bool) {
    if json {
        println!("{}", r.to_json());
    } else {
        println!("{}", r.to_kv());
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    matrix: &PathBuf,
    dominance: bool,
    donoho_k: Option<usize>,
    coherence: bool,
    positive_cone: bool,
    exhaustive: bool,
    eps: f64,
    allow_wide: bool,
    max_n: usize,
    json: bool,
) -> Result<u8> {
    let a = read_matrix(matrix)?;
    let mut reports = Vec::new();
    let run_default = !dominance && donoho_k.is_none() && !coherence && !positive_cone;
    if dominance || run_default {
        reports.push(check_gram_inverse_dominance_eps(&a, eps, allow_wide)?);
    }
    if let Some(k) = donoho_k {
        reports.push(check_kstep_bound(&a, k)?);
    }
    if coherence {
        reports.push(check_coherence_bound(&gram(&a))?);
    }
    if positive_cone {
        let opts = PositiveConeOpts {
            max_n,
            exhaustive,
            ..PositiveConeOpts::default()
        };
        reports.push(check_positive_cone(&a, &opts)?);
    }
    let mut all_hold = true;
    for r in &reports {
        print_report(r, json);
        all_hold &= r.holds;
    }
    Ok(if all_hold { 0 } else { 1 })
}

fn cmd_path(
    matrix: &PathBuf,
    y: &PathBuf,
    lambda_min: f64,
    audit: bool,
    out: &Option<PathBuf>,
) -> Result<u8> {
    let a = read_matrix(matrix)?;
    let yv = read_vector(y)?;
    let p = LassoProblem::new(a, yv)?;
    let opts = PathOpts {
        lambda_min,
        ..PathOpts::default()
    };
    let path = solve_path(&p, &opts)?;
    let mut csv = path_to_csv(&path);
    if audit {
        csv.push_str(&audit_comment_block(&path, &monotonicity_audit(&path)));
    }
    emit(out, &csv)?;
    Ok(0)
}

fn cmd_tv(
    y: &PathBuf,
    operator: &Option<PathBuf>,
    lambda_min: f64,
    out: &Option<PathBuf>,
) -> Result<u8> {
    let yv = read_vector(y)?;
    let d = match operator {
        Some(p) => read_matrix(p)?,
        None => first_difference_matrix(yv.len())?,
    };
    let t = TvProblem::new(yv, d)?;
    let opts = PathOpts {
        lambda_min,
        ..PathOpts::default()
    };
    let path = solve_tv_path(&t, &opts)?;
    emit(out, &tv_path_to_csv(&path))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    dist: DistArg,
    p: f64,
    m: usize,
    n: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
    sweep: bool,
    allow_wide: bool,
    out: &Option<PathBuf>,
) -> Result<u8> {
    let specs = if sweep {
        default_sweep_specs(trials, seed)
    } else {
        let distribution = match dist {
            DistArg::Normal => MatrixDistribution::Normal,
            DistArg::Uniform01 => MatrixDistribution::Uniform01,
            DistArg::Bernoulli => MatrixDistribution::Bernoulli(p),
        };
        vec![EnsembleSpec::new(distribution, m, n, trials, seed)?]
    };

    let run = || -> Result<Vec<FrequencyReport>> {
        specs
            .iter()
            .map(|s| {
                if allow_wide {
                    run_frequency_study_allow_wide(s)
                } else {
                    run_frequency_study(s)
                }
            })
            .collect()
    };
    let reports = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| ddpath::Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(run)?
        }
        None => run()?,
    };
    for r in &reports {
        if let Some(c) = &r.caveat {
            eprintln!("note: {c}");
        }
    }
    emit(out, &frequency_csv(&reports))?;
    Ok(0)
}

fn cmd_audit(matrix: &PathBuf, y: &PathBuf, path_csv: &PathBuf, tol: f64) -> Result<u8> {
    let a = read_matrix(matrix)?;
    let yv = read_vector(y)?;
    let p = LassoProblem::new(a, yv)?;
    let rows = parse_path_csv(&read_text(path_csv)?)?;
    let path = rebuild_path(p, &rows)?;
    let verdict = verify_path(&path, tol)?;
    let mono = monotonicity_audit(&path);
    println!(
        "audit breakpoints={} optimality={} cardinality_monotone={} magnitude_monotone={}",
        path.breakpoints().len(),
        if verdict.ok { "pass" } else { "fail" },
        mono.cardinality_monotone,
        mono.magnitude_monotone
    );
    for issue in &mono.issues {
        println!("monotonicity: {issue}");
    }
    if verdict.ok {
        Ok(0)
    } else {
        for f in &verdict.failures {
            println!("failure: {f}");
        }
        Ok(1)
    }
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Cmd::Check {
            matrix,
            dominance,
            donoho_k,
            coherence,
            positive_cone,
            exhaustive,
            eps,
            allow_wide,
            max_n,
            json,
        } => cmd_check(
            matrix,
            *dominance,
            *donoho_k,
            *coherence,
            *positive_cone,
            *exhaustive,
            *eps,
            *allow_wide,
            *max_n,
            *json,
        ),
        Cmd::Path {
            matrix,
            y,
            lambda_min,
            audit,
            out,
        } => cmd_path(matrix, y, *lambda_min, *audit, out),
        Cmd::Tv {
            y,
            operator,
            lambda_min,
            out,
        } => cmd_tv(y, operator, *lambda_min, out),
        Cmd::Mc {
            dist,
            p,
            m,
            n,
            trials,
            seed,
            workers,
            sweep,
            allow_wide,
            out,
        } => cmd_mc(
            *dist, *p, *m, *n, *trials, *seed, *workers, *sweep, *allow_wide, out,
        ),
        Cmd::Audit {
            matrix,
            y,
            path_csv,
            tol,
        } => cmd_audit(matrix, y, path_csv, *tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
