//! CLI over the block pseudoinverse updates: verification sweeps,
//! benchmarks, and one-shot updates on matrix text files.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pinv_core::block::Backend;
use pinv_core::harness::{bench, verify_pair, verify_sweep, CorpusSpec, RankPattern, RunReport};
use pinv_core::io::{read_matrix_file, write_matrix_file};
use pinv_core::matrix::Tolerance;
use pinv_core::{append_columns, append_rows, PinvState};

#[derive(Parser)]
#[command(name = "pinvtool", about = "Incremental pseudoinverse updates", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// JSON corpus spec file (overrides the individual flags)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Rows of the base matrix
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Columns of the base matrix
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Appended columns (or rows with --rows)
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Rank pattern: full | in_range | zero_cols | mixed
    #[arg(long, default_value = "mixed")]
    pattern: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Entry scale of the generated matrices
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Append rows instead of columns
    #[arg(long)]
    rows: bool,
}

impl SpecArgs {
    fn resolve(&self) -> Result<CorpusSpec, String> {
        if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            return serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()));
        }
        let pattern = RankPattern::parse(&self.pattern)
            .ok_or_else(|| format!("unknown pattern '{}'", self.pattern))?;
        Ok(CorpusSpec {
            m: self.m,
            n: self.n,
            p: if self.rows { 0 } else { self.p },
            q: if self.rows { self.p } else { 0 },
            rank_pattern: pattern,
            seed: self.seed,
            scale: self.scale,
            rows_mode: self.rows,
        })
    }
}

#[derive(Args)]
struct TolArgs {
    /// Threshold on |c̃|² for the zero-residual decision
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    /// Scale the threshold by the squared norm of the source column
    #[arg(long)]
    relative_eps: bool,
    /// Relative acceptance threshold for residual checks
    #[arg(long, default_value_t = 1e-8)]
    residual_rel: f64,
}

impl TolArgs {
    fn resolve(&self) -> Tolerance {
        Tolerance {
            zero_sq: self.eps,
            residual_rel: self.residual_rel,
            relative: self.relative_eps,
        }
    }
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "invchol" => Ok(Backend::InverseCholesky),
        "chol" => Ok(Backend::LibraryCholesky),
        other => Err(format!("unknown backend '{other}' (use invchol or chol)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a seeded corpus, comparing the block update to the
    /// column-by-column recursion, or check an (A, A⁺) file pair
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// invchol | chol
        #[arg(long, default_value = "invchol")]
        backend: String,
        /// Instances to run
        #[arg(long, default_value_t = 20)]
        count: u64,
        /// Check this matrix file against --pinv instead of sweeping
        #[arg(long, requires = "pinv")]
        a: Option<PathBuf>,
        /// Claimed pseudoinverse file for --a
        #[arg(long, requires = "a")]
        pinv: Option<PathBuf>,
        /// Write the JSON report here
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time the one-pass update against the p-iteration recursion
    Bench {
        #[command(flatten)]
        spec: SpecArgs,
        /// Repetitions (median is reported)
        #[arg(long, default_value_t = 20)]
        reps: u64,
        /// Write the timing table here as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One-shot update: read A and a block, write the new pseudoinverse
    Pinv {
        /// Base matrix file
        #[arg(long, value_name = "A.mat")]
        r#in: PathBuf,
        /// Block to append (columns, or rows with --rows)
        #[arg(long, value_name = "H.mat")]
        append: Option<PathBuf>,
        /// Treat the appended block as rows
        #[arg(long)]
        rows: bool,
        /// Output file for the pseudoinverse
        #[arg(long, value_name = "Aplus.mat")]
        out: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        /// invchol | chol
        #[arg(long, default_value = "invchol")]
        backend: String,
    },
}

fn emit_report(report: &RunReport, path: Option<&PathBuf>) -> Result<(), String> {
    print!("{}", report.to_text());
    if let Some(path) = path {
        std::fs::write(path, report.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            spec,
            tol,
            backend,
            count,
            a,
            pinv,
            report,
        } => {
            let tol = tol.resolve();
            let run_report = if let (Some(a_path), Some(pinv_path)) = (&a, &pinv) {
                let a = read_matrix_file(a_path).map_err(|e| e.to_string())?;
                let x = read_matrix_file(pinv_path).map_err(|e| e.to_string())?;
                verify_pair(&a, &x, &tol).map_err(|e| e.to_string())?
            } else {
                let backend = parse_backend(&backend)?;
                let spec = spec.resolve()?;
                verify_sweep(&spec, count, &tol, backend).map_err(|e| e.to_string())?
            };
            emit_report(&run_report, report.as_ref())?;
            Ok(run_report.summary.pass)
        }
        Command::Bench { spec, reps, csv } => {
            if reps == 0 {
                return Err("--reps must be >= 1".into());
            }
            let spec = spec.resolve()?;
            let report = bench(&spec, reps).map_err(|e| e.to_string())?;
            println!(
                "median: block(invchol) {} us, block(chol) {} us, oracle {} us",
                report.median_block_invchol_us,
                report.median_block_chol_us,
                report.median_oracle_us
            );
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv())
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(true)
        }
        Command::Pinv {
            r#in,
            append,
            rows,
            out,
            tol,
            backend,
        } => {
            let tol = tol.resolve();
            let backend = parse_backend(&backend)?;
            let a = read_matrix_file(&r#in).map_err(|e| e.to_string())?;
            let state = PinvState::from_matrix(&a, &tol).map_err(|e| e.to_string())?;
            let state = match append {
                Some(path) => {
                    let block = read_matrix_file(&path).map_err(|e| e.to_string())?;
                    let (next, _) = if rows {
                        append_rows(&state, &block, &tol, backend)
                    } else {
                        append_columns(&state, &block, &tol, backend)
                    }
                    .map_err(|e| e.to_string())?;
                    next
                }
                None => state,
            };
            write_matrix_file(&out, state.a_plus()).map_err(|e| e.to_string())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("pinvtool: {msg}");
            ExitCode::from(2)
        }
    }
}
