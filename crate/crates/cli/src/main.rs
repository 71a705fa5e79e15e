//! `shintani`: pole structure, convergence, weight decomposition and numerical
//! evaluation of Shintani zeta functions.
//!
//! Results are JSON on standard output. Errors are JSON on standard error;
//! short human-readable summaries also go to standard error unless `--quiet`.
//!
//! Exit codes: 0 success, 1 oracle disagreement or internal error,
//! 2 invalid input, subset cap exceeded or point outside the convergence
//! region, 3 infeasible decomposition instance.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use shintani_core::matrix::{skeleton, ColumnSubset, SigmaMatrix, SubsetCap};
use shintani_core::poles::enumerate_pole_families;
use shintani_core::polyhedra::{membership_oracles, verify_with, HalfspaceOracle};
use shintani_core::weights::decomposers;
use shintani_core::wire::{
    parse_instance, parse_matrix, to_json_line, DecompositionJson, EvalResultJson, MatrixJson,
    MellinCheckJson, PoleReportJson, SubsetVerificationJson, VerifyReportJson,
};
use shintani_core::zeta::{
    eval_zeta, mellin_cross_check_1d, tail_strategies, EvalRequest, DEFAULT_REL_TOL,
};
use shintani_core::Error;

#[derive(Parser)]
#[command(name = "shintani", version, about)]
struct Cli {
    /// Suppress the summary lines on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate pole families and the convergence region of a matrix.
    Analyze {
        /// Matrix file (JSON or whitespace-separated rows); `-` for stdin.
        matrix: PathBuf,
        /// Also analyze the 0/1 skeleton and check the reports coincide.
        #[arg(long)]
        skeleton: bool,
    },
    /// Compare the flow membership oracle with the halfspace description for
    /// every non-empty column subset.
    Verify {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidate oracle; the reference is always the halfspace description.
        #[arg(long, default_value = "flow")]
        oracle: String,
    },
    /// Split a weight vector into parts with prescribed supports.
    Decompose {
        /// Instance JSON `{"n", "sets", "sigma", "strict"}`.
        instance: PathBuf,
        #[arg(long, default_value = "graph")]
        algorithm: String,
    },
    /// Evaluate the zeta series at a point of the convergence region.
    Eval {
        matrix: PathBuf,
        /// Real parts, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        s: Vec<f64>,
        /// Imaginary parts, comma separated; zero when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s_imag: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        tol: f64,
        /// Largest box side `M`.
        #[arg(long)]
        max_terms: Option<u64>,
        #[arg(long, default_value = "wynn")]
        tail: String,
    },
    /// Check `ζ(s)Γ(s)` against its Mellin integral.
    MellinCheck {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 10_000)]
        quad_points: usize,
        #[arg(long, default_value_t = 40.0)]
        cutoff: f64,
    },
}

enum Failure {
    Error(Error),
    /// Exit 1 after the report has been written.
    Disagreement,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InfeasibleInstance { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

struct Output {
    quiet: bool,
}

impl Output {
    fn emit<T: Serialize>(&self, value: &T) -> io::Result<()> {
        io::stdout()
            .lock()
            .write_all(to_json_line(value).as_bytes())
    }

    fn note(&self, line: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", line.as_ref());
        }
    }
}

fn read_input(path: &Path) -> Result<String, Error> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<SigmaMatrix, Error> {
    parse_matrix(&read_input(path)?)
}

#[derive(Serialize)]
struct SkeletonAnalysis {
    report: PoleReportJson,
    skeleton: MatrixJson,
    skeleton_report: PoleReportJson,
    skeleton_matches: bool,
}

fn analyze(out: &Output, path: &Path, with_skeleton: bool) -> Result<(), Failure> {
    let a = load_matrix(path)?;
    let cap = SubsetCap::from_env()?;
    let report = enumerate_pole_families(&a, cap)?;
    out.note(format!(
        "{} x {} matrix, {} pole famil{}",
        report.n,
        report.r,
        report.families.len(),
        if report.families.len() == 1 {
            "y"
        } else {
            "ies"
        }
    ));
    for f in &report.families {
        out.note(format!("  {f}"));
    }
    let report_json = PoleReportJson::from(&report);
    if !with_skeleton {
        out.emit(&report_json).map_err(io_error)?;
        return Ok(());
    }
    let sk = skeleton(&a);
    let sk_report = enumerate_pole_families(&sk, cap)?;
    let matches = sk_report == report;
    out.emit(&SkeletonAnalysis {
        report: report_json,
        skeleton: MatrixJson::from(&sk),
        skeleton_report: PoleReportJson::from(&sk_report),
        skeleton_matches: matches,
    })
    .map_err(io_error)?;
    if matches {
        out.note("skeleton report matches");
        Ok(())
    } else {
        Err(Error::Internal("skeleton report differs from the matrix report".into()).into())
    }
}

fn verify(
    out: &Output,
    path: &Path,
    samples: usize,
    seed: u64,
    oracle: &str,
) -> Result<(), Failure> {
    let a = load_matrix(path)?;
    let cap = SubsetCap::from_env()?;
    cap.check(a.cols())?;
    let oracles = membership_oracles();
    let candidate = oracles.get(oracle)?;
    let mut subsets = Vec::new();
    for j in ColumnSubset::all_nonempty(a.cols()) {
        let rep = verify_with(candidate, &HalfspaceOracle, &a, j, samples, seed, cap)?;
        if !rep.passed() {
            out.note(format!(
                "J = {:?}: {} disagreements",
                j.one_based(),
                rep.disagree.len()
            ));
        }
        subsets.push(SubsetVerificationJson::from(&rep));
    }
    let pass = subsets.iter().all(|s| s.disagree.is_empty());
    out.note(format!(
        "{} subsets, {} samples each: {}",
        subsets.len(),
        samples,
        if pass { "pass" } else { "FAIL" }
    ));
    out.emit(&VerifyReportJson {
        samples,
        seed,
        pass,
        subsets,
    })
    .map_err(io_error)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Disagreement)
    }
}

fn decompose(out: &Output, path: &Path, algorithm: &str) -> Result<(), Failure> {
    let inst = parse_instance(&read_input(path)?)?;
    let registry = decomposers();
    let d = registry.get(algorithm)?.decompose(&inst)?;
    out.note(format!("{} parts via {algorithm}", d.parts.len()));
    out.emit(&DecompositionJson::from(&d)).map_err(io_error)?;
    Ok(())
}

fn eval(
    out: &Output,
    path: &Path,
    re: &[f64],
    im: &[f64],
    tol: f64,
    max_terms: Option<u64>,
    tail: &str,
) -> Result<(), Failure> {
    let a = load_matrix(path)?;
    if !im.is_empty() && im.len() != re.len() {
        return Err(Error::DimensionMismatch {
            expected: re.len(),
            found: im.len(),
        }
        .into());
    }
    tail_strategies().get(tail)?;
    let s: Vec<Complex64> = re
        .iter()
        .enumerate()
        .map(|(i, &x)| Complex64::new(x, im.get(i).copied().unwrap_or(0.0)))
        .collect();
    let mut req = EvalRequest::new(a, s).with_rel_tol(tol).with_tail(tail);
    req.cap = SubsetCap::from_env()?;
    if let Some(m) = max_terms {
        req = req.with_max_terms(m);
    }
    let r = eval_zeta(&req)?;
    out.note(format!(
        "value {} {:+}i, error estimate {:e}, box side {}",
        r.value.re, r.value.im, r.error_estimate, r.cutoff
    ));
    if !r.converged {
        out.note("warning: tolerance not reached within the term budget");
    }
    out.emit(&EvalResultJson::from(&r)).map_err(io_error)?;
    Ok(())
}

fn mellin(out: &Output, s: f64, quad_points: usize, cutoff: f64) -> Result<(), Failure> {
    let c = mellin_cross_check_1d(s, quad_points, cutoff)?;
    out.note(format!(
        "zeta*gamma {} vs integral {}: diff {:e}",
        c.lhs, c.rhs, c.abs_diff
    ));
    out.emit(&MellinCheckJson::from(&c)).map_err(io_error)?;
    Ok(())
}

fn io_error(e: io::Error) -> Failure {
    Failure::Error(Error::Internal(format!("writing output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output { quiet: cli.quiet };
    let result = match &cli.command {
        Command::Analyze { matrix, skeleton } => analyze(&out, matrix, *skeleton),
        Command::Verify {
            matrix,
            samples,
            seed,
            oracle,
        } => verify(&out, matrix, *samples, *seed, oracle),
        Command::Decompose {
            instance,
            algorithm,
        } => decompose(&out, instance, algorithm),
        Command::Eval {
            matrix,
            s,
            s_imag,
            tol,
            max_terms,
            tail,
        } => eval(&out, matrix, s, s_imag, *tol, *max_terms, tail),
        Command::MellinCheck {
            s,
            quad_points,
            cutoff,
        } => mellin(&out, *s, *quad_points, *cutoff),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Disagreement) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            let code = exit_code(&e);
            if code == 3 {
                // The violating subset is the payload.
                let _ = out.emit(&e.to_json());
            }
            eprintln!("{}", e.to_json());
            ExitCode::from(code)
        }
    }
}
