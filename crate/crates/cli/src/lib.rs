//! `nrange`: numerical ranges of two-scalar block matrices from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O,
//! parse, validation or numerical error.

pub mod document;
pub mod emit;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::builder::RangedU64ValueParser;
use clap::{Parser, Subcommand, ValueEnum};
use nrange_core::block::structural_matrices;
use nrange_core::verify::suites::{run_all, SuiteSizes};
use nrange_core::verify::{check_central_symmetry, check_eigenvalue_formula, check_k2_closed_form, DEFAULT_TOL, STRICT_TOL};
use nrange_core::{predict_numerical_range, sample_boundary, verify_prediction, Classification, DEFAULT_SAMPLES};
use serde_json::Value;
use thiserror::Error;

pub use document::{parse_document, parse_labeled, MatrixDocument};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid document at {path}: {message}")]
    Validation { path: String, message: String },
    #[error(transparent)]
    Numerical(#[from] nrange_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "nrange", version, about = "Numerical ranges of block matrices [[aI, C], [D, bI]]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn sample_count() -> RangedU64ValueParser<usize> {
    RangedU64ValueParser::<usize>::new().range(8..=1_000_000)
}

fn positive_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        Ok(_) => Err("tolerance must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the structure report as JSON.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count())]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Sample the boundary by support function.
    Boundary {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count())]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Print the predicted ellipses.
    Predict {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count())]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check the prediction against brute force; exit 1 if it fails.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_tol)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count())]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Write an SVG of the sampled boundary and the predicted ellipses.
    Render {
        file: PathBuf,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count())]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the randomized property suites at reduced size.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn pick(format: Option<Format>, allowed: &[Format], command: &str) -> Result<Format, CliError> {
    match format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(CliError::Usage(format!(
            "`{command}` does not support --format {}",
            f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
        ))),
    }
}

fn load(path: &Path) -> Result<MatrixDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_labeled(&text)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Verification run on a loaded document.
pub fn verify_document(doc: &MatrixDocument, samples: usize, tol: f64) -> Result<(nrange_core::StructureReport, emit::VerifyOutcome), CliError> {
    let a = &doc.matrix;
    let structure = predict_numerical_range(a);
    let norm = a.frobenius_norm();
    let strict = STRICT_TOL * norm.max(1.0);
    let even = samples + samples % 2;
    let mut notes = Vec::new();

    let k2_dev = if a.k() == 2 || a.n() - a.k() == 2 {
        let p = structural_matrices(&nrange_core::block::normalize_orientation(a));
        (p.k() == 2).then(|| check_k2_closed_form(&p, samples)).transpose()?
    } else {
        None
    };
    let k2_ok = k2_dev.map_or(true, |d| d <= tol * (1.0 + norm).powi(2));
    if !k2_ok {
        notes.push(format!("closed-form eigenvalue deviation {:.3e} exceeds tolerance", k2_dev.unwrap_or(0.0)));
    }

    let outcome = if structure.predicted.is_some() {
        let r = verify_prediction(a, &structure, samples, tol)?;
        notes.extend(r.notes.iter().cloned());
        emit::VerifyOutcome {
            symmetry_deviation: r.symmetry_deviation,
            formula_deviation: r.formula_vs_direct_deviation,
            k2_closed_form_deviation: k2_dev,
            passed: r.passed && k2_ok,
            report: Some(r),
            notes,
        }
    } else {
        let symmetry = check_central_symmetry(a, even)?;
        let formula = check_eigenvalue_formula(a, samples)?;
        if structure.classification == Classification::NoneDetected {
            notes.push("no structural criterion applies; only symmetry and eigenvalue formula checked".into());
        }
        if symmetry > strict {
            notes.push(format!("symmetry deviation {symmetry:.3e} exceeds {strict:.3e}"));
        }
        if formula > strict {
            notes.push(format!("formula deviation {formula:.3e} exceeds {strict:.3e}"));
        }
        emit::VerifyOutcome {
            report: None,
            symmetry_deviation: symmetry,
            formula_deviation: formula,
            k2_closed_form_deviation: k2_dev,
            passed: symmetry <= strict && formula <= strict && k2_ok,
            notes,
        }
    };
    Ok((structure, outcome))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let stdout_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    match cli.command {
        Command::Analyze { file, samples, format } => {
            pick(format, &[Format::Json], "analyze")?;
            let doc = load(&file)?;
            let report = predict_numerical_range(&doc.matrix);
            let v = emit::analysis(&doc.matrix, doc.label.as_deref(), &report, samples);
            out.write_all(json_text(&v).as_bytes()).map_err(stdout_err)?;
            Ok(0)
        }
        Command::Boundary { file, samples, format } => {
            let format = pick(format, &[Format::Csv, Format::Json, Format::Svg], "boundary")?;
            let doc = load(&file)?;
            let trace = sample_boundary(&doc.matrix, samples)?;
            let text = match format {
                Format::Csv => emit::trace_csv(&trace),
                Format::Json => json_text(&emit::trace_json(&trace)),
                Format::Svg => svg::render(&trace, None, doc.label.as_deref()),
            };
            out.write_all(text.as_bytes()).map_err(stdout_err)?;
            Ok(0)
        }
        Command::Predict { file, samples, format } => {
            let format = pick(format, &[Format::Json, Format::Csv], "predict")?;
            let doc = load(&file)?;
            let report = predict_numerical_range(&doc.matrix);
            let text = match format {
                Format::Csv => emit::prediction_csv(&report),
                _ => json_text(&emit::prediction(&doc.matrix, doc.label.as_deref(), &report, samples)),
            };
            out.write_all(text.as_bytes()).map_err(stdout_err)?;
            Ok(0)
        }
        Command::Verify {
            file,
            tol,
            samples,
            format,
        } => {
            pick(format, &[Format::Json], "verify")?;
            let doc = load(&file)?;
            let (structure, outcome) = verify_document(&doc, samples, tol)?;
            let v = emit::verification(&doc.matrix, doc.label.as_deref(), &structure, &outcome, samples, tol);
            out.write_all(json_text(&v).as_bytes()).map_err(stdout_err)?;
            Ok(if outcome.passed { 0 } else { 1 })
        }
        Command::Render {
            file,
            out: path,
            samples,
            format,
        } => {
            pick(format, &[Format::Svg], "render")?;
            let doc = load(&file)?;
            let trace = sample_boundary(&doc.matrix, samples)?;
            let report = predict_numerical_range(&doc.matrix);
            let text = svg::render(&trace, report.predicted.as_ref(), doc.label.as_deref());
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|source| CliError::Io { path: p, source })?,
                None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
            }
            Ok(0)
        }
        Command::Selftest { seed, format } => {
            // Plain text by default; JSON on request.
            let json = format.is_some() && pick(format, &[Format::Json], "selftest")? == Format::Json;
            let outcomes = run_all(seed, SuiteSizes::quick());
            let text = match json {
                true => json_text(&Value::Array(
                    outcomes
                        .iter()
                        .map(|o| serde_json::json!({"label": o.label, "passed": o.passed, "summary": o.summary}))
                        .collect(),
                )),
                false => {
                    let mut s = String::new();
                    for o in &outcomes {
                        let verdict = if o.passed { "PASS" } else { "FAIL" };
                        s.push_str(&format!("{verdict} {}: {}\n", o.label, o.summary));
                    }
                    s
                }
            };
            out.write_all(text.as_bytes()).map_err(stdout_err)?;
            Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
