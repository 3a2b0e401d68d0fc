//! The `liftbell` command line. Exit codes: 0 on success, 2 for bad input,
//! 3 when a solver fails or a requested verification does not hold.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bell::format::{correlation_to_json, functional_from_json, functional_to_json};
use crate::bell::{BellFunctional, Coeff};
use crate::bounds::{local_bound, nonsignaling_bound, BoundResult, Witness};
use crate::catalog;
use crate::error::Error;
use crate::lifting::{apply_steps, LiftStep};
use crate::npa::{quantum_bound, Level, MomentStructure};
use crate::qmodel::model_from_json;
use crate::sdp::{SdpSettings, DEFAULT_SDP_TOL};
use crate::selftest::{metric_functional, selftest_curve, Metric, Mode, SelftestProblem};
use crate::slice::Slice;

pub const TOL_ENV: &str = "LIFTBELL_TOL";

#[derive(Parser, Debug)]
#[command(name = "liftbell", version, about = "Bounds, liftings and self-testing curves for Bell inequalities")]
struct Cli {
    /// Solver tolerance; defaults to $LIFTBELL_TOL, then 1e-8.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Class {
    Local,
    Ns,
    Quantum,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local, nonsignaling or relaxed quantum bound of a functional.
    Bound {
        #[arg(long, value_enum)]
        class: Class,
        /// JSON file or built-in name (chsh, li-chsh, lo-chsh, lp-chsh).
        #[arg(long)]
        functional: String,
        #[arg(long, default_value = "1+AB")]
        level: Level,
        /// Write the optimal strategy, correlation or moments as JSON.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Apply a list of lifting descriptors to a functional.
    Lift {
        #[arg(long)]
        functional: String,
        /// JSON file holding a list of descriptors.
        #[arg(long)]
        steps: Option<PathBuf>,
        /// A single inline JSON descriptor; repeatable, applied after --steps.
        #[arg(long = "step")]
        inline: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recompute both local bounds and fail unless they agree.
        #[arg(long)]
        verify_local_bound: bool,
    },
    /// Range of one functional with another pinned, over L, N and the relaxation of Q.
    Slice {
        #[arg(long, default_value = "li-chsh")]
        axis: String,
        /// Defaults to Bob's correlator for the added input of li-chsh.
        #[arg(long)]
        pinned: Option<String>,
        #[arg(long, default_value = "1+AB")]
        level: Level,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bounds on a self-testing metric across observed Bell values.
    SelftestCurve {
        #[arg(long, default_value = "lo-chsh")]
        inequality: String,
        #[arg(long, default_value = "fidelity")]
        metric: Metric,
        #[arg(long, default_value = "1+AB")]
        level: Level,
        #[arg(long, default_value_t = 2.0)]
        from: f64,
        #[arg(long, default_value_t = 2.8284)]
        to: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value = "equality")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Value of a functional on the correlation of a quantum model.
    EvalModel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        functional: String,
        /// Also write the model's correlation as JSON.
        #[arg(long)]
        correlation: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_solver_failure() {
            Failure::Solver(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Reports go to stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let settings = match solver_settings(cli.tol) {
        Ok(s) => s,
        Err(f) => return report(f),
    };
    let outcome = match cli.command {
        Command::Bound {
            class,
            functional,
            level,
            witness,
        } => cmd_bound(class, &functional, &level, witness.as_deref(), &settings),
        Command::Lift {
            functional,
            steps,
            inline,
            out,
            verify_local_bound,
        } => cmd_lift(&functional, steps.as_deref(), &inline, out.as_deref(), verify_local_bound),
        Command::Slice {
            axis,
            pinned,
            level,
            from,
            to,
            points,
            out,
        } => cmd_slice(&axis, pinned.as_deref(), level, grid(from, to, points), out.as_deref(), &settings),
        Command::SelftestCurve {
            inequality,
            metric,
            level,
            from,
            to,
            points,
            mode,
            out,
        } => cmd_selftest_curve(&inequality, metric, &level, &grid(from, to, points), mode, out.as_deref(), &settings),
        Command::EvalModel {
            model,
            functional,
            correlation,
        } => cmd_eval_model(&model, &functional, correlation.as_deref()),
    };
    match outcome {
        Ok(()) => 0,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> i32 {
    match f {
        Failure::Input(msg) => {
            eprintln!("error: {msg}");
            2
        }
        Failure::Solver(msg) => {
            eprintln!("solver error: {msg}");
            3
        }
    }
}

fn solver_settings(flag: Option<f64>) -> CliResult<SdpSettings> {
    let tol = match (flag, std::env::var(TOL_ENV)) {
        (Some(t), _) => t,
        (None, Ok(v)) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{TOL_ENV}={v} is not a number")))?,
        (None, Err(_)) => DEFAULT_SDP_TOL,
    };
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Failure::Input(format!("tolerance {tol} must lie in (0, 1)")));
    }
    Ok(SdpSettings::with_tol(tol))
}

/// `points` evenly spaced values from `from` to `to`, both included.
fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Twelve significant digits, printed without trailing zeros.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

/// A built-in name, unless a file of that name exists.
fn load_functional(spec: &str) -> CliResult<BellFunctional> {
    if !Path::new(spec).exists() {
        if let Some(f) = catalog::by_name(spec) {
            return Ok(f);
        }
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("{spec}: {e}")))?;
    functional_from_json(&text).map_err(|e| Failure::Input(format!("{spec}: {e}")))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header(out: &mut String, command: &str, fields: &[(&str, String)]) {
    let _ = writeln!(out, "# liftbell {} {command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

fn cmd_bound(class: Class, spec: &str, level: &Level, witness: Option<&Path>, settings: &SdpSettings) -> CliResult<()> {
    let f = load_functional(spec)?;
    match class {
        Class::Local | Class::Ns => {
            let r: BoundResult = match class {
                Class::Local => local_bound(&f)?,
                _ => nonsignaling_bound(&f)?,
            };
            println!("{}", r.value);
            eprintln!("status: {:?}", r.status);
            if let Some(path) = witness {
                let text = match &r.witness {
                    Witness::Strategy(st) => {
                        let mut s = serde_json::to_string_pretty(st).expect("strategy serializes");
                        s.push('\n');
                        s
                    }
                    Witness::Correlation(p) => correlation_to_json(p),
                };
                write_output(Some(path), &text)?;
            }
        }
        Class::Quantum => {
            let r = quantum_bound(&f, level, settings)?;
            println!("{}", sig12(r.bound));
            eprintln!(
                "level {level}, {} words, primal {}, gap {:.1e}, residuals {:.1e}/{:.1e}, {} iterations, {}",
                r.words,
                sig12(r.value),
                r.gap,
                r.primal_residual,
                r.dual_residual,
                r.iterations,
                r.status
            );
            if let Some(path) = witness {
                let structure = MomentStructure::for_level(f.scenario(), level);
                let moments: Vec<serde_json::Value> = structure
                    .classes()
                    .iter()
                    .zip(&r.moments)
                    .map(|(w, m)| serde_json::json!({ "word": w.to_string(), "moment": m }))
                    .collect();
                let doc = serde_json::json!({ "level": level.to_string(), "bound": r.bound, "moments": moments });
                let mut s = serde_json::to_string_pretty(&doc).expect("moments serialize");
                s.push('\n');
                write_output(Some(path), &s)?;
            }
        }
    }
    Ok(())
}

fn cmd_lift(
    spec: &str,
    steps_file: Option<&Path>,
    inline: &[String],
    out: Option<&Path>,
    verify: bool,
) -> CliResult<()> {
    let f = load_functional(spec)?;
    let mut steps: Vec<LiftStep> = match steps_file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        None => vec![],
    };
    for s in inline {
        steps.push(serde_json::from_str(s).map_err(|e| Failure::Input(format!("descriptor {s}: {e}")))?);
    }
    let lifted = apply_steps(&f, &steps)?;
    if verify {
        let mut expected = local_bound(&f)?.value;
        for step in &steps {
            if let LiftStep::Shift { by } = step {
                expected = by.map_or(Coeff::ZERO, |c| expected - c);
            }
        }
        let after = local_bound(&lifted)?.value;
        if expected != after {
            return Err(Failure::Solver(format!("local bound is {after}, expected {expected}")));
        }
        eprintln!("local bound preserved: {after}");
    }
    write_output(out, &functional_to_json(&lifted))
}

fn cmd_slice(
    axis: &str,
    pinned: Option<&str>,
    level: Level,
    grid: Vec<f64>,
    out: Option<&Path>,
    settings: &SdpSettings,
) -> CliResult<()> {
    let axis_f = load_functional(axis)?;
    let pinned_f = match pinned {
        Some(p) => load_functional(p)?,
        None => catalog::bob_marginal_correlator(),
    };
    let mut slice = Slice::new(axis_f, pinned_f, level.clone())?;
    slice.settings = settings.clone();
    let rows = slice.rows(&grid);
    let mut text = String::new();
    header(
        &mut text,
        "slice",
        &[
            ("axis", axis.to_string()),
            ("pinned", pinned.unwrap_or("bob-marginal-correlator").to_string()),
            ("level", level.to_string()),
            ("Q", "moment relaxation (outer approximation)".to_string()),
            ("sdp tol", format!("{:e}", settings.tol)),
        ],
    );
    text.push_str("set,pinned_value,min,max\n");
    let mut failures = 0;
    for row in rows {
        match row.range {
            Ok(r) => {
                let _ = writeln!(text, "{},{},{},{}", row.set, sig12(row.pinned_value), sig12(r.min), sig12(r.max));
            }
            Err(e) => {
                failures += 1;
                eprintln!("{} at {}: {e}", row.set, sig12(row.pinned_value));
                let _ = writeln!(text, "{},{},,", row.set, sig12(row.pinned_value));
            }
        }
    }
    write_output(out, &text)?;
    if failures > 0 {
        return Err(Failure::Solver(format!("{failures} slice points failed")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_selftest_curve(
    inequality: &str,
    metric: Metric,
    level: &Level,
    grid: &[f64],
    mode: Mode,
    out: Option<&Path>,
    settings: &SdpSettings,
) -> CliResult<()> {
    let f = load_functional(inequality)?;
    let functional = metric_functional(metric, f.scenario())?;
    let problem = SelftestProblem::new(&f, functional, level);
    let points = selftest_curve(&problem, grid, mode, settings);
    let mut text = String::new();
    header(
        &mut text,
        "selftest-curve",
        &[
            ("inequality", inequality.to_string()),
            ("metric", metric.to_string()),
            ("mode", mode.to_string()),
            ("level", level.to_string()),
            (
                "words",
                format!(
                    "{} ({} at the base level, {} moment classes)",
                    problem.structure.size(),
                    problem.base_words(f.scenario()),
                    problem.structure.classes().len()
                ),
            ),
            (
                "sdp",
                format!("tol {:e}, max iterations {}", settings.tol, settings.max_iterations),
            ),
        ],
    );
    text.push_str("bell_value,bound,solver_status,gap\n");
    let mut failures = 0;
    for p in points {
        match p.result {
            Ok(r) => {
                let _ = writeln!(text, "{},{},{},{:.3e}", sig12(p.bell_value), sig12(r.bound), r.status, r.gap);
            }
            Err(e) => {
                failures += 1;
                eprintln!("v = {}: {e}", sig12(p.bell_value));
                let _ = writeln!(text, "{},,failed,", sig12(p.bell_value));
            }
        }
    }
    write_output(out, &text)?;
    if failures > 0 {
        return Err(Failure::Solver(format!("{failures} curve points failed")));
    }
    Ok(())
}

fn cmd_eval_model(model: &Path, spec: &str, correlation: Option<&Path>) -> CliResult<()> {
    let text = std::fs::read_to_string(model).map_err(|e| Failure::Input(format!("{}: {e}", model.display())))?;
    let model = model_from_json(&text)?;
    let f = load_functional(spec)?;
    let p = model.correlation();
    println!("{}", sig12(f.value(&p)?));
    if let Some(path) = correlation {
        write_output(Some(path), &correlation_to_json(&p))?;
    }
    Ok(())
}
