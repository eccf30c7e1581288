//! Command-line front-end: argument parsing, file handling and exit codes.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
//! 3 numerical failure.

pub mod commands;
pub mod doc;
pub mod error;
pub mod io;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use commands::{EtaChoice, MetricArgs, OscillatorArgs, Report};
use doc::Format;
use error::CliError;
use io::{load, Loaded, Outputs};

#[derive(Debug, Parser)]
#[command(name = "pseudounitary", version, about = "Pseudo-unitary and pseudo-Hermitian matrix analysis")]
pub struct Cli {
    /// Numerical tolerance; overrides a `tol` stored in the matrix file.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Document path, or the output directory when the input is a directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print nothing on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// One paired-block seed column, `re,im;re,im;…`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedColumn(pub Vec<Complex64>);

fn parse_seed_column(s: &str) -> Result<SeedColumn, String> {
    s.split(';')
        .map(|entry| {
            let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [re, im] => Ok(Complex64::new(re.parse().map_err(|e| format!("{re:?}: {e}"))?, im.parse().map_err(|e| format!("{im:?}: {e}"))?)),
                _ => Err(format!("entry {entry:?} is not re,im")),
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(SeedColumn)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide pseudo-unitarity; report the spectral pairing and |det U|.
    Classify { input: PathBuf },
    /// Build a metric η with U†ηU = η and classify its group.
    Metric {
        input: PathBuf,
        /// Scale of each unimodular block, in pairing order.
        #[arg(long, value_delimiter = ',')]
        rho: Vec<f64>,
        /// Sign (+1 or −1) of each unimodular block, in pairing order.
        #[arg(long = "sign", value_delimiter = ',', allow_negative_numbers = true)]
        signs: Vec<i8>,
        /// Last column for one paired block as `re,im;re,im;…`; repeat per block.
        #[arg(long = "seed-column", value_parser = parse_seed_column)]
        seed_columns: Vec<SeedColumn>,
        /// Where to write η [default: <input stem>.eta.json].
        #[arg(long)]
        eta_out: Option<PathBuf>,
        /// Where to write η⁻¹ [default: <input stem>.eta_inv.json].
        #[arg(long)]
        eta_inv_out: Option<PathBuf>,
    },
    /// Pseudo-Hermitian H with e^{iH} = U.
    Log {
        input: PathBuf,
        /// Where to write H [default: <input stem>.h.json].
        #[arg(long)]
        h_out: Option<PathBuf>,
    },
    /// Canonical form, metric family and logarithm of a 2×2 matrix.
    Canon2 { input: PathBuf },
    /// Symplectic checks and eigenvalue quadruples.
    Symplectic { input: PathBuf },
    /// Two-level oscillator trajectory and conserved inner product.
    Oscillator {
        #[arg(long, allow_negative_numbers = true)]
        omega_sq: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// `sigma3`, `auto` (positive definite when one exists) or a matrix file.
        #[arg(long, default_value = "sigma3")]
        eta: EtaChoice,
    },
    /// Recompute ‖U†ηU − η‖/‖η‖; with a metric document, compare to its record.
    Verify {
        matrix: PathBuf,
        eta: PathBuf,
        #[arg(long)]
        document: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Metric { .. } => "metric",
            Command::Log { .. } => "log",
            Command::Canon2 { .. } => "canon2",
            Command::Symplectic { .. } => "symplectic",
            Command::Oscillator { .. } => "oscillator",
            Command::Verify { .. } => "verify",
        }
    }

    fn batch_input(&self) -> Option<&Path> {
        match self {
            Command::Classify { input } | Command::Metric { input, .. } | Command::Log { input, .. } | Command::Canon2 { input } | Command::Symplectic { input } => {
                Some(input.as_path())
            }
            _ => None,
        }
    }
}

fn decision_code(report: &Report) -> i32 {
    if report.doc.decision {
        0
    } else {
        1
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "matrix".into())
}

/// Runs a matrix-file command with side files placed under `dir`, named
/// after `name` unless given explicitly.
fn run_file_command(cli: &Cli, loaded: &Loaded, dir: &Path, name: &str) -> Result<Report, CliError> {
    let side = |explicit: &Option<PathBuf>, suffix: &str| explicit.clone().unwrap_or_else(|| dir.join(format!("{name}.{suffix}")));
    match &cli.command {
        Command::Classify { .. } => commands::classify(loaded, cli.tol),
        Command::Metric { rho, signs, seed_columns, eta_out, eta_inv_out, .. } => {
            let args = MetricArgs {
                rho: rho.clone(),
                signs: signs.clone(),
                seed_columns: seed_columns.iter().map(|c| c.0.clone()).collect(),
                eta_out: side(eta_out, "eta.json"),
                eta_inv_out: side(eta_inv_out, "eta_inv.json"),
            };
            commands::metric(loaded, cli.tol, &args)
        }
        Command::Log { h_out, .. } => commands::log(loaded, cli.tol, &side(h_out, "h.json")),
        Command::Canon2 { .. } => commands::canon2(loaded, cli.tol),
        Command::Symplectic { .. } => commands::symplectic(loaded, cli.tol),
        Command::Oscillator { .. } | Command::Verify { .. } => unreachable!("not a single-matrix command"),
    }
}

fn emit(cli: &Cli, report: Report) -> Result<i32, CliError> {
    let code = decision_code(&report);
    let rendered = report.doc.render(cli.format);
    let mut outputs = Outputs::default();
    for (p, b) in report.side_files {
        outputs.add(p, b);
    }
    match &cli.output {
        Some(p) => {
            outputs.add(p.clone(), rendered);
            outputs.commit()?;
        }
        None => {
            outputs.commit()?;
            if !cli.quiet {
                let mut out = std::io::stdout().lock();
                out.write_all(&rendered).and_then(|_| out.flush()).map_err(|e| CliError::Input(format!("stdout: {e}")))?;
            }
        }
    }
    Ok(code)
}

fn batch(cli: &Cli, dir: &Path) -> Result<i32, CliError> {
    let out_dir = cli.output.clone().ok_or_else(|| CliError::Input("a directory input needs --output <dir>".into()))?;
    if let Command::Metric { eta_out: Some(_), .. } | Command::Metric { eta_inv_out: Some(_), .. } | Command::Log { h_out: Some(_), .. } = &cli.command {
        return Err(CliError::Input("explicit side-file paths are not allowed with a directory input".into()));
    }
    fs::create_dir_all(&out_dir).map_err(|e| CliError::Input(format!("{}: {e}", out_dir.display())))?;
    let canon = |p: &Path| fs::canonicalize(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())));
    if canon(dir)? == canon(&out_dir)? {
        return Err(CliError::Input("the output directory must differ from the input directory".into()));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json") || e.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Input(format!("{} holds no .json or .csv matrix files", dir.display())));
    }
    let command = cli.command.name();
    let results = pseudounitary::batch::map(&files, |path| {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let report = load(path).and_then(|loaded| run_file_command(cli, &loaded, &out_dir, &name));
        (name, report)
    });
    let mut worst = 0;
    let mut entries = Vec::new();
    for (name, report) in results {
        let doc_path = out_dir.join(format!("{name}.{command}.{}", cli.format.extension()));
        let outcome = report.and_then(|r| {
            let code = decision_code(&r);
            let mut outputs = Outputs::default();
            outputs.add(doc_path.clone(), r.doc.render(cli.format));
            for (p, b) in r.side_files {
                outputs.add(p, b);
            }
            outputs.commit().map(|_| code)
        });
        let entry = match outcome {
            Ok(code) => {
                worst = worst.max(code);
                json!({ "file": name, "exit_code": code, "decision": code == 0, "document": doc_path.display().to_string() })
            }
            Err(e) => {
                worst = worst.max(e.exit_code());
                json!({ "file": name, "exit_code": e.exit_code(), "error": e.to_string() })
            }
        };
        entries.push(entry);
    }
    if !cli.quiet {
        let summary = json!({ "command": command, "files": entries });
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    }
    Ok(worst)
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(CliError::Input(format!("--tol must lie in (0, 1), got {t}")));
        }
    }
    if let Some(input) = cli.command.batch_input() {
        if input.is_dir() {
            return batch(cli, input);
        }
        let loaded = load(input)?;
        let dir = match &cli.output {
            Some(p) => p.parent().map(Path::to_path_buf).unwrap_or_default(),
            None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        let report = run_file_command(cli, &loaded, &dir, &stem(input))?;
        return emit(cli, report);
    }
    let report = match &cli.command {
        Command::Oscillator { omega_sq, lambda, hbar, x0, v0, t_max, steps, eta } => {
            let args = OscillatorArgs {
                omega_sq: *omega_sq,
                lambda: *lambda,
                hbar: *hbar,
                x0: *x0,
                v0: *v0,
                t_max: *t_max,
                steps: *steps,
                eta: eta.clone(),
            };
            commands::oscillator(&args, cli.tol)?
        }
        Command::Verify { matrix, eta, document } => {
            let m = load(matrix)?;
            let e = load(eta)?;
            match document {
                Some(p) => {
                    let bytes = fs::read(p).map_err(|err| CliError::Input(format!("{}: {err}", p.display())))?;
                    let recorded = commands::recorded_witness(&bytes)?;
                    commands::verify(&m, &e, Some((recorded, &bytes)), cli.tol)?
                }
                None => commands::verify(&m, &e, None, cli.tol)?,
            }
        }
        _ => unreachable!("matrix-file commands return above"),
    };
    emit(cli, report)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
