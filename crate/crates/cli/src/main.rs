//! papart: generate two-colored instances, tile them, repair against red
//! insertions, build papartition families, verify artifacts and explore
//! wreath decompositions. Exit codes: 0 success or verification pass,
//! 1 verification failure, 2 construction failure, 3 usage/parse error.

use clap::{Parser, Subcommand, ValueEnum};
use papart::graph::Params;
use papart::{compound, io, oracle, papartition, repair, tiling, wreath};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "papart", version, about = "Clique tilings, bag-free repairs and papartition families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded random two-colored instance
    Gen {
        /// Number of vertices
        #[arg(long)]
        m: usize,
        /// Class size
        #[arg(long)]
        ell: usize,
        /// Density margin, 0 < alpha < 1/ell^2
        #[arg(long)]
        alpha: f64,
        /// Maximum red degree to aim for
        #[arg(long, default_value_t = 0)]
        red_max: usize,
        /// PRNG seed; all randomness flows from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tile the blue graph of an instance into vertex-disjoint cliques
    Tile {
        /// Instance file (text or JSON)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tile the blue graph so no two classes span an alternating bag
    Repair {
        /// Instance file (text or JSON)
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the insertion trace to this file
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Construct pairwise far-apart papartitions of 1..=n
    Papartitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        /// Density margin; defaults to 1/(2 ell^2)
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Verify artifacts against their defining properties
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Search for a decomposition of all k-subsets into disjoint wreaths
    Wreath {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Step budget for enumeration plus exact-cover search
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Append `n k status steps seed` to this ledger file
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Recorded in the ledger; the search itself is deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check decompositions against an instance: class structure,
    /// cliques, leftover, bag-freeness, compound partner counts
    Decomposition {
        #[arg(long)]
        instance: PathBuf,
        /// One or more decomposition files
        #[arg(long, required = true, num_args = 1..)]
        decomposition: Vec<PathBuf>,
        /// Verify independent files in parallel
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check papartition families: shapes, non-repetition, distance
    Papartitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long = "file", required = true, num_args = 1..)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check that wreath lists cover every k-subset exactly once
    Wreaths {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "file", required = true, num_args = 1..)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Failure modes mapped to process exit codes.
enum CliError {
    /// Exit 1: a verification reported violations.
    VerificationFailed,
    /// Exit 2: a construction could not be completed.
    Construction(String),
    /// Exit 3: unusable input.
    Input(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::Construction(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::VerificationFailed => {}
                CliError::Construction(msg) => eprintln!("error: {msg}"),
                CliError::Input(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Input(e.to_string()))
        }
    }
}

fn load_instance(
    path: &Path,
) -> Result<(papart::TwoColoredInstance, Params), CliError> {
    let text = read_input(path)?;
    let parsed = if io::looks_like_json(&text) {
        io::parse_instance_json(&text)
    } else {
        io::parse_instance(&text)
    };
    parsed.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Gen {
            m,
            ell,
            alpha,
            red_max,
            seed,
            out,
            format,
        } => {
            let params =
                Params::new(ell, alpha).map_err(|e| CliError::Input(e.to_string()))?;
            let inst = papart::random_dense_instance(m, &params, red_max, seed)
                .map_err(|e| CliError::Construction(e.to_string()))?;
            let content = match format {
                Format::Text => io::print_instance(&inst, &params),
                Format::Json => io::print_instance_json(&inst, &params),
            };
            write_output(out.as_deref(), &content)
        }
        Cmd::Tile { input, out, format } => {
            let (inst, params) = load_instance(&input)?;
            let d = tiling::almost_ell_decomposition(inst.blue(), &params)
                .map_err(|e| CliError::Construction(e.to_string()))?;
            let content = match format {
                Format::Text => io::print_decomposition(&d),
                Format::Json => io::print_decomposition_json(&d),
            };
            write_output(out.as_deref(), &content)
        }
        Cmd::Repair {
            input,
            out,
            trace,
            format,
        } => {
            let (inst, params) = load_instance(&input)?;
            let (d, repair_trace) = repair::bag_free_decomposition(&inst, &params)
                .map_err(|e| CliError::Construction(e.to_string()))?;
            if let Some(path) = trace {
                fs::write(&path, repair_trace.render())
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            let content = match format {
                Format::Text => io::print_decomposition(&d),
                Format::Json => io::print_decomposition_json(&d),
            };
            write_output(out.as_deref(), &content)
        }
        Cmd::Papartitions {
            n,
            k,
            ell,
            alpha,
            out,
            format,
        } => {
            let fam = papartition::construct_papartitions(n, k, ell, alpha)
                .map_err(|e| CliError::Construction(e.to_string()))?;
            let content = match format {
                Format::Text => io::print_papartitions(&fam),
                Format::Json => io::print_papartitions_json(&fam),
            };
            write_output(out.as_deref(), &content)
        }
        Cmd::Verify { what } => run_verify(what),
        Cmd::Wreath {
            n,
            k,
            budget,
            ledger,
            seed,
            out,
            format,
        } => {
            let result = wreath::wreath_decomposition_search_counted(n, k, budget);
            let (status, steps_used) = match &result {
                Ok((Some(_), steps)) => ("found", *steps),
                Ok((None, steps)) => ("none", *steps),
                Err(wreath::WreathError::BudgetExceeded { steps }) => ("budget", *steps),
                Err(e) => return Err(CliError::Input(e.to_string())),
            };
            if let Some(path) = &ledger {
                let mut file = fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                writeln!(file, "{n} {k} {status} {steps_used} {seed}")
                    .map_err(|e| CliError::Input(e.to_string()))?;
            }
            match result {
                Ok((Some(ws), _)) => {
                    let content: String = match format {
                        Format::Text => io::print_wreaths(n, k, &ws),
                        Format::Json => io::print_wreaths_json(n, k, &ws),
                    };
                    write_output(out.as_deref(), &content)
                }
                Ok((None, _)) => {
                    println!("no wreath decomposition exists for n={n}, k={k}");
                    Ok(())
                }
                Err(e) => Err(CliError::Construction(e.to_string())),
            }
        }
    }
}

/// Runs `work` over the files, `jobs` at a time, keeping input order.
fn in_batches<T: Send>(
    files: &[PathBuf],
    jobs: usize,
    work: impl Fn(&Path) -> T + Sync,
) -> Vec<T> {
    let jobs = jobs.max(1);
    if jobs == 1 || files.len() <= 1 {
        return files.iter().map(|f| work(f)).collect();
    }
    let results: Vec<std::sync::Mutex<Option<T>>> =
        files.iter().map(|_| std::sync::Mutex::new(None)).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(files.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= files.len() {
                    break;
                }
                *results[i].lock().unwrap() = Some(work(&files[i]));
            });
        }
    });
    results
        .into_iter()
        .map(|cell| cell.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

fn run_verify(what: VerifyCmd) -> Result<(), CliError> {
    match what {
        VerifyCmd::Decomposition {
            instance,
            decomposition,
            jobs,
        } => {
            let (inst, params) = load_instance(&instance)?;
            let reports = in_batches(&decomposition, jobs, |path| {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let d = if io::looks_like_json(&text) {
                    io::parse_decomposition_json(&text)
                } else {
                    io::parse_decomposition(&text)
                }
                .map_err(|e| format!("{}: {e}", path.display()))?;
                let mut report = oracle::verify_decomposition(inst.blue(), params.ell, &d);
                let bag_report = oracle::verify_bag_free(&inst, &d);
                report.violations.extend(bag_report.violations);
                if report.pass() {
                    let mut min_partners = usize::MAX;
                    for c in d.classes() {
                        let partners = compound::compound_partners(inst.blue(), &d, c)
                            .map(|p| p.len())
                            .unwrap_or(0);
                        min_partners = min_partners.min(partners);
                    }
                    if min_partners != usize::MAX {
                        report.notes.push(format!(
                            "minimum compound partners per class: {min_partners} (guaranteed bound {:.3})",
                            compound::compound_partners_lower_bound(inst.m(), &params)
                        ));
                    }
                }
                Ok::<oracle::Report, String>(report)
            });
            print_reports(&decomposition, reports)
        }
        VerifyCmd::Papartitions {
            n,
            k,
            ell,
            files,
            jobs,
        } => {
            let reports = in_batches(&files, jobs, |path| {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let fam = if io::looks_like_json(&text) {
                    io::parse_papartitions_json(&text)
                } else {
                    io::parse_papartitions(&text)
                }
                .map_err(|e| format!("{}: {e}", path.display()))?;
                Ok::<oracle::Report, String>(oracle::verify_papartition_family(n, k, ell, &fam))
            });
            print_reports(&files, reports)
        }
        VerifyCmd::Wreaths { n, k, files, jobs } => {
            let reports = in_batches(&files, jobs, |path| {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let (fn_, fk, ws) = if io::looks_like_json(&text) {
                    io::parse_wreaths_json(&text)
                } else {
                    io::parse_wreaths(&text)
                }
                .map_err(|e| format!("{}: {e}", path.display()))?;
                let mut report = oracle::Report::default();
                if fn_ != n || fk != k {
                    report.violations.push(format!(
                        "file is for n={fn_}, k={fk}, expected n={n}, k={k}"
                    ));
                }
                let inner = wreath::verify_wreath_decomposition(n, k, &ws);
                report.violations.extend(inner.violations);
                report.notes.extend(inner.notes);
                Ok::<oracle::Report, String>(report)
            });
            print_reports(&files, reports)
        }
    }
}

fn print_reports(
    files: &[PathBuf],
    reports: Vec<Result<oracle::Report, String>>,
) -> Result<(), CliError> {
    let mut any_fail = false;
    let mut any_input_error = false;
    for (path, result) in files.iter().zip(reports) {
        match result {
            Ok(report) => {
                println!("== {}", path.display());
                print!("{report}");
                println!();
                if !report.pass() {
                    any_fail = true;
                }
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                any_input_error = true;
            }
        }
    }
    if any_input_error {
        Err(CliError::Input("could not read every input".into()))
    } else if any_fail {
        Err(CliError::VerificationFailed)
    } else {
        Ok(())
    }
}
