use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand};
use energame::checks::{parse_checks, Check};
use energame::doc::{csv_string, tolerances_from_env, Document, Envelope, Format};
use energame::error::{CliError, ExitCode};
use energame::report::ReportOptions;
use energame::shapley::{Mode, ShapleyOptions};
use energame::sweep::{GraphClass, SweepConfig};
use energame::{audit, input, report, shapley, sweep};
use energame_core::Tolerances;
use serde::Serialize;

static STOP: AtomicBool = AtomicBool::new(false);

/// Energy games on graphs: reports, audits, sweeps and Shapley values.
///
/// INPUT is a generator spec (path:6, star:5, cycle:4, complete:4,
/// kbip:2,3), an edge-list or graph6 file, or a graph6 string. Vertices
/// are numbered from 0. Set ENERGAME_TOL to override the core tolerance.
#[derive(Parser)]
#[command(name = "energame", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format: json, csv or text.
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum, energies, Shapley value and core certificates of one graph.
    Report {
        input: String,
        /// Comma-separated exponents p >= 1.
        #[arg(long = "p-grid", visible_alias = "p", value_delimiter = ',', default_value = "1")]
        p_grid: Vec<f64>,
        /// Monte Carlo orderings when n > 12.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Every inequality and game audit on one graph.
    Audit {
        input: String,
        #[arg(long = "p-grid", visible_alias = "p", value_delimiter = ',', default_value = "1,1.5,2,3")]
        p_grid: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive scan over all labeled graphs or trees up to --max-n.
    Sweep {
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        min_n: usize,
        /// graphs or trees.
        #[arg(long, default_value = "graphs")]
        class: GraphClass,
        /// Comma-separated check ids; defaults to superadditivity,vertex-core
        /// for graphs and tree-extremal for trees.
        #[arg(long)]
        checks: Option<String>,
        #[arg(long = "p-grid", visible_alias = "p", value_delimiter = ',', default_value = "1")]
        p_grid: Vec<f64>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        /// Directory receiving sweep.json and sweep.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// The Shapley value of the p-energy game.
    Shapley {
        input: String,
        /// exact or mc.
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Sampled orderings in mc mode; 0 enumerates all of them (n <= 8).
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn emit<T: Serialize, R: Serialize>(
    format: Format,
    doc: &Document<T>,
    rows: &[R],
    text: impl FnOnce() -> String,
) -> Result<(), CliError> {
    let out = match format {
        Format::Json => doc.to_json()? + "\n",
        Format::Csv => csv_string(rows)?,
        Format::Text => text(),
    };
    io::stdout().write_all(out.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
}

fn io_err(path: &std::path::Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn run_sweep(cfg: SweepConfig, out: Option<PathBuf>, format: Format, tol: Tolerances) -> Result<ExitCode, CliError> {
    cfg.validate()?;
    ctrlc::set_handler(|| STOP.store(true, Ordering::SeqCst))
        .map_err(|e| CliError::Output(format!("installing interrupt handler: {e}")))?;
    let envelope = Envelope::new("sweep", cfg.canonical().as_bytes(), tol);

    let mut csv_file;
    let mut stdout;
    let sink: Option<&mut dyn Write> = if let Some(dir) = &out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join("sweep.csv");
        csv_file = io::BufWriter::new(fs::File::create(&path).map_err(io_err(&path))?);
        Some(&mut csv_file)
    } else if format == Format::Csv {
        stdout = io::stdout().lock();
        Some(&mut stdout)
    } else {
        None
    };
    let result = sweep::run(&cfg, sink, &STOP)?;
    let exit = result.exit();
    let doc = Document { envelope, body: result };

    if let Some(dir) = &out {
        let path = dir.join("sweep.json");
        fs::write(&path, doc.to_json()? + "\n").map_err(io_err(&path))?;
    }
    let r = &doc.body;
    let summary = || {
        let mut s = format!(
            "{}scanned {} graphs, {} checks, {} violations ({} surviving re-verification)\n",
            if r.partial { "PARTIAL: " } else { "" },
            r.counts.graphs_scanned,
            r.counts.checks_run,
            r.counts.violations_raw,
            r.counts.violations_surviving
        );
        for (id, w) in &r.worst_slack {
            s += &format!("  {id:<24} worst slack {:+.3e} at {}\n", w.slack, w.graph6);
        }
        for t in &r.tree_extremes {
            s += &format!(
                "  trees n={} p={}: min {:.6} (star {:.6}, path {:.6}), max {:.6}, margins {:+.3e} / {:+.3e}\n",
                t.n, t.p, t.min, t.star, t.path, t.max, t.lower_margin, t.upper_margin
            );
        }
        s
    };
    let text = match format {
        Format::Json => doc.to_json()? + "\n",
        Format::Text => summary(),
        Format::Csv if out.is_some() => summary(),
        Format::Csv => String::new(),
    };
    if format == Format::Csv && out.is_none() {
        eprint!("{}", summary());
    } else {
        io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(exit)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let tol = tolerances_from_env().map_err(CliError::Usage)?;
    match cli.command {
        Command::Report { input, p_grid, samples, seed, common } => {
            let loaded = input::load(&input)?;
            let r = report::run(&loaded.graph, &ReportOptions { p_grid, samples, seed }, &tol)?;
            for n in &r.notices {
                eprintln!("note: {n}");
            }
            let doc = Document { envelope: Envelope::new("report", &loaded.digest_source, tol), body: r };
            emit(common.format, &doc, &doc.body.csv_rows(), || doc.body.to_text())?;
            Ok(ExitCode::Ok)
        }
        Command::Audit { input, p_grid, common } => {
            let loaded = input::load(&input)?;
            let a = audit::run(&loaded.graph, &p_grid, &tol)?;
            let exit = a.exit();
            let doc = Document { envelope: Envelope::new("audit", &loaded.digest_source, tol), body: a };
            emit(common.format, &doc, &doc.body.csv_rows(), || doc.body.to_text())?;
            Ok(exit)
        }
        Command::Sweep { max_n, min_n, class, checks, p_grid, jobs, out, common } => {
            let checks = match checks {
                Some(list) => parse_checks(&list).map_err(CliError::Usage)?,
                None => match class {
                    GraphClass::Graphs => vec![Check::Superadditivity, Check::VertexCore],
                    GraphClass::Trees => vec![Check::TreeExtremal],
                },
            };
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let cfg = SweepConfig { class, min_n, max_n, checks, p_grid, jobs, tol };
            run_sweep(cfg, out, common.format, tol)
        }
        Command::Shapley { input, mode, p, samples, seed, common } => {
            let loaded = input::load(&input)?;
            let v = shapley::run(&loaded.graph, &ShapleyOptions { mode, p, samples, seed })?;
            let doc = Document { envelope: Envelope::new("shapley", &loaded.digest_source, tol), body: v };
            emit(common.format, &doc, &doc.body.csv_rows(), || doc.body.to_text())?;
            Ok(ExitCode::Ok)
        }
    }
}

fn main() {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code.code());
}
