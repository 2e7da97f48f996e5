use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{error, info};
use serde::Serialize;

use qrainbow::chain::DEFAULT_SIZE_CAP;
use qrainbow::designer::{fields_from_energies, uniform_q_fields, DesignResult, DesignTarget};
use qrainbow::primes::{normalization, prime_spectrum, prime_spectrum_target, Normalization, PrimeSpectrum};
use qrainbow::rg::DEFAULT_VALIDITY_THRESHOLD;
use qrainbow::ChainSpec;

mod error;
mod io;
mod report;
mod sweep;

use error::{CliError, Result};
use io::{emit, read_json, to_json, write_file, SpecInput};
use report::{simulate, Report, Settings};

#[derive(Debug, Parser)]
#[command(name = "qrainbow", version, about = "Simulate and design q-deformed rainbow spin chains")]
struct Cli {
    /// Output path (a directory for `design`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "QRAINBOW_THREADS")]
    threads: Option<usize>,

    /// Largest Hilbert-space dimension 2^(2N) accepted for exact diagonalization.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,

    /// Validity ratio above which a pair is flagged as outside the strong-inhomogeneity regime.
    #[arg(long, global = true, default_value_t = DEFAULT_VALIDITY_THRESHOLD)]
    validity_threshold: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and rainbow-ansatz analysis of a chain given as {"J": [...], "h": [...]}.
    Simulate { config: PathBuf },
    /// Design fields for target energies or entropies and analyse the result.
    Design { target: PathBuf },
    /// Evaluate a parameter grid and write CSV.
    Sweep { grid: PathBuf },
    /// Prime-number spectrum eps_p = s ln p, optionally designed onto couplings J.
    Prime {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        pairs: usize,
        /// Comma-separated couplings; designs and analyses a chain when given.
        #[arg(long = "J", value_delimiter = ',')]
        couplings: Option<Vec<f64>>,
    },
    /// Fields giving every pair the same deformation q.
    UniformQ {
        #[arg(long)]
        q: f64,
        /// Comma-separated couplings.
        #[arg(long = "J", value_delimiter = ',', required = true)]
        couplings: Vec<f64>,
    },
}

#[derive(Serialize)]
struct DesignSummary<'a> {
    target: &'a DesignTarget,
    permutation: &'a [usize],
    eps_targets: &'a [f64],
    eps_ansatz: Vec<f64>,
    eps_exact: &'a [f64],
}

#[derive(Serialize)]
struct DesignOutput<'a> {
    spec: &'a ChainSpec,
    design: DesignSummary<'a>,
    report: &'a Report,
}

#[derive(Serialize)]
struct PrimeOutput<'a> {
    spectrum: &'a PrimeSpectrum,
    normalization: &'a Normalization,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<DesignOutput<'a>>,
}

#[derive(Serialize)]
struct UniformOutput<'a> {
    q: f64,
    spec: &'a ChainSpec,
    report: &'a Report,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::Input(format!("cannot start {n} threads: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if !(cli.validity_threshold > 0.0) {
        return Err(CliError::Input("--validity-threshold must be positive".into()));
    }
    let settings = Settings { size_cap: cli.size_cap, validity_threshold: cli.validity_threshold };
    let out = cli.out.as_ref();
    match &cli.command {
        Command::Simulate { config } => {
            let spec = read_json::<SpecInput>(config)?.into_spec()?;
            let report = simulate(&spec, &settings)?;
            emit(out, &to_json(&report))
        }
        Command::Design { target } => {
            let target: DesignTarget = read_json(target)?;
            target.validate().map_err(CliError::from_core)?;
            let design = fields_from_energies(&target).map_err(CliError::from_design)?;
            let report = simulate(&design.spec, &settings)?;
            eprint!("{}", eps_table(&design, &report));
            let summary = design_summary(&target, &design, &report);
            match out {
                Some(dir) => write_design(dir, &design.spec, &summary, &report),
                None => emit(None, &to_json(&DesignOutput { spec: &design.spec, design: summary, report: &report })),
            }
        }
        Command::Sweep { grid } => {
            let grid: sweep::SweepGrid = read_json(grid)?;
            let csv = sweep::run(&grid, &settings)?;
            info!("sweep produced {} rows", csv.lines().count().saturating_sub(1));
            emit(out, &csv)
        }
        Command::Prime { s, pairs, couplings } => {
            let spectrum = prime_spectrum(*s, *pairs).map_err(CliError::from_core)?;
            let norm = normalization(*s, qrainbow::primes::MIN_TRUNCATION).map_err(CliError::from_core)?;
            let designed = match couplings {
                Some(j) => {
                    let target = prime_spectrum_target(*s, *pairs, j.clone()).map_err(CliError::from_core)?;
                    target.validate().map_err(CliError::from_core)?;
                    let design = fields_from_energies(&target).map_err(CliError::from_design)?;
                    let report = simulate(&design.spec, &settings)?;
                    eprint!("{}", eps_table(&design, &report));
                    Some((target, design, report))
                }
                None => None,
            };
            let design = designed.as_ref().map(|(t, d, r)| DesignOutput {
                spec: &d.spec,
                design: design_summary(t, d, r),
                report: r,
            });
            emit(out, &to_json(&PrimeOutput { spectrum: &spectrum, normalization: &norm, design }))
        }
        Command::UniformQ { q, couplings } => {
            let spec = uniform_q_fields(*q, couplings).map_err(CliError::from_core)?;
            let report = simulate(&spec, &settings)?;
            emit(out, &to_json(&UniformOutput { q: *q, spec: &spec, report: &report }))
        }
    }
}

fn design_summary<'a>(target: &'a DesignTarget, design: &'a DesignResult, report: &'a Report) -> DesignSummary<'a> {
    DesignSummary {
        target,
        permutation: &design.permutation,
        eps_targets: &design.eps_targets,
        eps_ansatz: design.profile.gammas().iter().map(|g| -2.0 * g).collect(),
        eps_exact: &report.freefermion.eps,
    }
}

fn write_design(dir: &Path, spec: &ChainSpec, summary: &DesignSummary, report: &Report) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_owned(), source })?;
    write_file(&dir.join("spec.json"), &to_json(spec))?;
    write_file(&dir.join("design.json"), &to_json(summary))?;
    write_file(&dir.join("report.json"), &to_json(report))
}

/// Target, ansatz and exact (free-fermion) energies side by side. Exact
/// energies carry no pair label and are matched by rank.
fn eps_table(design: &DesignResult, report: &Report) -> String {
    let mut exact: Vec<f64> = report.freefermion.eps.clone();
    exact.sort_by(|a, b| b.total_cmp(a));
    let mut rank: Vec<usize> = (0..design.eps_targets.len()).collect();
    rank.sort_by(|&a, &b| design.eps_targets[b].total_cmp(&design.eps_targets[a]));
    let mut matched = vec![f64::NAN; rank.len()];
    for (r, &pair) in rank.iter().enumerate() {
        if let Some(&e) = exact.get(r) {
            matched[pair] = e;
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "{:>4} {:>6} {:>14} {:>14} {:>14} {:>10}", "pair", "target", "eps_target", "eps_ansatz", "eps_exact", "validity");
    for (i, (&t, g)) in design.eps_targets.iter().zip(design.profile.gammas()).enumerate() {
        let _ = writeln!(
            s,
            "{:>4} {:>6} {:>14.8} {:>14.8} {:>14.8} {:>10.2e}",
            i + 1,
            design.permutation[i] + 1,
            t,
            -2.0 * g,
            matched[i],
            design.profile.validity_ratio[i]
        );
    }
    s
}
