use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::json;

use kpzlab::scaling_lab::{
    cell_tail_report, check_lemma_2_3, check_lemma_3_2, estimate_chi, estimate_xi, ks_lattice,
    persist_campaign, probability_a, read_campaign_csv, run_campaign, self_sampled_lengths,
    tw_comparison, ExperimentConfig, FitSummary, TrialRecord,
};
use kpzlab::tracy_widom::{solve_hastings_mcleod, DEFAULT_TOL, DEFAULT_X_LEFT, DEFAULT_X_RIGHT};

#[derive(Parser)]
#[command(
    name = "kpzlab",
    version,
    about = "Last-passage percolation scaling laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write CSV plus JSON manifest.
    Simulate {
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<f64>,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.45,0.85")]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        intensity: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the longitudinal exponent from a campaign CSV.
    EstimateChi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit the transversal exponent from a campaign CSV.
    EstimateXi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fraction of trials whose maximal paths stay in the cylinder.
    ProbA {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        n: f64,
    },
    /// KS distance between scaled chain lengths and the Tracy–Widom law.
    TwCompare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Tabulate F(t) as CSV.
    TwTable {
        #[arg(long, default_value_t = DEFAULT_X_LEFT, allow_negative_numbers = true)]
        x_left: f64,
        #[arg(long, default_value_t = DEFAULT_X_RIGHT)]
        x_right: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the deterministic inequalities and the cell-count tail.
    CheckLemmas {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn load(path: &Path) -> anyhow::Result<Vec<TrialRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (records, _) = read_campaign_csv(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(records)
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn simulate(config: ExperimentConfig) -> anyhow::Result<()> {
    let start = Instant::now();
    let records = run_campaign(&config)?;
    let fits = FitSummary {
        chi: estimate_chi(&records).ok(),
        xi: estimate_xi(&records).ok(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let path = persist_campaign(&config, &records, fits.clone(), elapsed)?;
    print_json(&json!({
        "csv": path,
        "records": records.len(),
        "chi": fits.chi.map(|f| f.slope),
        "xi": fits.xi.map(|f| f.slope),
        "wall_time_seconds": elapsed,
    }))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            n_values,
            trials,
            gammas,
            seed,
            intensity,
            out,
        } => {
            let mut config = ExperimentConfig::new(n_values, trials, gammas, seed);
            config.intensity = intensity;
            config.output_path = Some(out);
            simulate(config)
        }
        Command::EstimateChi { input } => {
            print_json(&serde_json::to_value(estimate_chi(&load(&input)?)?)?)
        }
        Command::EstimateXi { input } => {
            print_json(&serde_json::to_value(estimate_xi(&load(&input)?)?)?)
        }
        Command::ProbA { input, gamma, n } => print_json(&serde_json::to_value(probability_a(
            &load(&input)?,
            gamma,
            n,
        )?)?),
        Command::TwCompare { input, n, seed } => {
            let records = load(&input)?;
            let sol = solve_hastings_mcleod(DEFAULT_X_LEFT, DEFAULT_X_RIGHT, DEFAULT_TOL)?;
            let ks = tw_comparison(&records, &sol, n)?;
            let trials = records.iter().filter(|r| r.n == n).count();
            let lambda = n * n;
            let reference = ks_lattice(
                &self_sampled_lengths(&sol, lambda, trials, seed),
                lambda,
                &sol,
            );
            print_json(&json!({
                "n": n,
                "trials": trials,
                "ks": ks,
                "self_sampled_ks": reference,
            }))
        }
        Command::TwTable {
            x_left,
            x_right,
            tol,
            out,
        } => {
            let sol = solve_hastings_mcleod(x_left, x_right, tol)?;
            match out {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    sol.write_table_csv(BufWriter::new(file))?;
                }
                None => sol.write_table_csv(io::stdout().lock())?,
            }
            Ok(())
        }
        Command::CheckLemmas {
            n,
            gamma,
            b,
            trials,
            seed,
        } => {
            let lemma_2_3 = check_lemma_2_3(n, gamma, b)?;
            let lemma_3_2 = if gamma > 2.0 / 3.0 {
                Some(check_lemma_3_2(n, gamma)?)
            } else {
                None
            };
            let tail = cell_tail_report(n, gamma, trials, seed)?;
            let passed = lemma_2_3 <= 0.0 && lemma_3_2.is_none_or(|g| g <= 0.0) && tail.passed;
            print_json(&json!({
                "lemma_2_3_gap": lemma_2_3,
                "lemma_3_2_gap": lemma_3_2,
                "cell_tail": tail,
                "passed": passed,
            }))?;
            if !passed {
                bail!("at least one check failed");
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
