use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use stac_core::{
    read_solution, run_benchmark, validate_solution, write_solution, BenchmarkConfig, PlannerKind, Scenario,
    SolutionRecord, StacParams,
};

#[derive(Parser)]
#[command(name = "stac", version, about = "Multi-robot motion planning by scheduling over fixed paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario and write the solution file.
    Solve {
        /// Scenario JSON file or built-in scenario name.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "stac")]
        planner: PlannerKind,
        /// Schedule attempts per path set.
        #[arg(long, default_value_t = 200)]
        nra: usize,
        /// Time budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run repeated trials and write per-trial rows and solve-time CDFs.
    Bench {
        /// Directory of scenario JSON files.
        #[arg(long)]
        scenarios: PathBuf,
        /// Comma-separated planner names.
        #[arg(long, value_delimiter = ',', default_value = "stac,sync")]
        planners: Vec<PlannerKind>,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 200)]
        nra: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        cdf: Option<PathBuf>,
    },
    /// Check a solution file against its scenario.
    Validate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        solution: PathBuf,
    },
    /// List the built-in scenarios, or write them as JSON files.
    Scenarios {
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

/// Input problems exit with 2, planning failures with 1.
enum Outcome {
    Solved,
    Failed,
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(s) = Scenario::builtin(arg) {
            return Ok(s);
        }
    }
    Scenario::load(path).with_context(|| format!("loading scenario {arg}"))
}

fn timeout(seconds: f64) -> Result<Duration> {
    if !(seconds > 0.0) || !seconds.is_finite() {
        bail!("timeout must be a positive number of seconds");
    }
    Ok(Duration::from_secs_f64(seconds))
}

fn scenario_dir(dir: &Path) -> Result<Vec<Scenario>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no scenario files in {}", dir.display());
    }
    files
        .iter()
        .map(|f| Scenario::load(f).with_context(|| format!("loading {}", f.display())))
        .collect()
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Solve {
            scenario,
            planner,
            nra,
            timeout: secs,
            seed,
            out,
        } => {
            let scenario = load_scenario(&scenario)?;
            if nra == 0 {
                bail!("--nra must be at least 1");
            }
            let params = StacParams {
                nra,
                timeout: timeout(secs)?,
                seed,
                ..Default::default()
            };
            match planner.solve(&scenario, &params) {
                Ok(sol) => {
                    let s = &sol.stats;
                    println!(
                        "solved {} with {planner}: {:.3} s, {} path sets, {} schedules, {} timesteps",
                        scenario.name,
                        s.solve_time,
                        s.queries,
                        s.schedule_attempts,
                        sol.candidate.num_timesteps()
                    );
                    if let Some(out) = out {
                        let text = write_solution(&SolutionRecord::from_solution(&scenario.name, &sol));
                        std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
                    }
                    Ok(Outcome::Solved)
                }
                Err(f) => {
                    println!(
                        "failed on {} with {planner}: {} after {:.3} s, {} path sets, {} schedules",
                        scenario.name, f.reason, f.stats.solve_time, f.stats.queries, f.stats.schedule_attempts
                    );
                    Ok(Outcome::Failed)
                }
            }
        }
        Command::Bench {
            scenarios,
            planners,
            trials,
            timeout: secs,
            nra,
            base_seed,
            csv,
            cdf,
        } => {
            let scenarios = scenario_dir(&scenarios)?;
            if nra == 0 {
                bail!("--nra must be at least 1");
            }
            let config = BenchmarkConfig {
                trials,
                base_seed,
                timeout: timeout(secs)?,
                params: StacParams {
                    nra,
                    ..Default::default()
                },
            };
            let report = run_benchmark(&scenarios, &planners, &config, |r| {
                eprintln!(
                    "{} {} seed {}: {} in {:.3} s",
                    r.scenario,
                    r.planner,
                    r.seed,
                    if r.success { "ok" } else { "failed" },
                    r.solve_time_s
                );
            });
            report
                .write_csv(File::create(&csv).with_context(|| format!("creating {}", csv.display()))?)
                .context("writing rows")?;
            if let Some(cdf) = cdf {
                report
                    .write_cdf_csv(File::create(&cdf).with_context(|| format!("creating {}", cdf.display()))?)
                    .context("writing cdf")?;
            }
            println!("scenario\tplanner\tsuccess\ttime q1/med/q3 (s)\tqueries q1/med/q3\tcoord ratio");
            for a in report.aggregates() {
                println!(
                    "{}\t{}\t{:.2}\t{:.2}/{:.2}/{:.2}\t{:.1}/{:.1}/{:.1}\t{:.3}",
                    a.scenario,
                    a.planner,
                    a.success_rate,
                    a.solve_time.q1,
                    a.solve_time.median,
                    a.solve_time.q3,
                    a.queries.q1,
                    a.queries.median,
                    a.queries.q3,
                    a.mean_coord_ratio
                );
            }
            Ok(Outcome::Solved)
        }
        Command::Validate { scenario, solution } => {
            let scenario = load_scenario(&scenario)?;
            let text =
                std::fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let record = read_solution(&text, &scenario.models()).context("parsing solution")?;
            match validate_solution(&scenario, &record.paths, &record.candidate, record.resolution / 2.0) {
                Ok(()) => {
                    println!("valid: {} timesteps", record.candidate.num_timesteps());
                    Ok(Outcome::Solved)
                }
                Err(problems) => {
                    for p in problems {
                        println!("invalid: {p}");
                    }
                    Ok(Outcome::Failed)
                }
            }
        }
        Command::Scenarios { dump } => {
            for name in Scenario::builtin_names() {
                match &dump {
                    Some(dir) => {
                        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                        let f = dir.join(format!("{name}.json"));
                        Scenario::builtin(name)?.save(&f)?;
                        println!("{}", f.display());
                    }
                    None => println!("{name}"),
                }
            }
            Ok(Outcome::Solved)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Solved) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
