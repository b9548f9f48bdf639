use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cauchy_gof::cli::{
    exit_code, read_input, render_critical_values, render_power, render_sample, render_test_report, run_test,
    OutputFormat, TestRequest,
};
use cauchy_gof::distributions::{sample, AlternativeSpec};
use cauchy_gof::error::Result;
use cauchy_gof::estimation::{FitMode, ScalingExponent};
use cauchy_gof::montecarlo::{calibrate, power_study, CalibrationSpec, PowerStudySpec};
use cauchy_gof::statistic::{Method, TestConfig};

/// Characteristic-function goodness-of-fit test for the Cauchy distribution.
#[derive(Parser)]
#[command(name = "cauchy-gof", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a data file for the Cauchy hypothesis.
    Test(TestArgs),
    /// Simulate critical values under the null.
    Calibrate(CalibrateArgs),
    /// Estimate rejection rates against alternatives.
    Power(PowerArgs),
    /// Draw a sample from a distribution.
    Sample(SampleArgs),
}

#[derive(Args)]
struct StatisticArgs {
    /// Scaling exponent applied to the fitted scale (1 or 0.5).
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    /// vstat, quadrature or auto.
    #[arg(long, default_value = "auto")]
    method: Method,
    /// joint (location and scale) or scale-only.
    #[arg(long, default_value = "joint")]
    fit_mode: FitMode,
    /// Minimum number of quadrature nodes.
    #[arg(long, default_value_t = 64)]
    quad_nodes: usize,
    /// Worker threads; 0 for all cores. Defaults to GOF_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

impl StatisticArgs {
    fn config(&self, a: f64, gamma: f64) -> Result<TestConfig> {
        let cfg = TestConfig {
            a,
            gamma,
            exponent: ScalingExponent::new(self.exponent)?,
            fit_mode: self.fit_mode,
            method: self.method,
            quad_nodes: self.quad_nodes,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct TestArgs {
    /// Data file, one number per line (or CSV with --column); `-` for stdin.
    input: PathBuf,
    /// CSV column, by header name or zero-based index.
    #[arg(long)]
    column: Option<String>,
    #[arg(long, default_value_t = 6.0)]
    a: f64,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// Null replications for a Monte Carlo p-value; the decision then uses the p-value.
    #[arg(long)]
    pvalue_reps: Option<usize>,
    /// Null replications for the critical value when no p-value is requested.
    #[arg(long, default_value_t = 10_000)]
    calibration_reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also run the KS, CvM, AD and Watson tests.
    #[arg(long)]
    baselines: bool,
    #[command(flatten)]
    stat: StatisticArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 6.0)]
    a: f64,
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    #[arg(long, default_value_t = 100_000)]
    reps: usize,
    /// Significance levels, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.10")]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    stat: StatisticArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: OutputFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PowerArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Alternatives, e.g. `t:4,stable:1.5,tukey:0.1,normal,laplace,uniform,cauchy:0,2`.
    #[arg(long)]
    alts: String,
    /// Values of a, comma separated; one column per (gamma, a) pair.
    #[arg(long, value_delimiter = ',', default_value = "6")]
    a: Vec<f64>,
    /// Values of gamma, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2.5")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 3000)]
    reps: usize,
    #[arg(long, default_value_t = 0.10)]
    level: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report KS, CvM, AD and Watson power.
    #[arg(long)]
    baselines: bool,
    /// Null replications behind each critical value.
    #[arg(long, default_value_t = 10_000)]
    calibration_reps: usize,
    #[command(flatten)]
    stat: StatisticArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: OutputFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Distribution, e.g. `cauchy`, `cauchy:1,2`, `t:4`, `stable:1.5`, `tukey:0.1`.
    #[arg(long)]
    dist: AlternativeSpec,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Test(args) => {
            let x = read_input(&args.input, args.column.as_deref())?;
            let req = TestRequest {
                cfg: args.stat.config(args.a, args.gamma)?,
                level: args.level,
                pvalue_reps: args.pvalue_reps,
                calibration_reps: args.calibration_reps,
                seed: args.seed,
                baselines: args.baselines,
                threads: args.stat.threads,
            };
            let report = run_test(&x, &req)?;
            emit(&render_test_report(&report, args.format)?, args.output.as_ref())
        }
        Command::Calibrate(args) => {
            let cfg = args.stat.config(args.a, args.gamma)?;
            let mut levels = args.levels.clone();
            levels.sort_by(f64::total_cmp);
            let tables = args
                .n
                .iter()
                .map(|&n| {
                    calibrate(&CalibrationSpec {
                        n,
                        cfg,
                        reps: args.reps,
                        levels: levels.clone(),
                        seed: args.seed,
                        threads: args.stat.threads,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&render_critical_values(&tables, args.format)?, args.output.as_ref())
        }
        Command::Power(args) => {
            let alternatives = AlternativeSpec::parse_list(&args.alts)?;
            let mut tables = Vec::new();
            for &gamma in &args.gamma {
                for &a in &args.a {
                    tables.push(power_study(&PowerStudySpec {
                        n: args.n,
                        alternatives: alternatives.clone(),
                        cfg: args.stat.config(a, gamma)?,
                        reps: args.reps,
                        level: args.level,
                        seed: args.seed,
                        baseline_tests: args.baselines,
                        calibration_reps: args.calibration_reps,
                        threads: args.stat.threads,
                    })?);
                }
            }
            emit(&render_power(&tables, args.format)?, args.output.as_ref())
        }
        Command::Sample(args) => {
            let x = sample(&args.dist, args.n, args.seed)?;
            emit(&render_sample(&x), args.output.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
