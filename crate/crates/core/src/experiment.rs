//! The `tsp-anneal` command line: subcommands over the library, a fully
//! resolved configuration per run, and plot-ready CSV/JSON output.
//!
//! Every data file `<name>` is accompanied by `<name>.meta.json`, which holds
//! the effective configuration. `rerun --sidecar <file>` replays it and
//! reproduces the data files byte for byte.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic::{annealed_exact_sample, bound_report, schedule_bounds, BoundReport};
use crate::chain::{
    annealed_mh_sample, default_annealed_burn_in, default_burn_in, epoch_schedule_from_theorem,
    quenched_samples, simulated_annealing, AnnealOptions, AnnealedConfig, CoolingSchedule, QuenchedConfig,
};
use crate::error::{Error, Result};
use crate::instance::{Instance, Tour, WeightModel};
use crate::oracle::verify_suite;
use crate::rng::{derive_seed, seeded_rng};
use crate::stats::{dominance_report, ecdf, EmpiricalCdf, DEFAULT_DELTA};

pub const SIDECAR_SUFFIX: &str = ".meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tsp-anneal", version, about = "Simulated annealing experiments on random TSP instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Master seed; every random stream of the run is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sampling. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Format of sample and trace files.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Uniform,
    Grid,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Uniform)]
    pub model: ModelArg,
    /// Grid size `N` for the grid model.
    #[arg(long = "levels", default_value_t = 50)]
    pub levels: u32,
}

impl ModelArgs {
    fn resolve(&self) -> WeightModel {
        match self.model {
            ModelArg::Uniform => WeightModel::ContinuousUniform,
            ModelArg::Grid => WeightModel::grid(self.levels),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Log,
    Constant,
    Epoch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance (instance.json).
    Gen {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run simulated annealing and record the tour-length trace.
    Anneal {
        /// Instance file from `gen`; otherwise one is generated from `--n`.
        #[arg(long, conflicts_with = "n")]
        instance: Option<PathBuf>,
        #[arg(long, required_unless_present = "instance")]
        n: Option<usize>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Log)]
        schedule: ScheduleArg,
        /// Schedule constant `a` (default `n`).
        #[arg(long)]
        a: Option<f64>,
        /// Temperature of the constant schedule.
        #[arg(long, default_value_t = 0.5)]
        temperature: f64,
        /// Number of epochs of the epoch-wise schedule.
        #[arg(long, default_value_t = 3)]
        epochs: usize,
        /// Epoch length multiplier `c` in `c n^9 k^2 ln n`.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Proposals to run; defaults to the full epoch plan for `--schedule epoch`.
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long, default_value_t = 1)]
        record_every: u64,
        #[arg(long)]
        lazy: bool,
    },
    /// Quenched samples: fresh instance per sample, Metropolis at fixed beta.
    SampleQuenched {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        model: ModelArgs,
        /// Metropolis steps per sample (default `50 n^3`).
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long)]
        count: usize,
    },
    /// Annealed samples from the extended chain, or exactly with `--exact`.
    SampleAnnealed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        /// Grid size `N` of the extended chain.
        #[arg(long = "levels", default_value_t = 50)]
        levels: u32,
        /// Default `max(50 n^3, 4 m N^2)` with `m = n(n-1)/2`.
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        thinning: u64,
        #[arg(long)]
        count: usize,
        /// Use the exact continuous sampler instead of the chain.
        #[arg(long)]
        exact: bool,
    },
    /// Closed-form bounds at fixed beta, or at iteration t of the log schedule.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "a", conflicts_with_all = ["a", "t"])]
        beta: Option<f64>,
        #[arg(long, requires = "t")]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        t: Option<f64>,
    },
    /// Exact invariant checks on a small uniform instance.
    OracleVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
    },
    /// Band-certified dominance check between two sample files.
    Dominance {
        #[arg(long)]
        quenched: PathBuf,
        #[arg(long)]
        annealed: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Quenched versus annealed tour-length ECDFs on grid weights.
    Fig1 {
        #[arg(long)]
        n: Option<usize>,
        /// Full-size run: n = 500 unless `--n` is given.
        #[arg(long)]
        full_scale: bool,
        #[arg(long = "levels", default_value_t = 50)]
        levels: u32,
        #[arg(long, default_value_t = 10.0)]
        beta: f64,
        /// Samples per side.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Extended-chain steps between annealed samples.
        #[arg(long, default_value_t = 10_000)]
        thinning: u64,
        /// Metropolis steps per quenched sample (default `200 n^2`).
        #[arg(long)]
        quenched_burn_in: Option<u64>,
        /// Extended-chain burn-in (default `max(50 n^3, 4 m N^2)`).
        #[arg(long)]
        annealed_burn_in: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Replay a run from its `.meta.json` sidecar into `--out`.
    Rerun {
        #[arg(long)]
        sidecar: PathBuf,
    },
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Gen { n: usize, model: WeightModel, seed: u64 },
    Anneal(AnnealRun),
    SampleQuenched(QuenchedConfig),
    SampleAnnealed { config: AnnealedConfig, exact: bool },
    Bounds(BoundsRun),
    OracleVerify { n: usize, beta: f64, seed: u64 },
    Dominance { quenched: PathBuf, annealed: PathBuf, delta: f64 },
    Fig1(Fig1Run),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealRun {
    /// The instance itself, so reruns do not depend on external files.
    pub instance: Instance,
    pub schedule: CoolingSchedule,
    pub options: AnnealOptions,
    pub start: Tour,
    pub chain_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BoundsRun {
    Fixed { n: usize, beta: f64 },
    Schedule { n: usize, a: f64, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig1Run {
    pub quenched: QuenchedConfig,
    pub annealed: AnnealedConfig,
    pub delta: f64,
}

/// Default Metropolis burn-in per quenched sample in `fig1`: `200 n^2`,
/// about 400 proposals per 2-opt move.
pub fn fig1_quenched_burn_in(n: usize) -> u64 {
    200 * (n as u64).pow(2)
}

/// Contents of a `.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    /// Master seed of the original command line; the configuration carries
    /// every derived seed it needs.
    pub seed: u64,
    pub format: Format,
    pub config: RunConfig,
    pub outputs: Vec<String>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {v} must be positive")))
    }
}

/// Turns parsed arguments into a [`RunConfig`]. `None` for `rerun`.
pub fn resolve(cli: &Cli) -> Result<Option<RunConfig>> {
    let seed = cli.seed;
    let cfg = match &cli.command {
        Command::Gen { n, model } => RunConfig::Gen { n: *n, model: model.resolve(), seed },
        Command::Anneal {
            instance,
            n,
            model,
            schedule,
            a,
            temperature,
            epochs,
            c,
            iterations,
            record_every,
            lazy,
        } => {
            let inst = match (instance, n) {
                (Some(path), _) => Instance::from_json(&read_file(path)?)?,
                (None, Some(n)) => Instance::generate(*n, model.resolve(), seed)?,
                (None, None) => return Err(Error::invalid("need --instance or --n")),
            };
            let n = inst.n();
            let a = a.unwrap_or(n as f64);
            let (schedule, planned) = match schedule {
                ScheduleArg::Log => (CoolingSchedule::Logarithmic { a }, None),
                ScheduleArg::Constant => (CoolingSchedule::Constant { temperature: *temperature }, None),
                ScheduleArg::Epoch => {
                    let plan = epoch_schedule_from_theorem(n, a, *epochs, *c)?;
                    (plan.schedule, Some(plan.total_iterations))
                }
            };
            schedule.validate()?;
            let iterations = match (iterations, planned) {
                (Some(i), _) => *i,
                (None, Some(total)) if total <= 1e12 => total as u64,
                (None, Some(total)) => {
                    return Err(Error::invalid(format!(
                        "epoch plan has {total:e} iterations; pass --iterations to truncate it"
                    )))
                }
                (None, None) => return Err(Error::invalid("--iterations is required")),
            };
            let start = Tour::random(n, &mut seeded_rng(derive_seed(seed, 2)));
            RunConfig::Anneal(AnnealRun {
                instance: inst,
                schedule,
                options: AnnealOptions { iterations, record_every: *record_every, lazy: *lazy },
                start,
                chain_seed: derive_seed(seed, 1),
            })
        }
        Command::SampleQuenched { n, beta, model, burn_in, count } => {
            RunConfig::SampleQuenched(QuenchedConfig {
                n: *n,
                model: model.resolve(),
                beta: *beta,
                burn_in: burn_in.unwrap_or_else(|| default_burn_in(*n)),
                count: *count,
                seed,
            })
        }
        Command::SampleAnnealed { n, beta, levels, burn_in, thinning, count, exact } => {
            RunConfig::SampleAnnealed {
                config: AnnealedConfig {
                    n: *n,
                    levels: *levels,
                    beta: *beta,
                    burn_in: burn_in.unwrap_or_else(|| default_annealed_burn_in(*n, *levels)),
                    thinning: *thinning,
                    count: *count,
                    seed,
                },
                exact: *exact,
            }
        }
        Command::Bounds { n, beta, a, t } => RunConfig::Bounds(match (beta, a, t) {
            (Some(beta), _, _) => BoundsRun::Fixed { n: *n, beta: *beta },
            (None, Some(a), Some(t)) => BoundsRun::Schedule { n: *n, a: *a, t: *t },
            _ => return Err(Error::invalid("need --beta, or --a and --t")),
        }),
        Command::OracleVerify { n, beta } => RunConfig::OracleVerify { n: *n, beta: *beta, seed },
        Command::Dominance { quenched, annealed, delta } => {
            RunConfig::Dominance { quenched: quenched.clone(), annealed: annealed.clone(), delta: *delta }
        }
        Command::Fig1 {
            n,
            full_scale,
            levels,
            beta,
            samples,
            thinning,
            quenched_burn_in,
            annealed_burn_in,
            delta,
        } => {
            let n = n.unwrap_or(if *full_scale { 500 } else { 100 });
            RunConfig::Fig1(Fig1Run {
                quenched: QuenchedConfig {
                    n,
                    model: WeightModel::grid(*levels),
                    beta: *beta,
                    burn_in: quenched_burn_in.unwrap_or_else(|| fig1_quenched_burn_in(n)),
                    count: *samples,
                    seed,
                },
                annealed: AnnealedConfig {
                    n,
                    levels: *levels,
                    beta: *beta,
                    burn_in: annealed_burn_in.unwrap_or_else(|| default_annealed_burn_in(n, *levels)),
                    thinning: *thinning,
                    count: *samples,
                    seed: derive_seed(seed, 1),
                },
                delta: *delta,
            })
        }
        Command::Rerun { .. } => return Ok(None),
    };
    Ok(Some(cfg))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// One file produced by a run, before it is written.
struct Output {
    name: String,
    contents: String,
}

fn samples_output(stem: &str, xs: &[f64], format: Format) -> Result<Output> {
    let contents = match format {
        Format::Csv => {
            let mut s = String::from("index,J\n");
            for (i, x) in xs.iter().enumerate() {
                writeln!(s, "{i},{x}").unwrap();
            }
            s
        }
        Format::Json => to_json(&xs)?,
    };
    Ok(Output { name: format!("{stem}.{}", format.ext()), contents })
}

fn ecdf_output(stem: &str, f: &EmpiricalCdf, format: Format) -> Result<Output> {
    let contents = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            f.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("ASCII output")
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Point {
                j: f64,
                #[serde(rename = "F")]
                f: f64,
            }
            to_json(&f.steps().into_iter().map(|(j, f)| Point { j, f }).collect::<Vec<_>>())?
        }
    };
    Ok(Output { name: format!("{stem}.{}", format.ext()), contents })
}

/// Reads samples written by `sample-quenched` / `sample-annealed` (CSV with a
/// `J` column, or a JSON array).
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('[') {
        return Ok(serde_json::from_str(&text)?);
    }
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::invalid(format!("{} is empty", path.display())))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == "J")
        .ok_or_else(|| Error::invalid(format!("{} has no J column", path.display())))?;
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .nth(col)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("bad row {l:?} in {}", path.display())))
        })
        .collect()
}

/// Result of executing one configuration: files plus text for stdout.
pub struct RunResult {
    pub written: Vec<PathBuf>,
    pub stdout: String,
    /// Set when a report's checks failed; mapped to the numerical exit code.
    pub failed: Option<String>,
}

fn compute(cfg: &RunConfig, format: Format) -> Result<(Vec<Output>, String, Option<String>)> {
    let mut failed = None;
    let (outputs, stdout) = match cfg {
        RunConfig::Gen { n, model, seed } => {
            let contents = Instance::generate(*n, *model, *seed)?.to_json()? + "\n";
            (vec![Output { name: "instance.json".into(), contents }], String::new())
        }
        RunConfig::Anneal(run) => {
            let trace =
                simulated_annealing(&run.instance, &run.schedule, &run.options, &run.start, run.chain_seed)?;
            let contents = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf).expect("writing to memory");
                    String::from_utf8(buf).expect("ASCII output")
                }
                Format::Json => to_json(&trace)?,
            };
            let summary = format!(
                "final J = {} after {} iterations ({} accepted)\n",
                trace.final_length, trace.iterations, trace.accepted_total
            );
            (vec![Output { name: format!("trace.{}", format.ext()), contents }], summary)
        }
        RunConfig::SampleQuenched(q) => {
            let xs = quenched_samples(q)?;
            (vec![samples_output("quenched_samples", &xs, format)?], String::new())
        }
        RunConfig::SampleAnnealed { config, exact } => {
            let xs = if *exact {
                annealed_exact_sample(config.n, config.beta, config.count, config.seed)?
            } else {
                annealed_mh_sample(config)?
            };
            (vec![samples_output("annealed_samples", &xs, format)?], String::new())
        }
        RunConfig::Bounds(b) => {
            let report: BoundReport = match *b {
                BoundsRun::Fixed { n, beta } => bound_report(n, beta)?,
                BoundsRun::Schedule { n, a, t } => schedule_bounds(n, a, t)?,
            };
            let s = to_json(&report)?;
            (vec![Output { name: "bounds.json".into(), contents: s.clone() }], s)
        }
        RunConfig::OracleVerify { n, beta, seed } => {
            let report = verify_suite(*n, *beta, *seed)?;
            if !report.all_pass {
                let names: Vec<_> =
                    report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                failed = Some(format!("failed checks: {}", names.join("; ")));
            }
            let s = to_json(&report)?;
            (vec![Output { name: "oracle_verify.json".into(), contents: s.clone() }], s)
        }
        RunConfig::Dominance { quenched, annealed, delta } => {
            let fq = ecdf(&read_samples(quenched)?)?;
            let fa = ecdf(&read_samples(annealed)?)?;
            let s = to_json(&dominance_report(&fq, &fa, *delta)?)?;
            (vec![Output { name: "dominance.json".into(), contents: s.clone() }], s)
        }
        RunConfig::Fig1(f) => {
            positive("delta", f.delta)?;
            let fq = ecdf(&quenched_samples(&f.quenched)?)?;
            let fa = ecdf(&annealed_mh_sample(&f.annealed)?)?;
            let report = dominance_report(&fq, &fa, f.delta)?;
            let s = to_json(&report)?;
            (
                vec![
                    ecdf_output("fig1_quenched_ecdf", &fq, format)?,
                    ecdf_output("fig1_annealed_ecdf", &fa, format)?,
                    Output { name: "fig1_dominance.json".into(), contents: s.clone() },
                ],
                s,
            )
        }
    };
    Ok((outputs, stdout, failed))
}

/// Executes a resolved configuration, writing data files and sidecars into `out`.
pub fn execute(cfg: &RunConfig, seed: u64, format: Format, out: &Path) -> Result<RunResult> {
    let (outputs, stdout, failed) = compute(cfg, format)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        format,
        config: cfg.clone(),
        outputs: outputs.iter().map(|o| o.name.clone()).collect(),
    };
    let meta = to_json(&sidecar)?;
    let mut written = Vec::new();
    for o in &outputs {
        let path = out.join(&o.name);
        write_file(&path, &o.contents)?;
        let side = out.join(format!("{}{SIDECAR_SUFFIX}", o.name));
        write_file(&side, &meta)?;
        written.push(path);
    }
    Ok(RunResult { written, stdout, failed })
}

/// Loads a sidecar, returning the configuration, master seed and format.
pub fn load_sidecar(path: &Path) -> Result<(RunConfig, u64, Format)> {
    let side: Sidecar = serde_json::from_str(&read_file(path)?)?;
    Ok((side.config, side.seed, side.format))
}

fn dispatch(cli: &Cli) -> Result<RunResult> {
    match resolve(cli)? {
        Some(cfg) => execute(&cfg, cli.seed, cli.format, &cli.out),
        None => {
            let Command::Rerun { sidecar } = &cli.command else { unreachable!() };
            let (cfg, seed, format) = load_sidecar(sidecar)?;
            execute(&cfg, seed, format, &cli.out)
        }
    }
}

/// Runs the command line given by `args` (program name first) and returns the
/// process exit status: 0 on success, 1 for usage errors and invalid
/// parameters, 2 for I/O and malformed input files, 3 for numerical failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let go = || dispatch(&cli);
    let result = match cli.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(Error::invalid(format!("cannot start {k} threads: {e}"))),
        },
        None => go(),
    };
    match result {
        Ok(r) => {
            print!("{}", r.stdout);
            for p in &r.written {
                eprintln!("wrote {}", p.display());
            }
            match r.failed {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    3
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
