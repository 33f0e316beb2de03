//! Argument parsing and subcommand dispatch for the `cubeprobe` binary.
//!
//! [`run_cli`] never touches the process: it returns the exit code and the
//! text destined for stdout and stderr, so the whole surface is testable
//! in-process.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubeprobe::estimator::{derive_params, EstimateReport, EstimatorOptions};
use cubeprobe::oracle::{exact_distribution, exact_tv, to_f64};
use cubeprobe::poset::{encode_cnf, generate_instance, Family, Poset, SamplerSpec, UniformExtensionDistribution};
use cubeprobe::tester::{Decision, TesterParams};
use cubeprobe::{cube_probe_est_with, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_REJECT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cubeprobe", version, about = "TV-distance estimation and identity testing for linear-extension samplers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the TV distance between a sampler and the uniform extension distribution.
    Estimate(EstimateArgs),
    /// Accept or reject closeness to the uniform extension distribution.
    Test(TestArgs),
    /// Exact TV distance between two sampler presets, by enumeration.
    OracleDtv(OracleArgs),
    /// Emit a synthetic instance.
    Gen(GenArgs),
    /// Write the DIMACS encoding of an instance's linear extensions.
    EncodeCnf(CnfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "uniform", value_parser = parse_spec)]
    pub sampler: SamplerSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Stop once this many sampler calls have been made.
    #[arg(long)]
    pub max_samples: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.3, value_parser = open_unit)]
    pub zeta: f64,
    #[arg(long, default_value_t = 0.2, value_parser = open_unit)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.61)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, value_parser = parse_spec)]
    pub p: SamplerSpec,
    #[arg(long, default_value = "uniform", value_parser = parse_spec)]
    pub q: SamplerSpec,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// `avgdeg_<d>` or `bipartite_<p>`.
    #[arg(value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub index: u32,
    /// Directory to write `<name>.json` into; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CnfArgs {
    pub instance: PathBuf,
    /// stdout when omitted.
    #[arg(long)]
    pub cnf_out: Option<PathBuf>,
}

fn parse_spec(s: &str) -> Result<SamplerSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub sampler: String,
    pub known: &'static str,
    pub zeta: f64,
    pub delta: f64,
    pub alpha: u64,
    pub gamma: f64,
    pub delta_prime: f64,
    pub k: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_k: Option<f64>,
    pub threads: Option<u64>,
    pub max_samples: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub instance_path: String,
    pub dim: usize,
    pub estd_dtv: f64,
    pub samples: u64,
    pub verdict: Option<Decision>,
    pub params: ParamsEcho,
    pub seed: u64,
    /// False when the sample budget cut the run short.
    pub complete: bool,
    pub wall_time: f64,
}

impl RunReport {
    pub fn to_table(&self) -> String {
        let verdict = self.verdict.map_or("-".to_string(), |d| match d {
            Decision::Accept => "A".to_string(),
            Decision::Reject => "R".to_string(),
        });
        let mut out = format!(
            "{:<24} {:>4} {:>10} {:>12} {:>4}\n{:<24} {:>4} {:>10.6} {:>12} {:>4}\n",
            "instance", "dim", "Estd dTV", "#samples", "A/R",
            self.instance_path, self.dim, self.estd_dtv, self.samples, verdict,
        );
        let p = &self.params;
        out += &format!(
            "sampler={} zeta={} delta={} alpha={} k={} seed={}",
            p.sampler, p.zeta, p.delta, p.alpha, p.k, self.seed
        );
        if let Some(threshold) = p.threshold_k {
            out += &format!(" K={threshold}");
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Self { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}

/// `argv[0]` is the program name.
pub fn run_cli<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output::ok(text)
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match cli.command {
        Command::Estimate(a) => run_estimate(&a.run, a.zeta, a.delta, None),
        Command::Test(a) => match TesterParams::new(a.epsilon, a.eta, a.delta) {
            Ok(t) => run_estimate(&a.run, t.zeta, t.delta_t, Some(t)),
            Err(e) => Output::usage(e),
        },
        Command::OracleDtv(a) => run_oracle(&a),
        Command::Gen(a) => run_gen(&a),
        Command::EncodeCnf(a) => run_cnf(&a),
    }
}

fn load(path: &Path) -> Result<Poset, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Poset::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_estimate(run: &RunArgs, zeta: f64, delta: f64, tester: Option<TesterParams>) -> Output {
    let started = Instant::now();
    let poset = match load(&run.instance) {
        Ok(p) => p,
        Err(e) => return Output::usage(e),
    };
    let setup = run
        .sampler
        .build(&poset)
        .and_then(|s| Ok((s, UniformExtensionDistribution::new(&poset)?)))
        .and_then(|(s, q)| Ok((s, q, derive_params(poset.free_map().dim(), zeta, delta)?)));
    let (sampler, known, params) = match setup {
        Ok(t) => t,
        Err(e) => return Output::usage(e),
    };
    let options = EstimatorOptions {
        max_draws_per_marginal: None,
        max_total_samples: run.max_samples,
    };
    let estimate = || cube_probe_est_with(&sampler, &known, params, run.seed, &options);
    let result = match with_threads(run.threads, estimate) {
        Ok(r) => r,
        Err(e) => return Output::usage(e),
    };

    let (report, code, stderr) = match result {
        Ok(r) => {
            let code = match tester.map(|t| t.decide(r.dtv_estimate)) {
                Some(Decision::Reject) => EXIT_REJECT,
                _ => EXIT_OK,
            };
            (r, code, String::new())
        }
        Err(Error::SampleBudget { used, limit, partial }) => (
            *partial,
            EXIT_BUDGET,
            format!("error: sample budget {limit} exceeded after {used} samples; report is partial\n"),
        ),
        Err(e @ Error::BudgetExhausted { .. }) => (
            EstimateReport {
                dtv_estimate: 0.0,
                total_samples: 0,
                per_sample_terms: Vec::new(),
                params,
                seed: run.seed,
            },
            EXIT_BUDGET,
            format!("error: {e}\n"),
        ),
        Err(e) => return Output::usage(e),
    };

    let complete = report.is_complete();
    let report = RunReport {
        instance_path: run.instance.display().to_string(),
        dim: params.n,
        estd_dtv: report.dtv_estimate,
        samples: report.total_samples,
        verdict: tester.filter(|_| complete).map(|t| t.decide(report.dtv_estimate)),
        params: ParamsEcho {
            sampler: run.sampler.to_string(),
            known: "uniform",
            zeta: params.zeta,
            delta: params.delta,
            alpha: params.alpha,
            gamma: params.gamma,
            delta_prime: params.delta_prime,
            k: params.k,
            epsilon: tester.map(|t| t.epsilon),
            eta: tester.map(|t| t.eta),
            threshold_k: tester.map(|t| t.threshold_k),
            threads: run.threads,
            max_samples: run.max_samples,
        },
        seed: run.seed,
        complete,
        wall_time: started.elapsed().as_secs_f64(),
    };
    let stdout = match run.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Table => report.to_table(),
    };
    Output { code, stdout, stderr }
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<u64>, f: impl FnOnce() -> R + Send) -> Result<R, String> {
    match threads {
        None => Ok(f()),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| e.to_string()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_threads: Option<u64>, f: impl FnOnce() -> R + Send) -> Result<R, String> {
    Ok(f())
}

fn run_oracle(a: &OracleArgs) -> Output {
    let poset = match load(&a.instance) {
        Ok(p) => p,
        Err(e) => return Output::usage(e),
    };
    let tv = exact_distribution(&a.p, &poset)
        .and_then(|p| Ok((p, exact_distribution(&a.q, &poset)?)))
        .and_then(|(p, q)| exact_tv(&p, &q));
    match tv {
        Ok(tv) => Output::ok(format!("{tv} ≈ {:.6}\n", to_f64(&tv))),
        Err(e) => Output::usage(e),
    }
}

fn run_gen(a: &GenArgs) -> Output {
    let generated = match generate_instance(a.family, a.size, a.index) {
        Ok(g) => g,
        Err(e) => return Output::usage(e),
    };
    let text = serde_json::to_string(&generated.poset.to_instance()).expect("instance serializes") + "\n";
    match &a.out {
        None => Output::ok(text),
        Some(dir) => {
            let path = dir.join(format!("{}.json", generated.name));
            match fs::create_dir_all(dir).and_then(|_| fs::write(&path, text)) {
                Ok(()) => Output::ok(format!("{}\n", path.display())),
                Err(e) => Output::usage(format!("{}: {e}", path.display())),
            }
        }
    }
}

fn run_cnf(a: &CnfArgs) -> Output {
    let poset = match load(&a.instance) {
        Ok(p) => p,
        Err(e) => return Output::usage(e),
    };
    let dimacs = encode_cnf(&poset).to_dimacs();
    match &a.cnf_out {
        None => Output::ok(dimacs),
        Some(path) => match fs::write(path, dimacs) {
            Ok(()) => Output::ok(String::new()),
            Err(e) => Output::usage(format!("{}: {e}", path.display())),
        },
    }
}
