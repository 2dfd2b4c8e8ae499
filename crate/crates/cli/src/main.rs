//! `sklyanin`: run verification checks and the point-process sampler from the
//! command line.
//!
//! Exit status is 0 when every report passes, 1 when a check fails numerically
//! (the failing reports are still written), and 2 for invalid input, in which
//! case nothing is written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use sklyanin::dpp::{build_default_kernel, sample, SamplerConfig};
use sklyanin::mb::qdeformed::QMBParams;
use sklyanin::mb::{MBParams, DEFAULT_RESIDUE_BOX};
use sklyanin::report::{to_csv, to_json, VerificationReport};
use sklyanin::roots::{build_root_system, Family};
use sklyanin::suite::{collect_reports, run_criterion, SuiteConfig, CRITERIA};
use sklyanin::sw::{DirectOracle, SWProblem};
use sklyanin::verify::{verify_dpp, verify_mb, verify_qmb, verify_qsw, verify_sw};
use sklyanin::weights::{FourierWeight, RealWeight, WeightSpec};

#[derive(Parser, Debug)]
#[command(name = "sklyanin", version, about = "Verify Sklyanin-Whittaker integral formulas against independent oracles")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, env = "SKLYANIN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one closed form against its oracle.
    #[command(subcommand)]
    Verify(Verify),
    /// Sample the point process and write the configurations as CSV.
    SampleDpp(SampleArgs),
    /// Kernel identities and the sampler's chi-square test.
    DppCheck(DppArgs),
    /// Run the verification matrix.
    Suite(SuiteArgs),
    /// Run the jobs of a JSON configuration file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Moment determinant against direct integration.
    Sw(SwArgs),
    /// Toeplitz-Hankel determinant against torus quadrature.
    Qsw(QswArgs),
    /// Wronskian formula against the residue oracle.
    Mb(MbArgs),
    /// q-Casoratian formula against the q-residue oracle.
    Qmb(QmbArgs),
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the reports as a JSON array.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write a one-line-per-report CSV summary.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Group {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Quadrature up to rank 3, Monte Carlo above.
    Auto,
    Quadrature,
    MonteCarlo,
}

#[derive(Args, Debug)]
struct SwArgs {
    #[command(flatten)]
    group: Group,
    /// `gaussian`, `quartic`, a JSON weight object, or `@file.json`.
    #[arg(long, default_value = "gaussian")]
    weight: String,
    #[arg(long, value_enum, default_value_t = OracleKind::Auto)]
    oracle: OracleKind,
    /// Gauss rule order per dimension.
    #[arg(long, default_value_t = 48)]
    order: usize,
    #[arg(long, default_value_t = 10_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct QswArgs {
    #[command(flatten)]
    group: Group,
    #[arg(long, value_parser = parse_complex)]
    q: Complex64,
    /// `constant`, a JSON weight object (`fourier` or `geometric`), or `@file.json`.
    #[arg(long, default_value = "constant")]
    weight: String,
    #[arg(long, value_parser = parse_complex, default_value = "0.6")]
    t: Complex64,
    /// Initial trapezoid points per torus dimension.
    #[arg(long, default_value_t = 16)]
    points: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MbCommon {
    #[command(flatten)]
    group: Group,
    /// Number of `a` parameters; checked against `--a` when given.
    #[arg(long)]
    r: Option<usize>,
    /// Number of `b` parameters; checked against `--b` when given.
    #[arg(long)]
    s: Option<usize>,
    /// Comma-separated complex numbers such as `0.3,-0.21+0.1i`.
    #[arg(long, value_parser = parse_complex_list)]
    a: ComplexList,
    #[arg(long, value_parser = parse_complex_list, default_value = "")]
    b: ComplexList,
    /// 0-based contour assignment; defaults to `0,1,..,rank-1`.
    #[arg(long, value_delimiter = ',')]
    index: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_complex)]
    z: Complex64,
    /// Poles summed per variable by the residue oracle.
    #[arg(long = "box", default_value_t = DEFAULT_RESIDUE_BOX)]
    box_size: usize,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MbArgs {
    #[command(flatten)]
    common: MbCommon,
}

#[derive(Args, Debug)]
struct QmbArgs {
    #[command(flatten)]
    common: MbCommon,
    #[arg(long, value_parser = parse_complex)]
    q: Complex64,
    #[arg(long, allow_hyphen_values = true)]
    kappa: i64,
    #[arg(long, value_parser = parse_complex, default_value = "0.4")]
    t: Complex64,
}

#[derive(Args, Debug, Clone)]
struct SamplerArgs {
    #[arg(long, default_value_t = 1000)]
    chains: usize,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 25)]
    thin: usize,
    #[arg(long, default_value_t = 100)]
    samples_per_chain: usize,
    #[arg(long, default_value_t = 0.8)]
    initial_step: f64,
}

impl SamplerArgs {
    fn config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            chains: self.chains,
            burn_in: self.burn_in,
            thin: self.thin,
            samples_per_chain: self.samples_per_chain,
            initial_step: self.initial_step,
            seed,
        }
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    group: Group,
    #[arg(long, default_value = "gaussian")]
    weight: String,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DppArgs {
    #[command(flatten)]
    group: Group,
    #[arg(long, default_value = "gaussian")]
    weight: String,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Skip the sampler and its chi-square test.
    #[arg(long)]
    no_sampler: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// The acceptance matrix only.
    #[arg(long)]
    quick: bool,
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion")]
    criteria: Vec<u32>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Debug)]
struct ComplexList(Vec<Complex64>);

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: sklyanin::Error| e.to_string())
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    s.trim().parse::<Complex64>().map_err(|_| format!("{s:?} is not a complex number like 0.3 or -0.21+0.1i"))
}

fn parse_complex_list(s: &str) -> std::result::Result<ComplexList, String> {
    if s.trim().is_empty() {
        return Ok(ComplexList(Vec::new()));
    }
    s.split(',').map(parse_complex).collect::<std::result::Result<_, _>>().map(ComplexList)
}

/// A weight given by name, inline JSON, or `@path` to a JSON file.
fn parse_weight_spec(s: &str) -> Result<WeightSpec> {
    let s = s.trim();
    match s {
        "gaussian" => return Ok(WeightSpec::Gaussian {}),
        "quartic" => return Ok(WeightSpec::Quartic {}),
        _ => {}
    }
    let text = match s.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading weight file {path}"))?,
        None => s.to_string(),
    };
    serde_json::from_str(&text).with_context(|| format!("invalid weight spec {s:?}"))
}

fn real_weight(s: &str) -> Result<RealWeight> {
    Ok(parse_weight_spec(s)?.real_weight()?)
}

fn fourier_weight(s: &str) -> Result<(FourierWeight, String)> {
    if s.trim() == "constant" {
        return Ok((FourierWeight::constant(1.0), "constant".into()));
    }
    let spec = parse_weight_spec(s)?;
    let label = match &spec {
        WeightSpec::Geometric { ratio, amplitude } => format!("geometric-{amplitude}-{ratio}"),
        _ => "fourier".into(),
    };
    Ok((spec.fourier_weight()?, label))
}

/// A job of a configuration file; mirrors the subcommands.
#[derive(Debug, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
enum Job {
    VerifySw {
        family: Family,
        rank: usize,
        weight: WeightSpec,
        #[serde(default)]
        oracle: Option<DirectOracle>,
        #[serde(default = "default_sw_tol")]
        tol: f64,
    },
    VerifyQsw {
        family: Family,
        rank: usize,
        q: f64,
        weight: WeightSpec,
        #[serde(default = "default_qsw_t")]
        t: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    DppCheck {
        family: Family,
        rank: usize,
        weight: WeightSpec,
        #[serde(default)]
        sampler: Option<SamplerConfig>,
    },
}

fn default_sw_tol() -> f64 {
    1e-6
}

fn default_tol() -> f64 {
    1e-7
}

fn default_qsw_t() -> f64 {
    0.6
}

/// Validation failures that must exit with status 2.
struct UsageError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.into())
    }
}

fn sw_oracle(args: &SwArgs, seed: u64) -> DirectOracle {
    let mc = DirectOracle::MonteCarlo { samples: args.samples, seed };
    match args.oracle {
        OracleKind::Quadrature => DirectOracle::Quadrature { order: args.order },
        OracleKind::MonteCarlo => mc,
        OracleKind::Auto if args.group.rank <= 3 => DirectOracle::Quadrature { order: args.order },
        OracleKind::Auto => mc,
    }
}

fn check_rank(group: &Group) -> Result<()> {
    build_root_system(group.family, group.rank)?;
    Ok(())
}

fn mb_inputs(c: &MbCommon) -> Result<(Vec<Complex64>, Vec<Complex64>, Vec<usize>)> {
    let (a, b) = (c.a.0.clone(), c.b.0.clone());
    if let Some(r) = c.r {
        if r != a.len() {
            bail!("--r {r} does not match the {} values of --a", a.len());
        }
    }
    if let Some(s) = c.s {
        if s != b.len() {
            bail!("--s {s} does not match the {} values of --b", b.len());
        }
    }
    let index = c.index.clone().unwrap_or_else(|| (0..c.group.rank).collect());
    if index.len() != c.group.rank {
        bail!("--index has {} entries for rank {}", index.len(), c.group.rank);
    }
    Ok((a, b, index))
}

/// Reports of one command, or `None` for commands that write their own output.
fn reports_for(command: &Command, seed: u64) -> std::result::Result<Option<(Vec<VerificationReport>, Output)>, UsageError> {
    Ok(Some(match command {
        Command::Verify(Verify::Sw(args)) => {
            check_rank(&args.group)?;
            let weight = real_weight(&args.weight)?;
            let r = verify_sw(args.group.family, args.group.rank, &weight, sw_oracle(args, seed), args.tol);
            (vec![r], args.output.clone())
        }
        Command::Verify(Verify::Qsw(args)) => {
            check_rank(&args.group)?;
            let (weight, label) = fourier_weight(&args.weight)?;
            let reports = verify_qsw(args.group.family, args.group.rank, args.q, &weight, &label, args.t, args.points, args.tol);
            (reports, args.output.clone())
        }
        Command::Verify(Verify::Mb(args)) => {
            let c = &args.common;
            let (a, b, index) = mb_inputs(c)?;
            let p = MBParams::new(a, b, index, c.z)?;
            (verify_mb(c.group.family, &p, c.box_size, c.tol), c.output.clone())
        }
        Command::Verify(Verify::Qmb(args)) => {
            let c = &args.common;
            let (a, b, index) = mb_inputs(c)?;
            let p = QMBParams::new(a, b, index, c.z, args.q, args.kappa, args.t)?;
            (verify_qmb(c.group.family, &p, c.box_size, c.tol), c.output.clone())
        }
        Command::DppCheck(args) => {
            check_rank(&args.group)?;
            let weight = real_weight(&args.weight)?;
            let sampler = (!args.no_sampler).then(|| args.sampler.config(seed));
            (verify_dpp(args.group.family, args.group.rank, &weight, seed, sampler), args.output.clone())
        }
        Command::Suite(args) => {
            let config = SuiteConfig { quick: args.quick, seed };
            let numbers: Vec<u32> =
                if args.criteria.is_empty() { CRITERIA.iter().map(|(k, _)| *k).collect() } else { args.criteria.clone() };
            let mut outcomes = Vec::new();
            for k in numbers {
                let outcome = run_criterion(k, &config)?;
                eprintln!(
                    "{:>2} {:<45} {} ({} reports, {:.1} s)",
                    outcome.number,
                    outcome.title,
                    if outcome.pass() { "PASS" } else { "FAIL" },
                    outcome.reports.len(),
                    outcome.runtime_ms / 1e3
                );
                outcomes.push(outcome);
            }
            (collect_reports(&outcomes), args.output.clone())
        }
        Command::Run { config, output } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            (run_jobs(&text, seed)?, output.clone())
        }
        Command::SampleDpp(args) => {
            sample_dpp(args, seed)?;
            return Ok(None);
        }
    }))
}

fn run_jobs(text: &str, seed: u64) -> Result<Vec<VerificationReport>> {
    let value: serde_json::Value = serde_json::from_str(text).context("configuration is not valid JSON")?;
    let jobs: Vec<Job> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        _ => serde_json::from_value(value).map(|j| vec![j]),
    }
    .context("configuration does not match the job schema")?;
    let mut reports = Vec::new();
    for job in jobs {
        match job {
            Job::VerifySw { family, rank, weight, oracle, tol } => {
                build_root_system(family, rank)?;
                let oracle = oracle.unwrap_or(if rank <= 3 {
                    DirectOracle::Quadrature { order: 48 }
                } else {
                    DirectOracle::MonteCarlo { samples: 10_000_000, seed }
                });
                reports.push(verify_sw(family, rank, &weight.real_weight()?, oracle, tol));
            }
            Job::VerifyQsw { family, rank, q, weight, t, tol } => {
                build_root_system(family, rank)?;
                let w = weight.fourier_weight()?;
                let c = |x: f64| Complex64::new(x, 0.0);
                reports.extend(verify_qsw(family, rank, c(q), &w, "config", c(t), 16, tol));
            }
            Job::DppCheck { family, rank, weight, sampler } => {
                build_root_system(family, rank)?;
                reports.extend(verify_dpp(family, rank, &weight.real_weight()?, seed, sampler));
            }
        }
    }
    Ok(reports)
}

fn sample_dpp(args: &SampleArgs, seed: u64) -> Result<()> {
    let weight = real_weight(&args.weight)?;
    let problem = SWProblem::new(build_root_system(args.group.family, args.group.rank)?, weight)?;
    let model = build_default_kernel(&problem)?;
    let set = sample(&model, &args.sampler.config(seed))?;
    let n = args.group.rank;
    let mut csv = (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    csv.push('\n');
    for x in &set.configurations {
        csv.push_str(&x.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","));
        csv.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    let mean = set.acceptance.iter().sum::<f64>() / set.acceptance.len().max(1) as f64;
    eprintln!("{} configurations, mean acceptance {mean:.3}", set.configurations.len());
    for w in &set.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn write_outputs(reports: &[VerificationReport], output: &Output) -> Result<()> {
    if let Some(path) = &output.report {
        write_file(path, &to_json(reports)?)?;
    }
    if let Some(path) = &output.csv {
        write_file(path, &to_csv(reports))?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_table(reports: &[VerificationReport], failures_only: bool) {
    for r in reports.iter().filter(|r| !failures_only || !r.pass) {
        let ratio = r.audit_ratio.map(|[re, im]| format!("  ratio {re:.6}{im:+.6}i")).unwrap_or_default();
        let note = if r.note.is_empty() { String::new() } else { format!("  [{}]", r.note) };
        println!(
            "{}  {:<70} rel {:.2e} tol {:.0e}{ratio}{note}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.rel_error,
            r.tolerance
        );
    }
    let failures = reports.iter().filter(|r| !r.pass).count();
    println!("{} reports, {failures} failed", reports.len());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let (reports, output) = match reports_for(&cli.command, cli.seed) {
        Ok(Some(x)) => x,
        Ok(None) => return ExitCode::SUCCESS,
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    print_table(&reports, matches!(cli.command, Command::Suite(_)));
    if let Err(e) = write_outputs(&reports, &output) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_lists() {
        let l = parse_complex_list("0.3,-0.21+0.1i, 0.17-0.05i").unwrap().0;
        assert_eq!(l, vec![Complex64::new(0.3, 0.0), Complex64::new(-0.21, 0.1), Complex64::new(0.17, -0.05)]);
        assert!(parse_complex_list("").unwrap().0.is_empty());
        assert!(parse_complex("0.3+").is_err());
    }

    #[test]
    fn weight_specs() {
        assert_eq!(parse_weight_spec("gaussian").unwrap(), WeightSpec::Gaussian {});
        assert!(parse_weight_spec(r#"{"kind": "geometric", "ratio": 0.5}"#).is_ok());
        assert!(parse_weight_spec(r#"{"kind": "gaussian", "width": 2}"#).is_err());
        assert!(parse_weight_spec("gauss").is_err());
    }
}
