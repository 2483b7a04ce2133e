mod config;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gaussys_core::analytic::analytic_intensity;
use gaussys_core::classify::CLASSIFY_TOL;
use gaussys_core::sampler::write_csv;
use gaussys_core::verify::{estimate_queries, Comparison, IntensityEstimate};
use gaussys_core::{
    canonicalize, classify_pair, equal_in_law_analytic, equal_in_law_mc, simulate_system, stationarity_test, Design,
    Error, McOptions, PairSpec, SimulationConfig, TestReport, ValidationGrid, Verdict,
};
use serde::Serialize;
use serde_json::json;

use config::FileConfig;

const DEFAULT_REPLICATES: u64 = 20_000;
const DEFAULT_SIM_REPLICATES: u64 = 100;
const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Simulate,
    Intensity,
    Classify,
    Canonicalize,
    VerifyStationarity,
    EqualInLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Simulate Gaussian particle systems, evaluate their intensities and test
/// stationarity and equality in law.
#[derive(Debug, Parser)]
#[command(name = "gaussys", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config file.
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Report text and whether the command's verdict is a pass.
struct Outcome {
    body: String,
    pass: bool,
}

/// Flags override the file.
struct Settings {
    cfg: FileConfig,
    format: Format,
    replicates: Option<u64>,
    seed: u64,
    alpha: f64,
    tolerance: f64,
    threads: Option<usize>,
}

impl Settings {
    fn new(cli: &Cli, cfg: FileConfig) -> Self {
        Self {
            format: cli.format,
            replicates: cli.replicates.or(cfg.replicates),
            seed: cli.seed.or(cfg.seed).unwrap_or(0),
            alpha: cli.alpha.or(cfg.alpha).unwrap_or(DEFAULT_ALPHA),
            tolerance: cli.tolerance.or(cfg.tolerance).unwrap_or(CLASSIFY_TOL),
            threads: cli.threads.or(cfg.threads),
            cfg,
        }
    }

    fn pair(&self) -> Result<&PairSpec, Failure> {
        self.cfg.pair.as_ref().ok_or_else(|| Failure::Usage("config has no `pair`".into()))
    }

    fn mc(&self) -> McOptions {
        McOptions { seed: self.seed, threads: self.threads, strategy: self.cfg.strategy.unwrap_or_default() }
    }

    fn design(&self, dim: usize) -> Design {
        self.cfg.design.clone().unwrap_or_else(|| Design::default_for(dim))
    }

    fn no_csv(&self, what: &str) -> Result<(), Failure> {
        if self.format == Format::Csv {
            Err(Failure::Usage(format!("csv output is not available for {what}")))
        } else {
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn simulate(s: &Settings) -> Result<Outcome, Failure> {
    let sim = s.cfg.simulation.as_ref().ok_or_else(|| Failure::Usage("config has no `simulation` section".into()))?;
    let config = SimulationConfig {
        pair: s.pair()?.clone(),
        times: sim.times.clone(),
        boxes: sim.boxes.clone(),
        replicates: s.replicates.unwrap_or(DEFAULT_SIM_REPLICATES),
        seed: s.seed,
        strategy: sim.strategy,
        threads: s.threads,
        arm: 0,
    };
    let n_times = config.times.len();
    let stream = simulate_system(config.clone())?;
    let body = match s.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(stream, n_times, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let samples = stream.collect::<gaussys_core::Result<Vec<_>>>()?;
            to_json(&json!({ "config": config, "samples": samples }))
        }
        Format::Text => {
            let (a, b) = stream.simulator().window();
            let bound = stream.simulator().truncation_error_bound();
            let mut out = format!("window [{a}, {b}]  truncation bound {bound:.3e}\n");
            for (r, sample) in stream.enumerate() {
                writeln!(out, "replicate {r}: {} particles", sample?.len()).unwrap();
            }
            out
        }
    };
    Ok(Outcome { body, pass: true })
}

#[derive(Serialize)]
struct IntensityRow {
    times: Vec<gaussys_core::TimePoint>,
    #[serde(rename = "box")]
    bounds: Vec<gaussys_core::Interval>,
    analytic: Option<f64>,
    estimate: Option<Estimate>,
}

#[derive(Serialize)]
struct Estimate {
    mean_count: f64,
    std_error: f64,
    replicates: u64,
}

impl From<IntensityEstimate> for Estimate {
    fn from(e: IntensityEstimate) -> Self {
        Self { mean_count: e.mean_count, std_error: e.std_error, replicates: e.replicates }
    }
}

fn intensity(s: &Settings) -> Result<Outcome, Failure> {
    let pair = s.pair()?;
    if s.cfg.query.is_empty() {
        return Err(Failure::Usage("config has no `query`".into()));
    }
    let exact = s
        .cfg
        .query
        .iter()
        .map(|q| analytic_intensity(pair, &q.times, &q.bounds))
        .collect::<gaussys_core::Result<Vec<_>>>()?;
    // simulate when asked to, or when some query has no closed form
    let estimates: Vec<Option<Estimate>> = if s.replicates.is_some() || exact.iter().any(Option::is_none) {
        let n = s.replicates.unwrap_or(DEFAULT_REPLICATES);
        estimate_queries(pair, &s.cfg.query, n, 0, &s.mc())?.into_iter().map(|e| Some(e.into())).collect()
    } else {
        exact.iter().map(|_| None).collect()
    };
    let rows: Vec<IntensityRow> = s
        .cfg
        .query
        .iter()
        .zip(exact)
        .zip(estimates)
        .map(|((q, analytic), estimate)| IntensityRow { times: q.times.clone(), bounds: q.bounds.clone(), analytic, estimate })
        .collect();
    let body = match s.format {
        Format::Json => to_json(&json!({ "seed": s.seed, "results": rows })),
        Format::Csv | Format::Text => {
            let sep = if s.format == Format::Csv { "," } else { "  " };
            let mut out = ["times", "box", "analytic", "mean_count", "std_error"].join(sep);
            out.push('\n');
            for r in &rows {
                let cells = [
                    r.times.iter().map(time_label).collect::<Vec<_>>().join(" "),
                    r.bounds.iter().map(|b| format!("[{};{}]", b.lo, b.hi)).collect::<Vec<_>>().join(" "),
                    r.analytic.map_or(String::new(), |v| v.to_string()),
                    r.estimate.as_ref().map_or(String::new(), |e| e.mean_count.to_string()),
                    r.estimate.as_ref().map_or(String::new(), |e| e.std_error.to_string()),
                ];
                out.push_str(&cells.join(sep));
                out.push('\n');
            }
            out
        }
    };
    Ok(Outcome { body, pass: true })
}

fn time_label(t: &gaussys_core::TimePoint) -> String {
    t.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

fn classify(s: &Settings) -> Result<Outcome, Failure> {
    s.no_csv("classify")?;
    let pair = s.pair()?;
    let report = classify_pair(pair, &ValidationGrid::default_for(pair.dim()), s.tolerance)?;
    let body = match s.format {
        Format::Text => {
            let mut out = format!("label: {}\nparams: {}\n", report.label.name(), report.label.params());
            for e in &report.evidence {
                write!(out, "check {}: residual {:.3e}", e.check, e.residual).unwrap();
                if let Some(n) = &e.note {
                    write!(out, " ({n})").unwrap();
                }
                out.push('\n');
            }
            out
        }
        _ => to_json(&report),
    };
    Ok(Outcome { body, pass: report.label.is_stationary() })
}

fn canonical(s: &Settings) -> Result<Outcome, Failure> {
    s.no_csv("canonicalize")?;
    let pair = s.pair()?;
    match canonicalize(pair, &ValidationGrid::default_for(pair.dim()), s.tolerance) {
        Ok(c) => Ok(Outcome { body: to_json(&c), pass: true }),
        Err(Error::WrongLabel(label)) => Ok(Outcome {
            body: to_json(&json!({
                "label": label,
                "canonical": null,
                "reason": "canonical forms exist only for S2 and S3",
            })),
            pass: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn comparisons_csv(report: &TestReport) -> String {
    let mut out = String::from("times,shift,box,est_a,se_a,est_b,se_b,analytic,analytic_b,z\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for c in &report.comparisons {
        let Comparison { times, shift, bounds, est_a, se_a, est_b, se_b, analytic, analytic_b, z } = c;
        writeln!(
            out,
            "{},{},{},{est_a},{se_a},{est_b},{se_b},{},{},{z}",
            times.iter().map(time_label).collect::<Vec<_>>().join(" "),
            shift.as_ref().map_or(String::new(), time_label),
            bounds.iter().map(|b| format!("[{};{}]", b.lo, b.hi)).collect::<Vec<_>>().join(" "),
            opt(*analytic),
            opt(*analytic_b),
        )
        .unwrap();
    }
    out
}

fn render_report(s: &Settings, report: &TestReport) -> String {
    match s.format {
        Format::Json => to_json(report),
        Format::Csv => comparisons_csv(report),
        Format::Text => report.to_text(),
    }
}

fn verify_stationarity(s: &Settings) -> Result<Outcome, Failure> {
    let pair = s.pair()?;
    let n = s.replicates.unwrap_or(DEFAULT_REPLICATES);
    let report = stationarity_test(pair, &s.design(pair.dim()), n, s.alpha, &s.mc())?;
    Ok(Outcome { body: render_report(s, &report), pass: report.verdict == Verdict::Pass })
}

fn equal_in_law(s: &Settings) -> Result<Outcome, Failure> {
    let a = s.pair()?;
    let b = s.cfg.pair_b.as_ref().ok_or_else(|| Failure::Usage("config has no `pair_b`".into()))?;
    if a.dim() != b.dim() {
        return Err(Failure::Core(Error::DimensionMismatch { expected: a.dim(), got: b.dim() }));
    }
    let analytic = equal_in_law_analytic(a, b, &ValidationGrid::default_for(a.dim()), s.tolerance)?;
    let n = s.replicates.unwrap_or(DEFAULT_REPLICATES);
    let mc = equal_in_law_mc(a, b, &s.design(a.dim()), n, s.alpha, &s.mc())?;
    let pass = analytic.equal && mc.verdict == Verdict::Pass;
    let body = match s.format {
        Format::Json => to_json(&json!({ "analytic": analytic, "monte_carlo": mc })),
        Format::Csv => comparisons_csv(&mc),
        Format::Text => format!(
            "analytic: equal={} via {} ({})\n{}",
            analytic.equal,
            analytic.via,
            analytic.reason,
            mc.to_text()
        ),
    };
    Ok(Outcome { body, pass })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = config::load(&cli.input).map_err(|e| Failure::Usage(e.0))?;
    let s = Settings::new(cli, cfg);
    if s.replicates == Some(0) {
        return Err(Failure::Usage("replicates must be at least 1".into()));
    }
    match cli.command {
        Command::Simulate => simulate(&s),
        Command::Intensity => intensity(&s),
        Command::Classify => classify(&s),
        Command::Canonicalize => canonical(&s),
        Command::VerifyStationarity => verify_stationarity(&s),
        Command::EqualInLaw => equal_in_law(&s),
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome.body) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Overflow { .. } => 3,
                _ => 2,
            })
        }
    }
}
