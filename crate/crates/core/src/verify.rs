//! Monte Carlo box-count estimates and two-sample z-tests with Bonferroni
//! correction.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analytic::{analytic_intensity, PairSpec};
use crate::error::{Error, Result};
use crate::interval::{iv, Interval};
use crate::normal;
use crate::processes::TimePoint;
use crate::sampler::{SimulationConfig, Simulator, Strategy, SystemSample};

/// A finite-dimensional box query: `V(t_k) ∈ box[k]` for every `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub times: Vec<TimePoint>,
    #[serde(rename = "box")]
    pub bounds: Vec<Interval>,
}

impl Query {
    pub fn new(times: Vec<TimePoint>, bounds: Vec<Interval>) -> Result<Self> {
        let q = Self { times, bounds };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::InvalidArgument("query needs at least one time".into()));
        }
        if self.times.len() != self.bounds.len() {
            return Err(Error::DimensionMismatch { expected: self.times.len(), got: self.bounds.len() });
        }
        if self.bounds.iter().any(|b| !b.is_bounded()) {
            return Err(Error::InvalidArgument("query boxes must be bounded".into()));
        }
        Ok(())
    }

    pub fn shifted(&self, h: &TimePoint) -> Query {
        Query { times: self.times.iter().map(|t| t.plus(h)).collect(), bounds: self.bounds.clone() }
    }
}

/// Test design: one-time queries for every (time, box) plus extra
/// multi-time rectangles; `shifts` are only used by the stationarity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Design {
    pub times: Vec<TimePoint>,
    #[serde(default)]
    pub shifts: Vec<TimePoint>,
    pub boxes: Vec<Interval>,
    #[serde(default)]
    pub rects: Vec<Query>,
}

impl Default for Design {
    fn default() -> Self {
        Self::default_for(1)
    }
}

impl Design {
    /// Times `{0, 0.5, 1}·e₁`, shifts `{0.5, 1}·e₁`, boxes `[0,1]`,
    /// `[−1,0]`, `[−2,2]` and the rectangle `[0,1]×[−1,1]` at times `(0, e₁)`.
    pub fn default_for(dim: usize) -> Self {
        let along = |s: f64| {
            let mut v = vec![0.0; dim.max(1)];
            v[0] = s;
            TimePoint::new(v).expect("finite coordinates")
        };
        Self {
            times: vec![along(0.0), along(0.5), along(1.0)],
            shifts: vec![along(0.5), along(1.0)],
            boxes: vec![iv(0.0, 1.0), iv(-1.0, 0.0), iv(-2.0, 2.0)],
            rects: vec![Query { times: vec![along(0.0), along(1.0)], bounds: vec![iv(0.0, 1.0), iv(-1.0, 1.0)] }],
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for t in self.times.iter().chain(&self.shifts).chain(self.rects.iter().flat_map(|q| &q.times)) {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: t.dim() });
            }
        }
        if self.boxes.iter().any(|b| !b.is_bounded()) {
            return Err(Error::InvalidArgument("design boxes must be bounded".into()));
        }
        self.rects.iter().try_for_each(Query::validate)?;
        if self.queries().is_empty() {
            return Err(Error::InvalidArgument("design has no queries".into()));
        }
        Ok(())
    }

    pub fn queries(&self) -> Vec<Query> {
        let mut out = Vec::new();
        for t in &self.times {
            for b in &self.boxes {
                out.push(Query { times: vec![t.clone()], bounds: vec![*b] });
            }
        }
        out.extend(self.rects.iter().cloned());
        out
    }
}

/// Mean per-replicate count of particles in a box, with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityEstimate {
    pub times: Vec<TimePoint>,
    #[serde(rename = "box")]
    pub bounds: Vec<Interval>,
    pub mean_count: f64,
    pub std_error: f64,
    pub replicates: u64,
}

/// Exact integer accumulation, so totals do not depend on reduction order.
#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    n: u64,
    sum: u64,
    sum_sq: u128,
}

impl Counts {
    fn push(&mut self, c: u64) {
        self.n += 1;
        self.sum += c;
        self.sum_sq += u128::from(c) * u128::from(c);
    }

    fn mean_se(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum as f64 / n;
        if self.n < 2 {
            return (mean, 0.0);
        }
        let s = u128::from(self.sum);
        let num = u128::from(self.n) * self.sum_sq - s * s;
        let var = num as f64 / (n * (n - 1.0));
        (mean, (var / n).sqrt())
    }
}

fn columns(sample_times: &[TimePoint], query: &Query) -> Result<Vec<usize>> {
    query
        .times
        .iter()
        .map(|t| {
            sample_times
                .iter()
                .position(|s| s == t)
                .ok_or_else(|| Error::InvalidArgument(format!("query time {:?} was not simulated", t.coords())))
        })
        .collect()
}

/// Estimates `𝔪_{t₁…tₙ}(B)` from a stream of samples taken at
/// `sample_times`.
pub fn estimate_intensity<I>(samples: I, sample_times: &[TimePoint], query: &Query) -> Result<IntensityEstimate>
where
    I: IntoIterator<Item = Result<SystemSample>>,
{
    query.validate()?;
    let cols = columns(sample_times, query)?;
    let mut acc = Counts::default();
    for s in samples {
        acc.push(s?.count_in(&cols, &query.bounds));
    }
    if acc.n == 0 {
        return Err(Error::EmptySamples);
    }
    let (mean_count, std_error) = acc.mean_se();
    Ok(IntensityEstimate { times: query.times.clone(), bounds: query.bounds.clone(), mean_count, std_error, replicates: acc.n })
}

/// Shared Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOptions {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub strategy: Strategy,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { seed: 0, threads: None, strategy: Strategy::HitConditioned }
    }
}

impl McOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Simulates `pair` once and estimates every query on the same replicates.
pub fn estimate_queries(
    pair: &PairSpec,
    queries: &[Query],
    replicates: u64,
    arm: u64,
    opts: &McOptions,
) -> Result<Vec<IntensityEstimate>> {
    let mut times: Vec<TimePoint> = Vec::new();
    let mut boxes: Vec<Vec<Interval>> = Vec::new();
    for q in queries {
        q.validate()?;
        for (t, b) in q.times.iter().zip(&q.bounds) {
            let j = match times.iter().position(|s| s == t) {
                Some(j) => j,
                None => {
                    times.push(t.clone());
                    boxes.push(Vec::new());
                    times.len() - 1
                }
            };
            if !boxes[j].contains(b) {
                boxes[j].push(*b);
            }
        }
    }
    let cols: Vec<Vec<usize>> = queries.iter().map(|q| columns(&times, q)).collect::<Result<_>>()?;
    let sim = Simulator::new(SimulationConfig {
        pair: pair.clone(),
        times,
        boxes,
        replicates,
        seed: opts.seed,
        strategy: opts.strategy,
        threads: opts.threads,
        arm,
    })?;
    let counts = sim.map_replicates(|_, s| {
        cols.iter().zip(queries).map(|(c, q)| s.count_in(c, &q.bounds)).collect::<Vec<u64>>()
    })?;
    let mut acc = vec![Counts::default(); queries.len()];
    for row in &counts {
        for (a, &c) in acc.iter_mut().zip(row) {
            a.push(c);
        }
    }
    Ok(queries
        .iter()
        .zip(&acc)
        .map(|(q, a)| {
            let (mean_count, std_error) = a.mean_se();
            IntensityEstimate { times: q.times.clone(), bounds: q.bounds.clone(), mean_count, std_error, replicates }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Two-sample z-score; infinite when both errors vanish but means differ.
pub fn z_score(est_a: f64, se_a: f64, est_b: f64, se_b: f64) -> f64 {
    let d = est_a - est_b;
    let s = (se_a * se_a + se_b * se_b).sqrt();
    if s == 0.0 {
        if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    } else {
        d / s
    }
}

/// Two-sided Bonferroni critical value for `k` simultaneous tests.
pub fn bonferroni_critical(alpha: f64, k: usize) -> f64 {
    normal::quantile(1.0 - alpha / (2.0 * k.max(1) as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub times: Vec<TimePoint>,
    pub shift: Option<TimePoint>,
    #[serde(rename = "box")]
    pub bounds: Vec<Interval>,
    pub est_a: f64,
    pub se_a: f64,
    pub est_b: f64,
    pub se_b: f64,
    pub analytic: Option<f64>,
    pub analytic_b: Option<f64>,
    pub z: f64,
}

/// Outcome of a stationarity or equality test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub comparisons: Vec<Comparison>,
    pub verdict: Verdict,
    pub alpha: f64,
    pub critical_z: f64,
    pub replicates: u64,
    pub seed: u64,
}

pub type StationarityReport = TestReport;
pub type EqualityReport = TestReport;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")))
    }
}

fn finish(comparisons: Vec<Comparison>, alpha: f64, replicates: u64, seed: u64) -> TestReport {
    let critical_z = bonferroni_critical(alpha, comparisons.len());
    let verdict = if comparisons.iter().any(|c| c.z.abs() > critical_z) { Verdict::Fail } else { Verdict::Pass };
    TestReport { comparisons, verdict, alpha, critical_z, replicates, seed }
}

/// Compares every design query at `t` with the same query at `t + h`.
/// Each shift uses its own substreams; a zero shift compares the base
/// estimate with itself.
pub fn stationarity_test(
    pair: &PairSpec,
    design: &Design,
    replicates: u64,
    alpha: f64,
    opts: &McOptions,
) -> Result<StationarityReport> {
    check_alpha(alpha)?;
    design.validate(pair.dim())?;
    let queries = design.queries();
    let base = estimate_queries(pair, &queries, replicates, 0, opts)?;
    let base_exact = queries.iter().map(|q| analytic_intensity(pair, &q.times, &q.bounds)).collect::<Result<Vec<_>>>()?;
    let mut comparisons = Vec::new();
    for (k, h) in design.shifts.iter().enumerate() {
        let moved: Vec<Query> = queries.iter().map(|q| q.shifted(h)).collect();
        let other = if h.is_zero() { base.clone() } else { estimate_queries(pair, &moved, replicates, k as u64 + 1, opts)? };
        for (((q, a), b), exact) in queries.iter().zip(&base).zip(&other).zip(&base_exact) {
            let shifted = q.shifted(h);
            comparisons.push(Comparison {
                times: q.times.clone(),
                shift: Some(h.clone()),
                bounds: q.bounds.clone(),
                est_a: a.mean_count,
                se_a: a.std_error,
                est_b: b.mean_count,
                se_b: b.std_error,
                analytic: *exact,
                analytic_b: analytic_intensity(pair, &shifted.times, &shifted.bounds)?,
                z: if h.is_zero() { 0.0 } else { z_score(a.mean_count, a.std_error, b.mean_count, b.std_error) },
            });
        }
    }
    if comparisons.is_empty() {
        return Err(Error::InvalidArgument("stationarity test needs at least one shift".into()));
    }
    Ok(finish(comparisons, alpha, replicates, opts.seed))
}

/// Compares the two systems on every design query (shifts are ignored).
pub fn equal_in_law_mc(
    pair_a: &PairSpec,
    pair_b: &PairSpec,
    design: &Design,
    replicates: u64,
    alpha: f64,
    opts: &McOptions,
) -> Result<EqualityReport> {
    check_alpha(alpha)?;
    if pair_a.dim() != pair_b.dim() {
        return Err(Error::DimensionMismatch { expected: pair_a.dim(), got: pair_b.dim() });
    }
    design.validate(pair_a.dim())?;
    let queries = design.queries();
    let est_a = estimate_queries(pair_a, &queries, replicates, 0, opts)?;
    let est_b = estimate_queries(pair_b, &queries, replicates, 1, opts)?;
    let mut comparisons = Vec::new();
    for ((q, a), b) in queries.iter().zip(&est_a).zip(&est_b) {
        comparisons.push(Comparison {
            times: q.times.clone(),
            shift: None,
            bounds: q.bounds.clone(),
            est_a: a.mean_count,
            se_a: a.std_error,
            est_b: b.mean_count,
            se_b: b.std_error,
            analytic: analytic_intensity(pair_a, &q.times, &q.bounds)?,
            analytic_b: analytic_intensity(pair_b, &q.times, &q.bounds)?,
            z: z_score(a.mean_count, a.std_error, b.mean_count, b.std_error),
        });
    }
    Ok(finish(comparisons, alpha, replicates, opts.seed))
}

fn fmt_times(ts: &[TimePoint]) -> String {
    ts.iter()
        .map(|t| {
            if t.dim() == 1 {
                format!("{}", t.coords()[0])
            } else {
                format!("({})", t.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn fmt_box(bs: &[Interval]) -> String {
    bs.iter().map(|b| format!("[{},{}]", b.lo, b.hi)).collect::<Vec<_>>().join("x")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

impl TestReport {
    /// Aligned-column table followed by the verdict line.
    pub fn to_text(&self) -> String {
        let header = ["times", "shift", "box", "est_a", "se_a", "est_b", "se_b", "analytic", "analytic_b", "z"];
        let rows: Vec<[String; 10]> = self
            .comparisons
            .iter()
            .map(|c| {
                [
                    fmt_times(&c.times),
                    c.shift.as_ref().map_or_else(|| "-".to_string(), |h| fmt_times(std::slice::from_ref(h))),
                    fmt_box(&c.bounds),
                    format!("{:.6}", c.est_a),
                    format!("{:.6}", c.se_a),
                    format!("{:.6}", c.est_b),
                    format!("{:.6}", c.se_b),
                    fmt_opt(c.analytic),
                    fmt_opt(c.analytic_b),
                    format!("{:.3}", c.z),
                ]
            })
            .collect();
        let mut width = header.map(str::len);
        for r in &rows {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |cells: &[String]| {
            cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        let _ = writeln!(out, "{}", line(&header.map(String::from)));
        for r in &rows {
            let _ = writeln!(out, "{}", line(r));
        }
        let _ = writeln!(
            out,
            "verdict: {} (alpha {}, {} comparisons, critical |z| {:.4}, {} replicates, seed {})",
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            },
            self.alpha,
            self.comparisons.len(),
            self.critical_z,
            self.replicates,
            self.seed
        );
        out
    }
}
