//! Seed-reproducible simulation of `V_i(t) = U_i + ξ_i(t)` on a time grid.
//!
//! Two strategies are available. `Window` draws every starting point in a
//! padded window around the observation boxes, with a certified bound on
//! the expected number of missed box hits. `HitConditioned` draws exactly
//! the particles that visit at least one observation box, with no
//! truncation: for an exponential term `w·e_λ` and a box `I` at time `t_j`
//! the hitting values `y = U + ξ(t_j)` form a Poisson process with density
//! `w·E[e^{λξ(t_j)}]·e^{-λy}` on `I`, independent of the exponentially
//! tilted path `ξ ~ N(μ + λΣ_{·j}, Σ)`. Boxes are processed in a fixed
//! order and a particle is kept only by the first box it hits.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analytic::PairSpec;
use crate::error::{checked_exp, Error, Result};
use crate::interval::Interval;
use crate::measures::{ExpTerm, GaussianMeasure1D, MeasureSpec};
use crate::normal;
use crate::processes::{Factor, GridLaw, TimePoint};
use crate::quadrature;
use crate::rng::substream;

/// Auto padding targets this truncation bound per observation box.
pub const EPSILON_PER_BOX: f64 = 1e-4;
/// Padding cap in units of `max_j (|μ_j| + 10σ_j)`.
pub const CAP_UNITS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Padding {
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PaddingRepr {
    Word(String),
    Value(f64),
}

impl Serialize for Padding {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Padding::Auto => PaddingRepr::Word("auto".into()),
            Padding::Fixed(p) => PaddingRepr::Value(*p),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Padding {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PaddingRepr::deserialize(d)? {
            PaddingRepr::Word(w) if w == "auto" => Ok(Padding::Auto),
            PaddingRepr::Value(p) if p > 0.0 && p.is_finite() => Ok(Padding::Fixed(p)),
            _ => Err(serde::de::Error::custom("padding must be \"auto\" or a positive number")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    #[default]
    HitConditioned,
    Window {
        #[serde(default)]
        padding: Padding,
    },
}

/// One simulation run: `replicates` independent systems observed at
/// `times`, with `boxes[j]` the intervals that will be queried at `times[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub pair: PairSpec,
    pub times: Vec<TimePoint>,
    pub boxes: Vec<Vec<Interval>>,
    pub replicates: u64,
    pub seed: u64,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Selects an independent family of substreams for the same seed.
    #[serde(default)]
    pub arm: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        if self.times.is_empty() {
            return Err(Error::InvalidArgument("at least one time point is required".into()));
        }
        if self.boxes.len() != self.times.len() {
            return Err(Error::DimensionMismatch { expected: self.times.len(), got: self.boxes.len() });
        }
        for t in &self.times {
            if t.dim() != self.pair.dim() {
                return Err(Error::DimensionMismatch { expected: self.pair.dim(), got: t.dim() });
            }
        }
        if self.boxes.iter().flatten().any(|b| !b.is_bounded()) {
            return Err(Error::InvalidArgument("observation boxes must be bounded".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        if let Strategy::Window { padding: Padding::Fixed(p) } = self.strategy {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidArgument("padding must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One realisation. Rows of `path_values` follow `start_points`, which are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSample {
    pub start_points: Vec<f64>,
    pub path_values: Vec<Vec<f64>>,
    pub window: (f64, f64),
    pub truncation_error_bound: f64,
}

impl SystemSample {
    pub fn len(&self) -> usize {
        self.start_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start_points.is_empty()
    }

    /// Number of particles with `V(t_{cols[k]}) ∈ bounds[k]` for every `k`.
    pub fn count_in(&self, cols: &[usize], bounds: &[Interval]) -> u64 {
        self.path_values
            .iter()
            .filter(|row| cols.iter().zip(bounds).all(|(&c, b)| b.contains(row[c])))
            .count() as u64
    }
}

fn flatten_boxes(boxes: &[Vec<Interval>]) -> Vec<(usize, Interval)> {
    let mut out: Vec<(usize, Interval)> = Vec::new();
    for (j, list) in boxes.iter().enumerate() {
        for b in list {
            if !out.iter().any(|(k, c)| *k == j && c == b) {
                out.push((j, *b));
            }
        }
    }
    out
}

fn hull(entries: &[(usize, Interval)]) -> Option<(f64, f64)> {
    let lo = entries.iter().map(|(_, b)| b.lo).fold(f64::INFINITY, f64::min);
    let hi = entries.iter().map(|(_, b)| b.hi).fold(f64::NEG_INFINITY, f64::max);
    (lo <= hi).then_some((lo, hi))
}

#[derive(Clone, Copy)]
enum Side {
    Left(f64),
    Right(f64),
}

fn prob_beyond(side: Side, mean: f64, sd: f64) -> f64 {
    match side {
        Side::Left(a) => {
            if sd == 0.0 {
                f64::from(mean <= a)
            } else {
                normal::cdf((a - mean) / sd)
            }
        }
        Side::Right(b) => {
            if sd == 0.0 {
                f64::from(mean >= b)
            } else {
                normal::sf((b - mean) / sd)
            }
        }
    }
}

/// Expected number of particles starting beyond `side` whose value at a
/// time with marginal `N(mu, s2)` falls in `b`.
fn side_term(measure: &MeasureSpec, mu: f64, s2: f64, b: Interval, side: Side) -> Result<f64> {
    let mut total = 0.0;
    for term in measure.exp_terms() {
        let l = term.rate;
        let tilted = ExpTerm { weight: checked_exp(term.weight.ln() + l * mu + 0.5 * l * l * s2)?, rate: l };
        let single = MeasureSpec::new(vec![tilted], vec![])?;
        if s2 == 0.0 {
            // starter lands at y = x + mu exactly
            let (lo, hi) = match side {
                Side::Left(a) => (b.lo, b.hi.min(a + mu)),
                Side::Right(c) => (b.lo.max(c + mu), b.hi),
            };
            if lo < hi {
                total += single.mass_on_interval(lo, hi)?;
            }
            continue;
        }
        let scale = single.mass_on_interval(b.lo, b.hi)?;
        if scale == 0.0 {
            continue;
        }
        // y = x + ξ has tilted law for ξ, so x = y − ξ with ξ ~ N(mu + λs², s²)
        let shift = mu + l * s2;
        let sd = s2.sqrt();
        let log_w = tilted.weight.ln();
        let f = |y: f64| (log_w - l * y).exp() * prob_beyond(side, y - shift, sd);
        total += quadrature::integrate(f, b.lo, b.hi, 1e-8, 1e-14 * scale)?;
    }
    for g in measure.gauss_terms() {
        let vt = g.variance + s2;
        let my = g.mean + mu;
        if vt == 0.0 {
            if b.contains(my) && prob_beyond(side, g.mean, 0.0) > 0.0 {
                total += g.total_mass;
            }
            continue;
        }
        if g.variance == 0.0 {
            total += g.total_mass * prob_beyond(side, g.mean, 0.0) * normal::interval_prob(my, vt, b.lo, b.hi);
            continue;
        }
        if s2 == 0.0 {
            let (lo, hi) = match side {
                Side::Left(a) => (b.lo, b.hi.min(a + mu)),
                Side::Right(c) => (b.lo.max(c + mu), b.hi),
            };
            total += g.total_mass * normal::interval_prob(my, vt, lo, hi);
            continue;
        }
        let k = g.variance / vt;
        let csd = (g.variance * s2 / vt).sqrt();
        let f = |y: f64| normal::density(my, vt, y) * prob_beyond(side, g.mean + k * (y - my), csd);
        total += g.total_mass * quadrature::integrate(f, b.lo, b.hi, 1e-8, 1e-16)?;
    }
    Ok(total)
}

fn side_bound(measure: &MeasureSpec, law: &GridLaw, entries: &[(usize, Interval)], side: Side) -> Result<f64> {
    entries.iter().try_fold(0.0, |acc, &(j, b)| Ok(acc + side_term(measure, law.mean[j], law.cov[j][j], b, side)?))
}

fn padding_unit(law: &GridLaw) -> f64 {
    (0..law.len()).map(|j| law.mean[j].abs() + 10.0 * law.cov[j][j].max(0.0).sqrt()).fold(0.0, f64::max)
}

fn fixed_window(
    measure: &MeasureSpec,
    law: &GridLaw,
    entries: &[(usize, Interval)],
    padding: f64,
) -> Result<(f64, f64, f64)> {
    let (lo, hi) = hull(entries).ok_or_else(|| Error::InvalidArgument("no observation boxes".into()))?;
    let (a, b) = (lo - padding, hi + padding);
    let bound = side_bound(measure, law, entries, Side::Left(a))? + side_bound(measure, law, entries, Side::Right(b))?;
    Ok((a, b, bound))
}

fn auto_window(
    measure: &MeasureSpec,
    law: &GridLaw,
    entries: &[(usize, Interval)],
    epsilon: f64,
) -> Result<(f64, f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let (lo, hi) = hull(entries).ok_or_else(|| Error::InvalidArgument("no observation boxes".into()))?;
    let cap = CAP_UNITS * padding_unit(law);
    let target = 0.5 * epsilon;
    let search = |at: &dyn Fn(f64) -> Side| -> Result<f64> {
        let f = |p: f64| side_bound(measure, law, entries, at(p));
        if f(0.0)? <= target {
            return Ok(0.0);
        }
        let at_cap = f(cap)?;
        if at_cap > target {
            return Err(Error::WindowCap { bound: at_cap, epsilon, padding: cap });
        }
        let (mut p0, mut p1) = (0.0, cap);
        while p1 - p0 > 1e-6 * cap.max(1.0) {
            let mid = 0.5 * (p0 + p1);
            if f(mid)? <= target {
                p1 = mid;
            } else {
                p0 = mid;
            }
        }
        Ok(p1)
    };
    let left = search(&|p| Side::Left(lo - p))?;
    let right = search(&|p| Side::Right(hi + p))?;
    let (a, b) = (lo - left, hi + right);
    let bound = side_bound(measure, law, entries, Side::Left(a))? + side_bound(measure, law, entries, Side::Right(b))?;
    Ok((a, b, bound))
}

/// Smallest padded window `[a, b] ⊇ hull(boxes)` whose truncation bound,
/// the expected number of starters outside `[a, b]` landing in a box, is at
/// most `epsilon`. Returns `(a, b, bound)`.
pub fn sampling_window(
    pair: &PairSpec,
    times: &[TimePoint],
    boxes: &[Vec<Interval>],
    epsilon: f64,
) -> Result<(f64, f64, f64)> {
    if boxes.len() != times.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: boxes.len() });
    }
    if boxes.iter().flatten().any(|b| !b.is_bounded()) {
        return Err(Error::InvalidArgument("boxes must be bounded".into()));
    }
    let law = pair.grid_law(times)?;
    auto_window(&pair.measure, &law, &flatten_boxes(boxes), epsilon)
}

fn poisson_count(mass: f64, rng: &mut ChaCha8Rng) -> Result<usize> {
    if mass == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mass).map_err(|e| Error::InvalidArgument(format!("Poisson mean {mass}: {e}")))?;
    Ok(d.sample(rng) as usize)
}

/// Poisson starting points of `m` on `[a, b]`, sorted ascending.
pub fn sample_poisson_starts(m: &MeasureSpec, window: (f64, f64), rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let (a, b) = window;
    let mass = m.mass_on_interval(a, b)?;
    let n = poisson_count(mass, rng)?;
    let mut xs = (0..n).map(|_| m.inverse_cdf_on_window(a, b, rng.random::<f64>())).collect::<Result<Vec<_>>>()?;
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

fn draw_path(mean: &[f64], factor: &Factor, rng: &mut ChaCha8Rng, z: &mut [f64], out: &mut [f64]) {
    for zi in z.iter_mut() {
        *zi = rng.sample(StandardNormal);
    }
    factor.apply(z, out);
    for (o, m) in out.iter_mut().zip(mean) {
        *o += m;
    }
}

/// `count` independent draws of the Gaussian vector described by `law`.
pub fn sample_paths(law: &GridLaw, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let factor = law.factor()?;
    let n = law.len();
    let mut z = vec![0.0; n];
    Ok((0..count)
        .map(|_| {
            let mut row = vec![0.0; n];
            draw_path(&law.mean, &factor, rng, &mut z, &mut row);
            row
        })
        .collect())
}

struct HitPiece {
    entry: usize,
    measure: MeasureSpec,
    count: Option<Poisson<f64>>,
    tilted_mean: Vec<f64>,
}

enum Plan {
    Window { a: f64, b: f64, bound: f64, mass: f64 },
    Hits { entries: Vec<(usize, Interval)>, pieces: Vec<HitPiece>, gauss: Vec<GaussianMeasure1D> },
}

/// Prepared simulation: laws, factorisation and window are computed once,
/// replicates are then independent and can run in any order.
pub struct Simulator {
    config: SimulationConfig,
    law: GridLaw,
    factor: Factor,
    plan: Plan,
}

impl Simulator {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let law = config.pair.grid_law(&config.times)?;
        let factor = law.factor()?;
        let entries = flatten_boxes(&config.boxes);
        let measure = &config.pair.measure;
        let plan = match config.strategy {
            Strategy::Window { padding } => {
                let (a, b, bound) = match padding {
                    Padding::Auto if entries.is_empty() => {
                        return Err(Error::InvalidArgument("auto padding needs observation boxes".into()))
                    }
                    Padding::Auto => auto_window(measure, &law, &entries, EPSILON_PER_BOX * entries.len() as f64)?,
                    Padding::Fixed(p) => fixed_window(measure, &law, &entries, p)?,
                };
                let mass = measure.mass_on_interval(a, b)?;
                Plan::Window { a, b, bound, mass }
            }
            Strategy::HitConditioned => {
                let mut pieces = Vec::new();
                for term in measure.exp_terms() {
                    let l = term.rate;
                    for (e, &(j, b)) in entries.iter().enumerate() {
                        let (mu, s2) = (law.mean[j], law.cov[j][j]);
                        let tilted = ExpTerm { weight: checked_exp(term.weight.ln() + l * mu + 0.5 * l * l * s2)?, rate: l };
                        let single = MeasureSpec::new(vec![tilted], vec![])?;
                        let mass = single.mass_on_interval(b.lo, b.hi)?;
                        let count = if mass > 0.0 {
                            Some(Poisson::new(mass).map_err(|err| Error::InvalidArgument(format!("Poisson mean {mass}: {err}")))?)
                        } else {
                            None
                        };
                        let tilted_mean = (0..law.len()).map(|k| law.mean[k] + l * law.cov[k][j]).collect();
                        pieces.push(HitPiece { entry: e, measure: single, count, tilted_mean });
                    }
                }
                Plan::Hits { entries, pieces, gauss: measure.gauss_terms().to_vec() }
            }
        };
        Ok(Self { config, law, factor, plan })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn law(&self) -> &GridLaw {
        &self.law
    }

    pub fn window(&self) -> (f64, f64) {
        match self.plan {
            Plan::Window { a, b, .. } => (a, b),
            Plan::Hits { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn truncation_error_bound(&self) -> f64 {
        match self.plan {
            Plan::Window { bound, .. } => bound,
            Plan::Hits { .. } => 0.0,
        }
    }

    /// Replicate `r`, drawn from its own substream.
    pub fn replicate(&self, r: u64) -> Result<SystemSample> {
        let mut rng = substream(self.config.seed, self.config.arm, r);
        let n = self.law.len();
        let mut z = vec![0.0; n];
        let mut particles: Vec<(f64, Vec<f64>)> = Vec::new();
        match &self.plan {
            Plan::Window { a, b, mass, .. } => {
                let count = poisson_count(*mass, &mut rng)?;
                for _ in 0..count {
                    let x = self.config.pair.measure.inverse_cdf_on_window(*a, *b, rng.random::<f64>())?;
                    let mut row = vec![0.0; n];
                    draw_path(&self.law.mean, &self.factor, &mut rng, &mut z, &mut row);
                    row.iter_mut().for_each(|v| *v += x);
                    particles.push((x, row));
                }
            }
            Plan::Hits { entries, pieces, gauss } => {
                for piece in pieces {
                    let Some(dist) = &piece.count else { continue };
                    let count = dist.sample(&mut rng) as usize;
                    let (j, b) = entries[piece.entry];
                    for _ in 0..count {
                        let y = piece.measure.inverse_cdf_on_window(b.lo, b.hi, rng.random::<f64>())?;
                        let mut row = vec![0.0; n];
                        draw_path(&piece.tilted_mean, &self.factor, &mut rng, &mut z, &mut row);
                        let x = y - row[j];
                        row.iter_mut().for_each(|v| *v += x);
                        row[j] = y;
                        let seen = entries[..piece.entry].iter().any(|(k, c)| c.contains(row[*k]));
                        if !seen {
                            particles.push((x, row));
                        }
                    }
                }
                for g in gauss {
                    let count = poisson_count(g.total_mass, &mut rng)?;
                    for _ in 0..count {
                        let zx: f64 = rng.sample(StandardNormal);
                        let x = g.mean + g.variance.sqrt() * zx;
                        let mut row = vec![0.0; n];
                        draw_path(&self.law.mean, &self.factor, &mut rng, &mut z, &mut row);
                        row.iter_mut().for_each(|v| *v += x);
                        particles.push((x, row));
                    }
                }
            }
        }
        particles.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (start_points, path_values) = particles.into_iter().unzip();
        Ok(SystemSample {
            start_points,
            path_values,
            window: self.window(),
            truncation_error_bound: self.truncation_error_bound(),
        })
    }

    /// Applies `f` to every replicate, in parallel, returning results in
    /// replicate order. The output does not depend on the thread count.
    pub fn map_replicates<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &SystemSample) -> T + Sync + Send,
    {
        let run = || {
            (0..self.config.replicates)
                .into_par_iter()
                .map(|r| self.replicate(r).map(|s| f(r, &s)))
                .collect::<Result<Vec<T>>>()
        };
        match self.config.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
                .install(run),
            None => run(),
        }
    }

    pub fn into_stream(self) -> SampleStream {
        SampleStream { sim: self, next: 0 }
    }
}

/// Replicates in index order.
pub struct SampleStream {
    sim: Simulator,
    next: u64,
}

impl SampleStream {
    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }
}

impl Iterator for SampleStream {
    type Item = Result<SystemSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.sim.config.replicates {
            return None;
        }
        let r = self.next;
        self.next += 1;
        Some(self.sim.replicate(r))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.sim.config.replicates - self.next) as usize;
        (left, Some(left))
    }
}

/// Validates `config` and returns the stream of its replicates.
pub fn simulate_system(config: SimulationConfig) -> Result<SampleStream> {
    Ok(Simulator::new(config)?.into_stream())
}

/// Writes `replicate,particle,start,V_t0,...` rows in replicate, then
/// particle order.
pub fn write_csv<W: Write, I: Iterator<Item = Result<SystemSample>>>(
    samples: I,
    n_times: usize,
    out: &mut W,
) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut header = String::from("replicate,particle,start");
    for j in 0..n_times {
        header.push_str(&format!(",V_t{j}"));
    }
    writeln!(out, "{header}").map_err(io)?;
    for (r, sample) in samples.enumerate() {
        let sample = sample?;
        for (i, (x, row)) in sample.start_points.iter().zip(&sample.path_values).enumerate() {
            let mut line = format!("{r},{i},{x}");
            for v in row {
                line.push_str(&format!(",{v}"));
            }
            writeln!(out, "{line}").map_err(io)?;
        }
    }
    Ok(())
}
