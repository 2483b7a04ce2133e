//! Driving Gaussian processes ξ on ℝ^d: mean, covariance, variance and
//! incremental variance, finite-grid laws, and grid checks for stationary
//! increments and additivity.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance (to the trace) below which negative eigenvalues are
/// treated as rounding noise.
pub const PSD_TOL: f64 = 1e-9;

/// A time point in ℝ^d. One-dimensional points serialize as plain numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TimeRepr", into = "TimeRepr")]
pub struct TimePoint(Vec<f64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TimeRepr {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl TryFrom<TimeRepr> for TimePoint {
    type Error = Error;
    fn try_from(r: TimeRepr) -> Result<Self> {
        match r {
            TimeRepr::Scalar(t) => TimePoint::new(vec![t]),
            TimeRepr::Vector(v) => TimePoint::new(v),
        }
    }
}

impl From<TimePoint> for TimeRepr {
    fn from(t: TimePoint) -> Self {
        if t.0.len() == 1 {
            TimeRepr::Scalar(t.0[0])
        } else {
            TimeRepr::Vector(t.0)
        }
    }
}

impl From<f64> for TimePoint {
    fn from(t: f64) -> Self {
        TimePoint(vec![t])
    }
}

impl TimePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("time points need at least one finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn plus(&self, h: &TimePoint) -> TimePoint {
        TimePoint(self.0.iter().zip(&h.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, h: &TimePoint) -> TimePoint {
        TimePoint(self.0.iter().zip(&h.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn one() -> f64 {
    1.0
}

/// One summand of a stationary covariance `k(h)`, with `|h|` the Euclidean
/// norm of the lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelComponent {
    /// `variance · e^{-|h|/scale}`
    Exp {
        variance: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `variance · e^{-|h|²/(2 scale²)}`
    Gauss {
        variance: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `variance` at every lag: a common Gaussian shift of the whole path.
    Const { variance: f64 },
}

impl KernelComponent {
    fn eval(&self, lag: f64) -> f64 {
        match *self {
            KernelComponent::Exp { variance, scale } => variance * (-lag / scale).exp(),
            KernelComponent::Gauss { variance, scale } => variance * (-0.5 * lag * lag / (scale * scale)).exp(),
            KernelComponent::Const { variance } => variance,
        }
    }

    fn validate(&self) -> Result<()> {
        let (variance, scale) = match *self {
            KernelComponent::Exp { variance, scale } | KernelComponent::Gauss { variance, scale } => (variance, scale),
            KernelComponent::Const { variance } => (variance, 1.0),
        };
        if !(variance.is_finite() && variance >= 0.0) {
            return Err(Error::InvalidProcess(format!("kernel variance must be ≥ 0, got {variance}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidProcess(format!("kernel scale must be > 0, got {scale}")));
        }
        Ok(())
    }

    fn label(&self) -> String {
        match self {
            KernelComponent::Exp { variance, scale } => format!("exp(variance={variance},scale={scale})"),
            KernelComponent::Gauss { variance, scale } => format!("gauss(variance={variance},scale={scale})"),
            KernelComponent::Const { variance } => format!("const(variance={variance})"),
        }
    }
}

/// Stationary covariance function, a sum of registry components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KernelSpec(pub Vec<KernelComponent>);

impl KernelSpec {
    pub fn eval(&self, lag: f64) -> f64 {
        self.0.iter().map(|c| c.eval(lag)).sum()
    }

    pub fn variance(&self) -> f64 {
        self.eval(0.0)
    }

    /// Human-readable identifier, e.g. `exp(variance=0.5,scale=1)+const(variance=0.5)`.
    pub fn id(&self) -> String {
        self.0.iter().map(KernelComponent::label).collect::<Vec<_>>().join("+")
    }

    fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidProcess("kernel needs at least one component".into()));
        }
        self.0.iter().try_for_each(KernelComponent::validate)
    }
}

/// Incremental variance `γ(t₁, t₂) = Var[W(t₁) − W(t₂)]` of a process with
/// `W(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSpec {
    /// `2|t₁−t₂|^κ`, the increments of fractional Brownian motion.
    Fbm { kappa: f64 },
    /// `scale·|t₁−t₂|`, Brownian motion with `σ²(t) = scale·|t|`.
    Bm {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `coef·|t₁−t₂|^exponent`; not validated, so it can describe invalid
    /// variograms that `grid_law` must reject.
    Power { coef: f64, exponent: f64 },
    /// Variogram of a stationary kernel, `2(k(0) − k(t₁−t₂))`.
    Kernel { kernel: KernelSpec },
    /// `|g(t₁) − g(t₂)|` with `g(t) = sign(t)|t|^power`: Brownian motion run
    /// on a deformed clock. Increments are stationary only for `power = 1`.
    TimeChangedBm { power: f64 },
}

impl GammaSpec {
    pub fn eval(&self, t1: &[f64], t2: &[f64]) -> f64 {
        match self {
            GammaSpec::Fbm { kappa } => 2.0 * dist(t1, t2).powf(*kappa),
            GammaSpec::Bm { scale } => scale * dist(t1, t2),
            GammaSpec::Power { coef, exponent } => coef * dist(t1, t2).powf(*exponent),
            GammaSpec::Kernel { kernel } => 2.0 * (kernel.variance() - kernel.eval(dist(t1, t2))),
            GammaSpec::TimeChangedBm { power } => {
                let g = |t: f64| t.signum() * t.abs().powf(*power);
                (g(t1[0]) - g(t2[0])).abs()
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            GammaSpec::Fbm { kappa } => check_kappa(*kappa),
            GammaSpec::Bm { scale } if !(scale.is_finite() && *scale >= 0.0) => {
                Err(Error::InvalidProcess(format!("bm scale must be ≥ 0, got {scale}")))
            }
            GammaSpec::Power { coef, exponent } if !(coef.is_finite() && exponent.is_finite() && *exponent > 0.0) => {
                Err(Error::InvalidProcess("power variogram needs finite coef and exponent > 0".into()))
            }
            GammaSpec::Kernel { kernel } => kernel.validate(),
            GammaSpec::TimeChangedBm { power } => {
                if dim != 1 {
                    return Err(Error::InvalidProcess("time_changed_bm is defined for d = 1 only".into()));
                }
                if !(power.is_finite() && *power > 0.0) {
                    return Err(Error::InvalidProcess(format!("time change power must be > 0, got {power}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidProcess(format!("fBM index κ must lie in (0, 2], got {kappa}")))
    }
}

/// Deterministic drift added to a stationary-increment process.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftSpec {
    #[default]
    None,
    /// `⟨coeffs, t⟩ + offset`
    Linear {
        coeffs: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `−λσ²(t)/2 + offset`
    SelfSimilar {
        lambda: f64,
        #[serde(default)]
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessFamily {
    /// `W(t) + mean_const` with `Cov(W(t₁), W(t₂)) = kernel(t₁ − t₂)`.
    Stationary {
        kernel: KernelSpec,
        #[serde(default)]
        mean_const: f64,
    },
    /// `W(t) + drift(t)` where `W(0) = 0` has incremental variance `gamma`.
    StatIncrement {
        gamma: GammaSpec,
        #[serde(default)]
        drift: DriftSpec,
    },
    /// Fractional Brownian motion with
    /// `Cov = |t₁|^κ + |t₂|^κ − |t₁−t₂|^κ`, plus drift.
    Fbm {
        kappa: f64,
        #[serde(default)]
        drift: DriftSpec,
    },
}

/// Law of the driving Gaussian process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProcess", into = "RawProcess")]
pub struct ProcessSpec {
    dim: usize,
    family: ProcessFamily,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcess {
    #[serde(default = "one_dim")]
    dim: usize,
    family: ProcessFamily,
}

fn one_dim() -> usize {
    1
}

impl TryFrom<RawProcess> for ProcessSpec {
    type Error = Error;
    fn try_from(raw: RawProcess) -> Result<Self> {
        ProcessSpec::new(raw.dim, raw.family)
    }
}

impl From<ProcessSpec> for RawProcess {
    fn from(p: ProcessSpec) -> Self {
        RawProcess { dim: p.dim, family: p.family }
    }
}

impl ProcessSpec {
    pub fn new(dim: usize, family: ProcessFamily) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidProcess("time dimension must be positive".into()));
        }
        let drift = match &family {
            ProcessFamily::Stationary { kernel, mean_const } => {
                kernel.validate()?;
                if !mean_const.is_finite() {
                    return Err(Error::InvalidProcess("mean constant must be finite".into()));
                }
                None
            }
            ProcessFamily::StatIncrement { gamma, drift } => {
                gamma.validate(dim)?;
                Some(drift)
            }
            ProcessFamily::Fbm { kappa, drift } => {
                check_kappa(*kappa)?;
                Some(drift)
            }
        };
        match drift {
            Some(DriftSpec::Linear { coeffs, offset }) => {
                if coeffs.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: coeffs.len() });
                }
                if coeffs.iter().chain(std::iter::once(offset)).any(|c| !c.is_finite()) {
                    return Err(Error::InvalidProcess("drift coefficients must be finite".into()));
                }
            }
            Some(DriftSpec::SelfSimilar { lambda, offset }) => {
                if !(lambda.is_finite() && *lambda != 0.0 && offset.is_finite()) {
                    return Err(Error::InvalidProcess("self-similar drift needs finite λ ≠ 0".into()));
                }
            }
            _ => {}
        }
        Ok(Self { dim, family })
    }

    /// Fractional Brownian motion on ℝ^dim.
    pub fn fbm(dim: usize, kappa: f64, drift: DriftSpec) -> Result<Self> {
        Self::new(dim, ProcessFamily::Fbm { kappa, drift })
    }

    pub fn stationary(dim: usize, kernel: KernelSpec, mean_const: f64) -> Result<Self> {
        Self::new(dim, ProcessFamily::Stationary { kernel, mean_const })
    }

    pub fn stat_increment(dim: usize, gamma: GammaSpec, drift: DriftSpec) -> Result<Self> {
        Self::new(dim, ProcessFamily::StatIncrement { gamma, drift })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &ProcessFamily {
        &self.family
    }

    pub fn is_stationary_family(&self) -> bool {
        matches!(self.family, ProcessFamily::Stationary { .. })
    }

    fn check_dim(&self, t: &TimePoint) -> Result<()> {
        if t.dim() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: t.dim() })
        }
    }

    fn variance_unchecked(&self, t: &[f64]) -> f64 {
        match &self.family {
            ProcessFamily::Stationary { kernel, .. } => kernel.variance(),
            ProcessFamily::StatIncrement { gamma, .. } => gamma.eval(&vec![0.0; t.len()], t),
            ProcessFamily::Fbm { kappa, .. } => 2.0 * norm(t).powf(*kappa),
        }
    }

    fn incr_unchecked(&self, t1: &[f64], t2: &[f64]) -> f64 {
        match &self.family {
            ProcessFamily::Stationary { kernel, .. } => 2.0 * (kernel.variance() - kernel.eval(dist(t1, t2))),
            ProcessFamily::StatIncrement { gamma, .. } => gamma.eval(t1, t2),
            ProcessFamily::Fbm { kappa, .. } => 2.0 * dist(t1, t2).powf(*kappa),
        }
    }

    fn cov_unchecked(&self, t1: &[f64], t2: &[f64]) -> f64 {
        match &self.family {
            ProcessFamily::Stationary { kernel, .. } => kernel.eval(dist(t1, t2)),
            ProcessFamily::StatIncrement { gamma, .. } => {
                let z = vec![0.0; t1.len()];
                0.5 * (gamma.eval(&z, t1) + gamma.eval(&z, t2) - gamma.eval(t1, t2))
            }
            ProcessFamily::Fbm { kappa, .. } => {
                norm(t1).powf(*kappa) + norm(t2).powf(*kappa) - dist(t1, t2).powf(*kappa)
            }
        }
    }

    fn mean_unchecked(&self, t: &[f64]) -> f64 {
        let drift = match &self.family {
            ProcessFamily::Stationary { mean_const, .. } => return *mean_const,
            ProcessFamily::StatIncrement { drift, .. } | ProcessFamily::Fbm { drift, .. } => drift,
        };
        match drift {
            DriftSpec::None => 0.0,
            DriftSpec::Linear { coeffs, offset } => coeffs.iter().zip(t).map(|(c, x)| c * x).sum::<f64>() + offset,
            DriftSpec::SelfSimilar { lambda, offset } => -0.5 * lambda * self.variance_unchecked(t) + offset,
        }
    }

    /// μ(t).
    pub fn mean_at(&self, t: &TimePoint) -> Result<f64> {
        self.check_dim(t)?;
        Ok(self.mean_unchecked(t.coords()))
    }

    /// σ²(t).
    pub fn variance_at(&self, t: &TimePoint) -> Result<f64> {
        self.check_dim(t)?;
        Ok(self.variance_unchecked(t.coords()))
    }

    /// r(t₁, t₂). Drift never enters.
    pub fn cov_at(&self, t1: &TimePoint, t2: &TimePoint) -> Result<f64> {
        self.check_dim(t1)?;
        self.check_dim(t2)?;
        Ok(self.cov_unchecked(t1.coords(), t2.coords()))
    }

    /// γ(t₁, t₂) = Var[ξ(t₁) − ξ(t₂)].
    pub fn incr_variance(&self, t1: &TimePoint, t2: &TimePoint) -> Result<f64> {
        self.check_dim(t1)?;
        self.check_dim(t2)?;
        Ok(self.incr_unchecked(t1.coords(), t2.coords()))
    }

    /// Mean vector and covariance matrix of `(ξ(t₁), …, ξ(tₙ))`; fails with
    /// [`Error::NotPsd`] when the covariance is not positive semidefinite.
    pub fn grid_law(&self, times: &[TimePoint]) -> Result<GridLaw> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("grid_law needs at least one time".into()));
        }
        for t in times {
            self.check_dim(t)?;
        }
        let n = times.len();
        let mean = times.iter().map(|t| self.mean_unchecked(t.coords())).collect();
        let mut cov = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let c = if i == j {
                    self.variance_unchecked(times[i].coords())
                } else {
                    self.cov_unchecked(times[i].coords(), times[j].coords())
                };
                cov[i][j] = c;
                cov[j][i] = c;
            }
        }
        let law = GridLaw { times: times.to_vec(), mean, cov };
        law.validate_psd()?;
        Ok(law)
    }
}

/// Law of `(ξ(t₁), …, ξ(tₙ))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridLaw {
    pub times: Vec<TimePoint>,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl GridLaw {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn trace(&self) -> f64 {
        (0..self.len()).map(|i| self.cov[i][i]).sum()
    }

    /// Adds a constant to every mean entry.
    pub fn shifted(mut self, c: f64) -> Self {
        self.mean.iter_mut().for_each(|m| *m += c);
        self
    }

    fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        let n = self.len();
        let m = DMatrix::from_fn(n, n, |i, j| self.cov[i][j]);
        SymmetricEigen::new(m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate_psd(&self) -> Result<()> {
        if self.cov.iter().flatten().any(|c| !c.is_finite()) || self.mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidProcess("non-finite mean or covariance entry".into()));
        }
        let trace = self.trace();
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL * trace.max(0.0) || trace < 0.0 {
            return Err(Error::NotPsd { min_eigenvalue, trace });
        }
        Ok(())
    }

    /// Symmetric square-root factor `F` with `F·Fᵀ = cov`, built from the
    /// eigendecomposition with small negative eigenvalues clamped to zero.
    pub fn factor(&self) -> Result<Factor> {
        let n = self.len();
        let trace = self.trace();
        let eig = self.eigen();
        let mut data = vec![0.0; n * n];
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda < -PSD_TOL * trace.max(0.0) {
                return Err(Error::NotPsd { min_eigenvalue: lambda, trace });
            }
            let s = lambda.max(0.0).sqrt();
            for i in 0..n {
                data[i * n + k] = eig.eigenvectors[(i, k)] * s;
            }
        }
        Ok(Factor { n, data })
    }

    /// Two-time marginal `(ξ(tᵢ), ξ(tⱼ))`.
    pub fn marginal2(&self, i: usize, j: usize) -> GridLaw {
        GridLaw {
            times: vec![self.times[i].clone(), self.times[j].clone()],
            mean: vec![self.mean[i], self.mean[j]],
            cov: vec![vec![self.cov[i][i], self.cov[i][j]], vec![self.cov[j][i], self.cov[j][j]]],
        }
    }
}

/// Square-root factor of a covariance matrix, row-major `n × n`.
#[derive(Debug, Clone)]
pub struct Factor {
    n: usize,
    data: Vec<f64>,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `out = F·z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }
}

/// Largest `|γ(t₁,t₂) − γ(t₁+h,t₂+h)|` over the grid (0 for an empty grid).
pub fn stationary_increments_residual<F>(gamma: F, grid: &[(TimePoint, TimePoint, TimePoint)]) -> f64
where
    F: Fn(&TimePoint, &TimePoint) -> f64,
{
    grid.iter()
        .map(|(t1, t2, h)| (gamma(t1, t2) - gamma(&t1.plus(h), &t2.plus(h))).abs())
        .fold(0.0, f64::max)
}

/// Translation invariance of γ on a finite grid of `(t₁, t₂, h)` triples.
pub fn stationary_increments_check<F>(gamma: F, grid: &[(TimePoint, TimePoint, TimePoint)], tol: f64) -> bool
where
    F: Fn(&TimePoint, &TimePoint) -> f64,
{
    stationary_increments_residual(gamma, grid) <= tol
}

/// Largest `|f(t₁+t₂) − f(t₁) − f(t₂)|` over the grid.
pub fn additive_residual<F>(f: F, grid: &[(TimePoint, TimePoint)]) -> f64
where
    F: Fn(&TimePoint) -> f64,
{
    grid.iter().map(|(a, b)| (f(&a.plus(b)) - f(a) - f(b)).abs()).fold(0.0, f64::max)
}

pub fn additive_check<F>(f: F, grid: &[(TimePoint, TimePoint)], tol: f64) -> bool
where
    F: Fn(&TimePoint) -> f64,
{
    additive_residual(f, grid) <= tol
}

/// Finite validation grid for structural checks.
#[derive(Debug, Clone)]
pub struct ValidationGrid {
    pub points: Vec<TimePoint>,
    pub triples: Vec<(TimePoint, TimePoint, TimePoint)>,
    pub pairs: Vec<(TimePoint, TimePoint)>,
}

impl ValidationGrid {
    /// Lattice of step 0.5 on `[-2, 2]^d` with every lattice vector as a
    /// shift. For `d ≥ 3` the lattice coarsens to step 2 and shifts to
    /// `±0.5` along each axis and the diagonal, to keep the triple count
    /// manageable.
    pub fn default_for(dim: usize) -> Self {
        let (step, full_shifts) = if dim <= 2 { (0.5, true) } else { (2.0, false) };
        let axis: Vec<f64> = (0..).map(|i| -2.0 + step * i as f64).take_while(|&x| x <= 2.0 + 1e-12).collect();
        let mut points = vec![Vec::new()];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        let points: Vec<TimePoint> = points.into_iter().map(TimePoint).collect();
        let shifts: Vec<TimePoint> = if full_shifts {
            points.clone()
        } else {
            let mut s = Vec::new();
            for i in 0..dim {
                for sign in [-0.5, 0.5] {
                    let mut v = vec![0.0; dim];
                    v[i] = sign;
                    s.push(TimePoint(v));
                }
            }
            s.push(TimePoint(vec![0.5; dim]));
            s.push(TimePoint(vec![-0.5; dim]));
            s
        };
        Self::from_points(points, &shifts)
    }

    pub fn from_points(points: Vec<TimePoint>, shifts: &[TimePoint]) -> Self {
        let mut triples = Vec::with_capacity(points.len() * points.len() * shifts.len());
        let mut pairs = Vec::with_capacity(points.len() * points.len());
        for a in &points {
            for b in &points {
                pairs.push((a.clone(), b.clone()));
                for h in shifts {
                    triples.push((a.clone(), b.clone(), h.clone()));
                }
            }
        }
        Self { points, triples, pairs }
    }
}
