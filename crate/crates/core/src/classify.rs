//! Decision procedure for stationarity of a pair, canonical representatives
//! and the analytic equal-in-law test.
//!
//! Structural equalities are decided on the mean and covariance functions
//! over a finite [`ValidationGrid`]. Overlapping families are resolved with
//! priority S3 > S2 > S1, so a stationary process only receives the label
//! S1* when its measure is neither `α·e_λ (λ ≠ 0)` nor `α·e_0`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::analytic::PairSpec;
use crate::error::{checked_exp, Error, Result};
use crate::measures::{ExpTerm, GaussianMeasure1D, MeasureSpec, MEASURE_REL_TOL};
use crate::processes::{
    additive_residual, stationary_increments_residual, DriftSpec, GammaSpec, ProcessFamily, ProcessSpec, TimePoint,
    ValidationGrid,
};

/// Default tolerance for grid comparisons.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyLabel {
    /// Stationary process, arbitrary measure. Never emitted: every such pair
    /// is reported as S1*, S2 or S3.
    S1 { kernel: Option<String>, c: f64 },
    S1Star { kernel: Option<String>, c: f64 },
    S2 { alpha: f64, coeffs: Vec<f64>, c: f64 },
    S3 { alpha: f64, lambda: f64, c: f64, lambda_fit: Option<f64> },
    NotStationary { reason: String },
}

impl FamilyLabel {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyLabel::S1 { .. } => "S1",
            FamilyLabel::S1Star { .. } => "S1*",
            FamilyLabel::S2 { .. } => "S2",
            FamilyLabel::S3 { .. } => "S3",
            FamilyLabel::NotStationary { .. } => "not_stationary",
        }
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(self, FamilyLabel::NotStationary { .. })
    }

    pub fn params(&self) -> Value {
        match self {
            FamilyLabel::S1 { kernel, c } | FamilyLabel::S1Star { kernel, c } => json!({ "kernel": kernel, "c": c }),
            FamilyLabel::S2 { alpha, coeffs, c } => json!({ "alpha": alpha, "coeffs": coeffs, "c": c }),
            FamilyLabel::S3 { alpha, lambda, c, lambda_fit } => {
                json!({ "alpha": alpha, "lambda": lambda, "c": c, "lambda_fit": lambda_fit })
            }
            FamilyLabel::NotStationary { reason } => json!({ "reason": reason }),
        }
    }

    fn class(&self) -> u8 {
        match self {
            FamilyLabel::S1 { .. } | FamilyLabel::S1Star { .. } => 1,
            FamilyLabel::S2 { .. } => 2,
            FamilyLabel::S3 { .. } => 3,
            FamilyLabel::NotStationary { .. } => 0,
        }
    }
}

/// A named grid check and its largest residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub check: String,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Evidence {
    fn new(check: &str, residual: f64) -> Self {
        Self { check: check.into(), residual, note: None }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub label: FamilyLabel,
    pub evidence: Vec<Evidence>,
    pub canonical: Option<PairSpec>,
}

impl Serialize for ClassificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassificationReport", 4)?;
        st.serialize_field("label", self.label.name())?;
        st.serialize_field("params", &self.label.params())?;
        st.serialize_field("evidence", &self.evidence)?;
        st.serialize_field("canonical", &self.canonical)?;
        st.end()
    }
}

struct Moments<'a> {
    pair: &'a PairSpec,
}

impl Moments<'_> {
    fn mean(&self, t: &TimePoint) -> Result<f64> {
        self.pair.mean_at(t)
    }

    fn var(&self, t: &TimePoint) -> Result<f64> {
        self.pair.variance_at(t)
    }

    fn cov(&self, a: &TimePoint, b: &TimePoint) -> Result<f64> {
        self.pair.process.cov_at(a, b)
    }

    fn gamma(&self, a: &TimePoint, b: &TimePoint) -> Result<f64> {
        self.pair.process.incr_variance(a, b)
    }

    /// Translation invariance of mean and covariance.
    fn stationary_residual(&self, grid: &ValidationGrid) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, b, h) in &grid.triples {
            let (ah, bh) = (a.plus(h), b.plus(h));
            worst = worst.max((self.cov(a, b)? - self.cov(&ah, &bh)?).abs());
        }
        for (a, h) in &grid.pairs {
            worst = worst.max((self.mean(a)? - self.mean(&a.plus(h))?).abs());
        }
        Ok(worst)
    }

    fn increments_residual(&self, grid: &ValidationGrid) -> f64 {
        let g = |a: &TimePoint, b: &TimePoint| self.gamma(a, b).unwrap_or(f64::NAN);
        let r = stationary_increments_residual(g, &grid.triples);
        if r.is_nan() {
            f64::INFINITY
        } else {
            r
        }
    }
}

fn check_grid(pair: &PairSpec, grid: &ValidationGrid) -> Result<()> {
    match grid.points.iter().find(|p| p.dim() != pair.dim()) {
        Some(p) => Err(Error::DimensionMismatch { expected: pair.dim(), got: p.dim() }),
        None if grid.points.is_empty() => Err(Error::InvalidArgument("validation grid is empty".into())),
        None => Ok(()),
    }
}

fn unit(dim: usize, i: usize) -> TimePoint {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    TimePoint::new(v).expect("finite")
}

/// Least-squares slope of `μ = −λσ²/2 + c`, when σ² varies on the grid.
fn fit_lambda(mu: &[f64], s2: &[f64]) -> Option<f64> {
    let n = mu.len() as f64;
    let x: Vec<f64> = s2.iter().map(|v| -0.5 * v).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = mu.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(mu).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 1e-12 * n).then(|| sxy / sxx)
}

fn kernel_id(process: &ProcessSpec) -> Option<String> {
    match process.family() {
        ProcessFamily::Stationary { kernel, .. } => Some(kernel.id()),
        _ => None,
    }
}

/// Labels `pair` as S1*, S2, S3 or not stationary, with the grid evidence
/// behind the decision and the canonical pair for S2/S3.
pub fn classify_pair(pair: &PairSpec, grid: &ValidationGrid, tol: f64) -> Result<ClassificationReport> {
    check_grid(pair, grid)?;
    let m = Moments { pair };
    let zero = TimePoint::zero(pair.dim());
    let mut evidence = Vec::new();
    let stationary = m.stationary_residual(grid)?;
    let incr = m.increments_residual(grid);

    let not_stationary = |reason: String, evidence: Vec<Evidence>| ClassificationReport {
        label: FamilyLabel::NotStationary { reason },
        evidence,
        canonical: None,
    };

    let measure = &pair.measure;
    let single = measure.single_exp().filter(|_| measure.gauss_terms().is_empty());
    let label = match single {
        Some(ExpTerm { weight: alpha, rate: lambda }) if lambda != 0.0 => {
            evidence.push(Evidence::new("stationary_increments", incr));
            if incr > tol {
                return Ok(not_stationary(
                    format!("increments of the process are not stationary (residual {incr:.3e})"),
                    evidence,
                ));
            }
            let mu = grid.points.iter().map(|t| m.mean(t)).collect::<Result<Vec<_>>>()?;
            let s2 = grid.points.iter().map(|t| m.var(t)).collect::<Result<Vec<_>>>()?;
            let c = m.mean(&zero)? + 0.5 * lambda * m.var(&zero)?;
            let drift = mu.iter().zip(&s2).map(|(u, v)| (u + 0.5 * lambda * v - c).abs()).fold(0.0, f64::max);
            evidence.push(Evidence::new("s3_drift_relation", drift));
            if drift > tol {
                return Ok(not_stationary(
                    format!("mean is not -lambda*sigma^2/2 + c with lambda = {lambda} (residual {drift:.3e})"),
                    evidence,
                ));
            }
            if stationary <= tol {
                evidence.push(Evidence::new("stationary_process", stationary).with_note("S1 overlap resolved to S3"));
            }
            FamilyLabel::S3 { alpha, lambda, c, lambda_fit: fit_lambda(&mu, &s2) }
        }
        Some(ExpTerm { weight: alpha, .. }) => {
            evidence.push(Evidence::new("stationary_increments", incr));
            if incr > tol {
                return Ok(not_stationary(
                    format!("increments of the process are not stationary (residual {incr:.3e})"),
                    evidence,
                ));
            }
            let mu0 = m.mean(&zero)?;
            let f = |t: &TimePoint| m.mean(t).map(|v| v - mu0).unwrap_or(f64::NAN);
            let add = additive_residual(f, &grid.pairs);
            let add = if add.is_nan() { f64::INFINITY } else { add };
            evidence.push(Evidence::new("additive_drift", add));
            if add > tol {
                return Ok(not_stationary(
                    format!("drift mu(t) - mu(0) is not additive (residual {add:.3e})"),
                    evidence,
                ));
            }
            if stationary <= tol {
                evidence.push(Evidence::new("stationary_process", stationary).with_note("S1 overlap resolved to S2"));
            }
            let coeffs = (0..pair.dim()).map(|i| Ok(m.mean(&unit(pair.dim(), i))? - mu0)).collect::<Result<Vec<_>>>()?;
            FamilyLabel::S2 { alpha, coeffs, c: mu0 }
        }
        None => {
            evidence.push(Evidence::new("stationary_process", stationary));
            if stationary > tol {
                return Ok(not_stationary(
                    format!(
                        "measure is not a single exponential term and the process is not stationary (residual {stationary:.3e})"
                    ),
                    evidence,
                ));
            }
            FamilyLabel::S1Star { kernel: kernel_id(&pair.process), c: m.mean(&zero)? }
        }
    };
    let canonical = match label {
        FamilyLabel::S2 { .. } | FamilyLabel::S3 { .. } => Some(canonical_from_label(pair, &label)?),
        _ => None,
    };
    Ok(ClassificationReport { label, evidence, canonical })
}

fn process_with_drift(process: &ProcessSpec, drift: DriftSpec) -> Result<ProcessSpec> {
    let dim = process.dim();
    match process.family() {
        ProcessFamily::Fbm { kappa, .. } => ProcessSpec::fbm(dim, *kappa, drift),
        ProcessFamily::StatIncrement { gamma, .. } => ProcessSpec::stat_increment(dim, gamma.clone(), drift),
        ProcessFamily::Stationary { kernel, .. } => {
            ProcessSpec::stat_increment(dim, GammaSpec::Kernel { kernel: kernel.clone() }, drift)
        }
    }
}

fn canonical_from_label(pair: &PairSpec, label: &FamilyLabel) -> Result<PairSpec> {
    match label {
        FamilyLabel::S3 { alpha, lambda, c, .. } => {
            let weight = checked_exp(alpha.ln() + lambda * c)?;
            let measure = MeasureSpec::new(vec![ExpTerm { weight, rate: *lambda }], vec![])?;
            let process = process_with_drift(&pair.process, DriftSpec::SelfSimilar { lambda: *lambda, offset: 0.0 })?;
            PairSpec::new(measure, process, 0.0)
        }
        FamilyLabel::S2 { coeffs, .. } => {
            let drift = if coeffs.iter().all(|&v| v == 0.0) {
                DriftSpec::None
            } else {
                DriftSpec::Linear { coeffs: coeffs.clone(), offset: 0.0 }
            };
            PairSpec::new(pair.measure.clone(), process_with_drift(&pair.process, drift)?, 0.0)
        }
        other => Err(Error::WrongLabel(other.name().into())),
    }
}

/// The unique representative with `ξ(0) = 0` of an S2 or S3 pair.
pub fn canonicalize(pair: &PairSpec, grid: &ValidationGrid, tol: f64) -> Result<PairSpec> {
    let report = classify_pair(pair, grid, tol)?;
    canonical_from_label(pair, &report.label)
}

/// Outcome of [`equal_in_law_analytic`]. When `via` is `n0_shift`,
/// `direction` reads `a_to_b` for `m_a = m_b ∗ n0, ξ_b = ξ_a + N0` and
/// `b_to_a` for the mirrored statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawComparison {
    pub equal: bool,
    pub via: String,
    pub reason: String,
    pub label_a: String,
    pub label_b: String,
    pub n0: Option<GaussianMeasure1D>,
    pub direction: Option<String>,
}

fn process_residual(a: &PairSpec, b: &PairSpec, grid: &ValidationGrid, cov_offset: f64, mean_offset: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in &grid.points {
        worst = worst.max((b.mean_at(t)? - a.mean_at(t)? - mean_offset).abs());
    }
    for (s, t) in &grid.pairs {
        worst = worst.max((b.process.cov_at(s, t)? - a.process.cov_at(s, t)? - cov_offset).abs());
        worst = worst.max((b.process.incr_variance(s, t)? - a.process.incr_variance(s, t)?).abs());
    }
    Ok(worst)
}

/// Decides whether two pairs generate equal-in-law systems.
pub fn equal_in_law_analytic(a: &PairSpec, b: &PairSpec, grid: &ValidationGrid, tol: f64) -> Result<LawComparison> {
    let la = classify_pair(a, grid, tol)?;
    let lb = classify_pair(b, grid, tol)?;
    let mut out = LawComparison {
        equal: false,
        via: String::new(),
        reason: String::new(),
        label_a: la.label.name().into(),
        label_b: lb.label.name().into(),
        n0: None,
        direction: None,
    };
    let rel = tol.max(MEASURE_REL_TOL);
    if a == b {
        out.equal = true;
        out.via = "identical".into();
        out.reason = "the two specifications coincide".into();
        out.n0 = Some(GaussianMeasure1D::dirac(0.0)?);
        out.direction = Some("a_to_b".into());
        return Ok(out);
    }
    if !la.label.is_stationary() || !lb.label.is_stationary() {
        out.via = "not_stationary".into();
        out.reason = "no decision procedure outside the stationary families and the specifications differ".into();
        return Ok(out);
    }
    if la.label.class() != lb.label.class() {
        out.via = "labels".into();
        out.reason = format!("pairs from {} and {} generate different systems", out.label_a, out.label_b);
        return Ok(out);
    }
    if la.label.class() != 1 {
        let ca = la.canonical.as_ref().expect("S2/S3 reports carry a canonical pair");
        let cb = lb.canonical.as_ref().expect("S2/S3 reports carry a canonical pair");
        out.via = "canonical".into();
        if !ca.measure.approx_eq(&cb.measure, rel) {
            out.reason = "canonical measures differ".into();
            return Ok(out);
        }
        let r = process_residual(ca, cb, grid, 0.0, 0.0)?;
        out.equal = r <= tol;
        out.reason = format!("canonical processes agree up to {r:.3e}");
        return Ok(out);
    }
    let zero = TimePoint::zero(a.dim());
    let (va, vb) = (a.variance_at(&zero)?, b.variance_at(&zero)?);
    let (prime, dprime, direction) = if va <= vb { (a, b, "a_to_b") } else { (b, a, "b_to_a") };
    let mean0 = dprime.mean_at(&zero)? - prime.mean_at(&zero)?;
    let var0 = (vb - va).abs();
    let n0 = GaussianMeasure1D::normal(mean0, var0)?;
    out.via = "n0_shift".into();
    out.n0 = Some(n0);
    out.direction = Some(direction.into());
    if !dprime.measure.convolve_with_gaussian(&n0)?.approx_eq(&prime.measure, rel) {
        out.reason = format!("measure relation m' = m'' * N({mean0}, {var0}) fails");
        return Ok(out);
    }
    let r = process_residual(prime, dprime, grid, var0, mean0)?;
    out.equal = r <= tol;
    out.reason = format!("process relation xi'' = xi' + N0 holds up to {r:.3e}");
    Ok(out)
}
