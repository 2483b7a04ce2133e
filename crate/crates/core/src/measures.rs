//! Intensity measures on the real line.
//!
//! A [`MeasureSpec`] is a finite sum of exponential densities `w·e^{-λx}`
//! (rate 0 is Lebesgue measure) and Gaussian measures (variance 0 is a
//! scaled Dirac mass). The family is closed under convolution with Gaussian
//! laws, so every identity used downstream is evaluated symbolically.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{checked_exp, Error, Result};
use crate::normal;

/// Absolute width at which window inversion by bisection stops.
pub const INVERSION_TOL: f64 = 1e-12;
/// Relative tolerance used when comparing canonical measures.
pub const MEASURE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian", into = "RawGaussian")]
pub struct GaussianMeasure1D {
    pub mean: f64,
    pub variance: f64,
    pub total_mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGaussian {
    mean: f64,
    var: f64,
    #[serde(default = "unit_mass")]
    mass: f64,
}

fn unit_mass() -> f64 {
    1.0
}

impl TryFrom<RawGaussian> for GaussianMeasure1D {
    type Error = Error;
    fn try_from(raw: RawGaussian) -> Result<Self> {
        GaussianMeasure1D::new(raw.mean, raw.var, raw.mass)
    }
}

impl From<GaussianMeasure1D> for RawGaussian {
    fn from(n: GaussianMeasure1D) -> Self {
        RawGaussian { mean: n.mean, var: n.variance, mass: n.total_mass }
    }
}

impl GaussianMeasure1D {
    pub fn new(mean: f64, variance: f64, total_mass: f64) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() || !total_mass.is_finite() {
            return Err(Error::InvalidMeasure("gaussian parameters must be finite".into()));
        }
        if variance < 0.0 {
            return Err(Error::InvalidMeasure(format!("negative variance {variance}")));
        }
        if total_mass <= 0.0 {
            return Err(Error::InvalidMeasure(format!("total mass must be positive, got {total_mass}")));
        }
        Ok(Self { mean, variance, total_mass })
    }

    /// Probability law 𝔑(mean, variance).
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        Self::new(mean, variance, 1.0)
    }

    pub fn dirac(at: f64) -> Result<Self> {
        Self::new(at, 0.0, 1.0)
    }

    pub fn is_dirac(&self) -> bool {
        self.variance == 0.0
    }

    /// ∫ e^{yx} n(dx) = mass · exp(mean·y + variance·y²/2).
    pub fn laplace(&self, y: f64) -> Result<f64> {
        checked_exp(self.total_mass.ln() + self.mean * y + 0.5 * self.variance * y * y)
    }

    pub fn convolve(&self, other: &GaussianMeasure1D) -> GaussianMeasure1D {
        GaussianMeasure1D {
            mean: self.mean + other.mean,
            variance: self.variance + other.variance,
            total_mass: self.total_mass * other.total_mass,
        }
    }

    fn mass_on(&self, a: f64, b: f64) -> f64 {
        self.total_mass * normal::interval_prob(self.mean, self.variance, a, b)
    }
}

/// Laplace transform of a (scaled) Gaussian measure at `y`.
pub fn laplace_gaussian(n: &GaussianMeasure1D, y: f64) -> Result<f64> {
    n.laplace(y)
}

/// The term `weight · e^{-rate·x} dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

impl ExpTerm {
    fn mass_on(&self, a: f64, b: f64) -> Result<f64> {
        let (w, l) = (self.weight, self.rate);
        if a == b {
            return Ok(0.0);
        }
        if l == 0.0 {
            let m = w * (b - a);
            if !m.is_finite() {
                return Err(Error::InvalidArgument(format!("Lebesgue mass of [{a}, {b}] is infinite")));
            }
            return Ok(m);
        }
        // anchor at the endpoint where the density is largest
        if l > 0.0 {
            Ok(checked_exp(w.ln() - l * a)? * -(-l * (b - a)).exp_m1() / l)
        } else {
            Ok(checked_exp(w.ln() - l * b)? * (l * (b - a)).exp_m1() / l)
        }
    }

    fn density(&self, x: f64) -> Result<f64> {
        checked_exp(self.weight.ln() - self.rate * x)
    }

    /// Closed-form inverse of `x ↦ mass([a, x]) / mass([a, b])`.
    fn invert(&self, a: f64, b: f64, u: f64) -> f64 {
        let l = self.rate;
        let x = if l == 0.0 {
            a + u * (b - a)
        } else if l > 0.0 {
            a - (u * (-l * (b - a)).exp_m1()).ln_1p() / l
        } else {
            b - ((1.0 - u) * (l * (b - a)).exp_m1()).ln_1p() / l
        };
        x.clamp(a, b)
    }
}

/// Intensity measure `Σ wⱼ·e_{λⱼ} + Σ Gaussian components`, kept in
/// canonical form: exponential rates strictly increasing, Gaussian
/// components sorted by (mean, variance) with duplicates merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct MeasureSpec {
    exp: Vec<ExpTerm>,
    gauss: Vec<GaussianMeasure1D>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(default)]
    exp: Vec<ExpTerm>,
    #[serde(default)]
    gauss: Vec<GaussianMeasure1D>,
}

impl TryFrom<RawMeasure> for MeasureSpec {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        MeasureSpec::new(raw.exp, raw.gauss)
    }
}

impl From<MeasureSpec> for RawMeasure {
    fn from(m: MeasureSpec) -> Self {
        RawMeasure { exp: m.exp, gauss: m.gauss }
    }
}

impl MeasureSpec {
    pub fn new(exp: Vec<ExpTerm>, gauss: Vec<GaussianMeasure1D>) -> Result<Self> {
        if exp.is_empty() && gauss.is_empty() {
            return Err(Error::InvalidMeasure("the zero measure is not a valid intensity".into()));
        }
        for t in &exp {
            if !(t.weight.is_finite() && t.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!("exponential weight must be positive, got {}", t.weight)));
            }
            if !t.rate.is_finite() {
                return Err(Error::InvalidMeasure(format!("exponential rate must be finite, got {}", t.rate)));
            }
        }
        for g in &gauss {
            GaussianMeasure1D::new(g.mean, g.variance, g.total_mass)?;
        }
        Ok(Self::canonical(exp, gauss))
    }

    fn canonical(mut exp: Vec<ExpTerm>, mut gauss: Vec<GaussianMeasure1D>) -> Self {
        exp.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        let mut merged: Vec<ExpTerm> = Vec::with_capacity(exp.len());
        for t in exp {
            match merged.last_mut() {
                Some(last) if last.rate == t.rate => last.weight += t.weight,
                _ => merged.push(t),
            }
        }
        gauss.sort_by(|a, b| a.mean.total_cmp(&b.mean).then(a.variance.total_cmp(&b.variance)));
        let mut gmerged: Vec<GaussianMeasure1D> = Vec::with_capacity(gauss.len());
        for g in gauss {
            match gmerged.last_mut() {
                Some(last) if last.mean == g.mean && last.variance == g.variance => last.total_mass += g.total_mass,
                _ => gmerged.push(g),
            }
        }
        Self { exp: merged, gauss: gmerged }
    }

    /// `weight · e_rate`.
    pub fn exponential(weight: f64, rate: f64) -> Result<Self> {
        Self::new(vec![ExpTerm { weight, rate }], vec![])
    }

    /// `weight` times Lebesgue measure.
    pub fn lebesgue(weight: f64) -> Result<Self> {
        Self::exponential(weight, 0.0)
    }

    pub fn gaussian(n: GaussianMeasure1D) -> Self {
        Self { exp: vec![], gauss: vec![n] }
    }

    pub fn exp_terms(&self) -> &[ExpTerm] {
        &self.exp
    }

    pub fn gauss_terms(&self) -> &[GaussianMeasure1D] {
        &self.gauss
    }

    pub fn is_exp_mixture(&self) -> bool {
        self.gauss.is_empty()
    }

    /// The single exponential term, when the measure is exactly `α·e_λ`.
    pub fn single_exp(&self) -> Option<ExpTerm> {
        match (self.exp.as_slice(), self.gauss.is_empty()) {
            ([t], true) => Some(*t),
            _ => None,
        }
    }

    pub fn is_lebesgue(&self) -> bool {
        matches!(self.single_exp(), Some(t) if t.rate == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.exp.iter().map(|t| ExpTerm { weight: t.weight * factor, rate: t.rate }).collect(),
            self.gauss.iter().map(|g| GaussianMeasure1D { total_mass: g.total_mass * factor, ..*g }).collect(),
        )
    }

    /// `log ∫ e^{-εx²} m(dx)`, evaluated in closed form per term.
    pub fn envelope_log_integral(&self, eps: f64) -> f64 {
        let mut logs: Vec<f64> = self
            .exp
            .iter()
            .map(|t| t.weight.ln() + 0.5 * (PI / eps).ln() + t.rate * t.rate / (4.0 * eps))
            .collect();
        logs.extend(self.gauss.iter().map(|g| {
            let s = 1.0 + 2.0 * eps * g.variance;
            g.total_mass.ln() - 0.5 * s.ln() - eps * g.mean * g.mean / s
        }));
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return top;
        }
        top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
    }

    /// Checks `∫ e^{-εx²} m(dx) < ∞` for every ε > 0.
    ///
    /// Each term's integral is a closed-form expression in ε (a Gaussian
    /// integral against an exponential or Gaussian density) that is finite for
    /// all ε > 0 exactly when the term's parameters are finite. The probe
    /// values of ε cover the small-ε regime where exponential terms grow.
    pub fn check_integrability(&self) -> bool {
        let params_finite = self.exp.iter().all(|t| t.weight.is_finite() && t.rate.is_finite())
            && self.gauss.iter().all(|g| g.mean.is_finite() && g.variance.is_finite() && g.total_mass.is_finite());
        params_finite
            && [1e-3, 1e-1, 1.0, 10.0, 1e3]
                .iter()
                .all(|&eps| self.envelope_log_integral(eps) < f64::INFINITY)
    }

    /// `m ∗ n`. Exponential terms pick up the factor
    /// `mass · exp(λμ₀ + λ²σ₀²/2)`; Gaussian terms add means and variances.
    pub fn convolve_with_gaussian(&self, n: &GaussianMeasure1D) -> Result<Self> {
        let mut exp = Vec::with_capacity(self.exp.len());
        for t in &self.exp {
            let l = t.rate;
            let w = checked_exp(t.weight.ln() + n.total_mass.ln() + l * n.mean + 0.5 * l * l * n.variance)?;
            exp.push(ExpTerm { weight: w, rate: l });
        }
        let gauss = self.gauss.iter().map(|g| g.convolve(n)).collect();
        Ok(Self::canonical(exp, gauss))
    }

    /// `m ∗ δ_c`, the image of `m` under `x ↦ x + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        self.convolve_with_gaussian(&GaussianMeasure1D { mean: c, variance: 0.0, total_mass: 1.0 })
    }

    /// Density at `x`. Fails when the measure carries an atom.
    pub fn density(&self, x: f64) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.exp {
            total += t.density(x)?;
        }
        for g in &self.gauss {
            if g.is_dirac() {
                return Err(Error::Unsupported(format!("measure has an atom at {}; no density", g.mean)));
            }
            total += g.total_mass * normal::density(g.mean, g.variance, x);
        }
        Ok(total)
    }

    /// Exact `m([a, b])`.
    pub fn mass_on_interval(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(Error::InvalidArgument(format!("mass_on_interval needs a ≤ b, got [{a}, {b}]")));
        }
        let mut total = 0.0;
        for t in &self.exp {
            total += t.mass_on(a, b)?;
        }
        total += self.gauss.iter().map(|g| g.mass_on(a, b)).sum::<f64>();
        Ok(total)
    }

    /// Returns `x ∈ [a, b]` with `m([a, x]) = u · m([a, b])`.
    pub fn inverse_cdf_on_window(&self, a: f64, b: f64, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidArgument(format!("quantile level {u} outside [0, 1]")));
        }
        let total = self.mass_on_interval(a, b)?;
        if !(total > 0.0) {
            return Err(Error::InvalidArgument(format!("measure has no mass on [{a}, {b}]")));
        }
        if let Some(t) = self.single_exp() {
            return Ok(t.invert(a, b, u));
        }
        if u == 0.0 {
            return Ok(a);
        }
        if u == 1.0 {
            return Ok(b);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Unsupported("bisection inversion needs a bounded window".into()));
        }
        let target = u * total;
        let (mut lo, mut hi) = (a, b);
        for _ in 0..256 {
            if hi - lo <= INVERSION_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.mass_on_interval(a, mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Term-by-term comparison of canonical forms with relative tolerance.
    pub fn approx_eq(&self, other: &MeasureSpec, rel_tol: f64) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0);
        let rel = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs());
        self.exp.len() == other.exp.len()
            && self.gauss.len() == other.gauss.len()
            && self.exp.iter().zip(&other.exp).all(|(s, o)| close(s.rate, o.rate) && rel(s.weight, o.weight))
            && self.gauss.iter().zip(&other.gauss).all(|(s, o)| {
                close(s.mean, o.mean) && close(s.variance, o.variance) && rel(s.total_mass, o.total_mass)
            })
    }
}

/// Free-function form of [`MeasureSpec::check_integrability`].
pub fn check_integrability(m: &MeasureSpec) -> bool {
    m.check_integrability()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn e(w: f64, l: f64) -> MeasureSpec {
        MeasureSpec::exponential(w, l).unwrap()
    }

    #[test]
    fn zero_measure_rejected() {
        assert!(MeasureSpec::new(vec![], vec![]).is_err());
        assert!(MeasureSpec::exponential(-1.0, 1.0).is_err());
        assert!(GaussianMeasure1D::new(0.0, -1.0, 1.0).is_err());
        assert!(GaussianMeasure1D::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn canonical_form_merges_rates() {
        let m = MeasureSpec::new(
            vec![ExpTerm { weight: 1.0, rate: 2.0 }, ExpTerm { weight: 0.5, rate: 0.0 }, ExpTerm { weight: 2.0, rate: 2.0 }],
            vec![],
        )
        .unwrap();
        assert_eq!(m.exp_terms(), &[ExpTerm { weight: 0.5, rate: 0.0 }, ExpTerm { weight: 3.0, rate: 2.0 }]);
    }

    #[test]
    fn integrability() {
        assert!(e(1.0, 1.0).check_integrability());
        assert!(MeasureSpec::lebesgue(1.0).unwrap().check_integrability());
        assert!(MeasureSpec::gaussian(GaussianMeasure1D::new(0.0, 1.0, 2.0).unwrap()).check_integrability());
        // ∫ e^{-x²} dx = √π
        let leb = MeasureSpec::lebesgue(1.0).unwrap();
        assert!((leb.envelope_log_integral(1.0) - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn laplace_examples() {
        let std = GaussianMeasure1D::normal(0.0, 1.0).unwrap();
        assert!((laplace_gaussian(&std, 1.0).unwrap() - 1.648_721_270_700_128_1).abs() < 1e-12);
        let d = GaussianMeasure1D::dirac(2.0).unwrap();
        assert!((laplace_gaussian(&d, 3.0).unwrap() - 6f64.exp()).abs() < 1e-9);
        // quadrature oracle for N(1, 2) at y = -1
        let n = GaussianMeasure1D::normal(1.0, 2.0).unwrap();
        let oracle = integrate(|x| (-x).exp() * normal::density(1.0, 2.0, x), -40.0, 40.0, 1e-14, 0.0).unwrap();
        assert!((oracle - 1.0).abs() < 1e-10);
        assert!((laplace_gaussian(&n, -1.0).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn laplace_overflow_is_an_error() {
        let n = GaussianMeasure1D::normal(0.0, 10.0).unwrap();
        assert!(matches!(n.laplace(20.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn convolution_matches_grid_oracle() {
        let m = e(1.0, 1.0);
        let n = GaussianMeasure1D::normal(0.0, 2.0).unwrap();
        let c = m.convolve_with_gaussian(&n).unwrap();
        let t = c.single_exp().unwrap();
        assert!((t.weight - std::f64::consts::E).abs() < 1e-12);
        for i in 0..21 {
            let x = -5.0 + 0.5 * i as f64;
            let oracle =
                integrate(|y| (-(x - y)).exp() * normal::density(0.0, 2.0, y), -40.0, 40.0, 1e-13, 0.0).unwrap();
            let got = c.density(x).unwrap();
            assert!((got - oracle).abs() <= 1e-8 * oracle.max(1.0), "x={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn convolution_with_dirac_zero_is_identity() {
        let m = MeasureSpec::new(
            vec![ExpTerm { weight: 1.5, rate: -0.5 }, ExpTerm { weight: 2.0, rate: 0.0 }],
            vec![GaussianMeasure1D::new(1.0, 2.0, 3.0).unwrap()],
        )
        .unwrap();
        let id = m.convolve_with_gaussian(&GaussianMeasure1D::dirac(0.0).unwrap()).unwrap();
        assert_eq!(m, id);
    }

    #[test]
    fn deconvolution_recovers_measure() {
        // m ∗ 𝔑(μ₀,σ₀²) = α e_λ + β e_0  ⇒  m = α e^{-λ²σ₀²/2} e^{-λμ₀} e_λ + β e_0
        let (alpha, beta, lambda, mu0, s0): (f64, f64, f64, f64, f64) = (2.0, 0.7, 1.3, -0.4, 0.9);
        let m = MeasureSpec::new(
            vec![
                ExpTerm { weight: alpha * (-lambda * lambda * s0 / 2.0 - lambda * mu0).exp(), rate: lambda },
                ExpTerm { weight: beta, rate: 0.0 },
            ],
            vec![],
        )
        .unwrap();
        let image = m.convolve_with_gaussian(&GaussianMeasure1D::normal(mu0, s0).unwrap()).unwrap();
        let target =
            MeasureSpec::new(vec![ExpTerm { weight: alpha, rate: lambda }, ExpTerm { weight: beta, rate: 0.0 }], vec![])
                .unwrap();
        assert!(image.approx_eq(&target, 1e-12));
    }

    #[test]
    fn mass_examples() {
        assert!((e(1.0, 1.0).mass_on_interval(0.0, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((MeasureSpec::lebesgue(1.0).unwrap().mass_on_interval(-3.0, 4.0).unwrap() - 7.0).abs() < 1e-15);
        let oracle = integrate(|x| (-x).exp(), 0.0, 10.0, 1e-15, 0.0).unwrap();
        let got = e(1.0, 1.0).mass_on_interval(0.0, 10.0).unwrap();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 0.999_954_600_070_237_5).abs() < 1e-15);
        // negative rate, half-line
        assert!((e(1.0, -2.0).mass_on_interval(f64::NEG_INFINITY, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(e(1.0, 1.0).mass_on_interval(f64::NEG_INFINITY, 0.0).is_err());
        assert!(e(1.0, 1.0).mass_on_interval(1.0, 0.0).is_err());
    }

    #[test]
    fn atoms_on_degenerate_interval() {
        let d = MeasureSpec::gaussian(GaussianMeasure1D::new(0.5, 0.0, 2.0).unwrap());
        assert_eq!(d.mass_on_interval(0.5, 0.5).unwrap(), 2.0);
        assert_eq!(e(1.0, 1.0).mass_on_interval(0.5, 0.5).unwrap(), 0.0);
        assert!(d.density(0.0).is_err());
    }

    #[test]
    fn inversion_examples() {
        let leb = MeasureSpec::lebesgue(1.0).unwrap();
        assert!((leb.inverse_cdf_on_window(0.0, 1.0, 0.25).unwrap() - 0.25).abs() < 1e-15);
        let x = e(1.0, 1.0).inverse_cdf_on_window(0.0, 50.0, 0.5).unwrap();
        let exact = -(1.0 - 0.5 * (1.0 - (-50f64).exp())).ln();
        assert!((x - exact).abs() < 1e-14);
        assert!((x - 2f64.ln()).abs() < 1e-15);
        let mix =
            MeasureSpec::new(vec![ExpTerm { weight: 1.0, rate: 0.0 }, ExpTerm { weight: 1.0, rate: 1.0 }], vec![]).unwrap();
        assert_eq!(mix.inverse_cdf_on_window(0.0, 1.0, 0.0).unwrap(), 0.0);
        assert!(mix.inverse_cdf_on_window(0.0, 1.0, 1.5).is_err());
        assert!(mix.inverse_cdf_on_window(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn inversion_on_negative_rate_and_wide_window() {
        let m = e(1.0, -1.0);
        let x = m.inverse_cdf_on_window(-1000.0, 0.0, 0.5).unwrap();
        let half = m.mass_on_interval(-1000.0, x).unwrap() / m.mass_on_interval(-1000.0, 0.0).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inversion_through_atom() {
        let m = MeasureSpec::new(
            vec![ExpTerm { weight: 1.0, rate: 0.0 }],
            vec![GaussianMeasure1D::new(0.5, 0.0, 1.0).unwrap()],
        )
        .unwrap();
        // CDF on [0,1]: x below 0.5, then jumps by 1; total 2
        let x = m.inverse_cdf_on_window(0.0, 1.0, 0.5).unwrap();
        assert!((x - 0.5).abs() < 1e-11);
    }

    #[test]
    fn json_round_trip_uses_fixed_field_names() {
        let m = MeasureSpec::new(
            vec![ExpTerm { weight: 2.0, rate: 1.0 }],
            vec![GaussianMeasure1D::new(0.0, 1.5, 1.0).unwrap()],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"exp":[{"weight":2.0,"rate":1.0}],"gauss":[{"mean":0.0,"var":1.5,"mass":1.0}]}"#);
        let back: MeasureSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"exp":[],"gauss":[]}"#).is_err());
        assert!(serde_json::from_str::<MeasureSpec>(r#"{"exp":[{"weight":1,"rate":0}],"extra":1}"#).is_err());
        let g: MeasureSpec = serde_json::from_str(r#"{"gauss":[{"mean":0,"var":1}]}"#).unwrap();
        assert_eq!(g.gauss_terms()[0].total_mass, 1.0);
    }
}
