//! Closed-form finite-dimensional intensities of a Gaussian system for one
//! and two time points.
//!
//! At one time the intensity is `𝔪_t = 𝔪 ∗ 𝔫_t`, which stays inside the
//! measure DSL. At two times each exponential term `w·e_κ` contributes
//! `w ∫ e^{-κz} 𝔩^{(κ)}(B − z) dz`, where the layer `𝔩^{(κ)}` lives on the
//! line `x₁ = 0` and is a scaled Gaussian in `x₂`.

use serde::{Deserialize, Serialize};

use crate::error::{checked_exp, Error, Result};
use crate::interval::Interval;
use crate::measures::{ExpTerm, GaussianMeasure1D, MeasureSpec};
use crate::normal;
use crate::processes::{GridLaw, ProcessSpec, TimePoint, ValidationGrid};
use crate::quadrature;

/// Relative tolerance of the z-integral in [`bivariate_intensity`].
pub const BIVARIATE_REL_TOL: f64 = 1e-9;

/// A driving pair `(𝔪, ξ)` with `ξ(t) = ξ₀(t) + initial_shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct PairSpec {
    pub measure: MeasureSpec,
    pub process: ProcessSpec,
    pub initial_shift: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    measure: MeasureSpec,
    process: ProcessSpec,
    #[serde(default)]
    initial_shift: f64,
}

impl TryFrom<RawPair> for PairSpec {
    type Error = Error;
    fn try_from(r: RawPair) -> Result<Self> {
        PairSpec::new(r.measure, r.process, r.initial_shift)
    }
}

impl From<PairSpec> for RawPair {
    fn from(p: PairSpec) -> Self {
        RawPair { measure: p.measure, process: p.process, initial_shift: p.initial_shift }
    }
}

impl PairSpec {
    /// Validates integrability of the measure and positive semidefiniteness
    /// of the process on the default lattice.
    pub fn new(measure: MeasureSpec, process: ProcessSpec, initial_shift: f64) -> Result<Self> {
        if !initial_shift.is_finite() {
            return Err(Error::InvalidArgument("initial shift must be finite".into()));
        }
        if !measure.check_integrability() {
            return Err(Error::InvalidMeasure("measure fails the Gaussian integrability condition".into()));
        }
        process.grid_law(&ValidationGrid::default_for(process.dim()).points)?;
        Ok(Self { measure, process, initial_shift })
    }

    pub fn dim(&self) -> usize {
        self.process.dim()
    }

    pub fn mean_at(&self, t: &TimePoint) -> Result<f64> {
        Ok(self.process.mean_at(t)? + self.initial_shift)
    }

    pub fn variance_at(&self, t: &TimePoint) -> Result<f64> {
        self.process.variance_at(t)
    }

    /// Law of `(ξ(t₁), …, ξ(tₙ))` including the initial shift.
    pub fn grid_law(&self, times: &[TimePoint]) -> Result<GridLaw> {
        Ok(self.process.grid_law(times)?.shifted(self.initial_shift))
    }

    /// The one-dimensional intensity `𝔪_t = 𝔪 ∗ 𝔑(μ(t), σ²(t))`.
    pub fn onedim_measure(&self, t: &TimePoint) -> Result<MeasureSpec> {
        let n = GaussianMeasure1D::normal(self.mean_at(t)?, self.variance_at(t)?)?;
        self.measure.convolve_with_gaussian(&n)
    }
}

/// Density of `𝔪_t` at `x`.
pub fn onedim_density(pair: &PairSpec, t: &TimePoint, x: f64) -> Result<f64> {
    pair.onedim_measure(t)?.density(x)
}

/// `𝔪_t([a, b])`: the expected number of particles with `V(t) ∈ [a, b]`.
pub fn onedim_mass(pair: &PairSpec, t: &TimePoint, b: Interval) -> Result<f64> {
    pair.onedim_measure(t)?.mass_on_interval(b.lo, b.hi)
}

fn two_time_moments(law2: &GridLaw) -> Result<(f64, f64, f64, f64, f64)> {
    if law2.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: law2.len() });
    }
    let (m1, m2) = (law2.mean[0], law2.mean[1]);
    let (s1, s2, r) = (law2.cov[0][0], law2.cov[1][1], law2.cov[0][1]);
    let gamma = (s1 + s2 - 2.0 * r).max(0.0);
    Ok((m1, m2, s1, s2, gamma))
}

/// Laplace transform `ψ^{(κ)}(u)` of the diagonal layer of a bivariate
/// Gaussian law.
pub fn psi_kappa(law2: &GridLaw, kappa: f64, u: f64) -> Result<f64> {
    let (m1, m2, s1, s2, gamma) = two_time_moments(law2)?;
    let a1 = m1 + 0.5 * kappa * s1;
    let a2 = m2 + 0.5 * kappa * s2;
    checked_exp((kappa - u) * a1 + u * a2 + 0.5 * u * (u - kappa) * gamma)
}

/// `total_mass · δ_{x₁=0} ⊗ 𝔑(profile_mean, profile_variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalGaussianLayer {
    pub kappa: f64,
    pub total_mass: f64,
    pub profile_mean: f64,
    pub profile_variance: f64,
}

impl DiagonalGaussianLayer {
    pub fn laplace(&self, u: f64) -> Result<f64> {
        checked_exp(self.total_mass.ln() + self.profile_mean * u + 0.5 * self.profile_variance * u * u)
    }

    /// Layer mass of `{0} × [lo, hi]`.
    pub fn mass_on(&self, lo: f64, hi: f64) -> f64 {
        self.total_mass * normal::interval_prob(self.profile_mean, self.profile_variance, lo, hi)
    }
}

/// The unique diagonal layer whose Laplace transform is `ψ^{(κ)}`.
pub fn decompose_layer(law2: &GridLaw, kappa: f64) -> Result<DiagonalGaussianLayer> {
    let (m1, m2, s1, s2, gamma) = two_time_moments(law2)?;
    let a1 = m1 + 0.5 * kappa * s1;
    let a2 = m2 + 0.5 * kappa * s2;
    let layer = DiagonalGaussianLayer {
        kappa,
        total_mass: checked_exp(kappa * a1)?,
        profile_mean: a2 - a1 - 0.5 * kappa * gamma,
        profile_variance: gamma,
    };
    for u in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        if let (Ok(lhs), Ok(rhs)) = (layer.laplace(u), psi_kappa(law2, kappa, u)) {
            if (lhs - rhs).abs() > 1e-10 * rhs.abs() {
                return Err(Error::Unsupported(format!("layer self-check failed at u={u}: {lhs} vs {rhs}")));
            }
        }
    }
    Ok(layer)
}

fn layer_term(term: &ExpTerm, layer: &DiagonalGaussianLayer, x1: Interval, x2: Interval) -> Result<f64> {
    let scaled = ExpTerm { weight: term.weight * layer.total_mass, rate: term.rate };
    let (pm, pv) = (layer.profile_mean, layer.profile_variance);
    if pv <= 0.0 {
        // degenerate layer: the x₂ condition is an indicator in z
        let lo = x1.lo.max(x2.lo - pm);
        let hi = x1.hi.min(x2.hi - pm);
        if lo > hi {
            return Ok(0.0);
        }
        return MeasureSpec::new(vec![scaled], vec![])?.mass_on_interval(lo, hi);
    }
    let log_w = scaled.weight.ln();
    let l = term.rate;
    // reject overflow up front; inside the integral exponents stay below this
    checked_exp(log_w - l * x1.lo)?;
    checked_exp(log_w - l * x1.hi)?;
    let scale = MeasureSpec::new(vec![scaled], vec![])?.mass_on_interval(x1.lo, x1.hi)?;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let f = |z: f64| (log_w - l * z).exp() * normal::interval_prob(pm, pv, x2.lo - z, x2.hi - z);
    quadrature::integrate_with_breaks(f, x1.lo, x1.hi, &[x2.lo - pm, x2.hi - pm], BIVARIATE_REL_TOL, 1e-14 * scale)
}

/// `𝔪_{t₁,t₂}([x1l, x1u] × [x2l, x2u])` for exponential-mixture measures.
pub fn bivariate_intensity(pair: &PairSpec, t1: &TimePoint, t2: &TimePoint, rect: [Interval; 2]) -> Result<f64> {
    if !pair.measure.is_exp_mixture() {
        return Err(Error::Unsupported(
            "two-time closed form needs an exponential-mixture measure; use Monte Carlo".into(),
        ));
    }
    if !(rect[0].is_bounded() && rect[1].is_bounded()) {
        return Err(Error::InvalidArgument("rectangle must be bounded".into()));
    }
    let law2 = pair.grid_law(&[t1.clone(), t2.clone()])?;
    let mut total = 0.0;
    for term in pair.measure.exp_terms() {
        let layer = decompose_layer(&law2, term.rate)?;
        total += layer_term(term, &layer, rect[0], rect[1])?;
    }
    Ok(total)
}

/// Closed-form intensity of a box at the given times when one exists:
/// any measure at one time, exponential mixtures at two times. `None`
/// otherwise.
pub fn analytic_intensity(pair: &PairSpec, times: &[TimePoint], b: &[Interval]) -> Result<Option<f64>> {
    if times.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: b.len() });
    }
    match times.len() {
        1 => onedim_mass(pair, &times[0], b[0]).map(Some),
        2 if pair.measure.is_exp_mixture() && b.iter().all(Interval::is_bounded) => {
            bivariate_intensity(pair, &times[0], &times[1], [b[0], b[1]]).map(Some)
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::iv;
    use crate::processes::{DriftSpec, GammaSpec};

    fn t(x: f64) -> TimePoint {
        TimePoint::from(x)
    }

    fn brown_resnick() -> PairSpec {
        PairSpec::new(
            MeasureSpec::exponential(1.0, 1.0).unwrap(),
            ProcessSpec::fbm(1, 1.0, DriftSpec::SelfSimilar { lambda: 1.0, offset: 0.0 }).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn brown_resnick_onedim_density_is_time_free() {
        let p = brown_resnick();
        for time in [0.0, 0.5, 1.0, 2.0, 7.5] {
            for x in [-3.0, 0.0, 1.7] {
                let d = onedim_density(&p, &t(time), x).unwrap();
                assert!((d - (-x as f64).exp()).abs() <= 1e-12 * d);
            }
        }
    }

    #[test]
    fn lebesgue_is_invariant() {
        let p = PairSpec::new(
            MeasureSpec::lebesgue(1.0).unwrap(),
            ProcessSpec::stat_increment(1, GammaSpec::Bm { scale: 3.0 }, DriftSpec::Linear { coeffs: vec![2.0], offset: 1.0 })
                .unwrap(),
            0.5,
        )
        .unwrap();
        for x in [-4.0, 0.0, 2.5] {
            assert!((onedim_density(&p, &t(1.3), x).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn psi_special_points() {
        let law = brown_resnick().grid_law(&[t(0.0), t(1.0)]).unwrap();
        let (m1, m2, s1, s2) = (law.mean[0], law.mean[1], law.cov[0][0], law.cov[1][1]);
        for kappa in [-1.0, 0.5, 1.0, 2.0] {
            let at_kappa = psi_kappa(&law, kappa, kappa).unwrap();
            assert!((at_kappa - (kappa * (m2 + kappa * s2 / 2.0)).exp()).abs() < 1e-12 * at_kappa);
            let at_zero = psi_kappa(&law, kappa, 0.0).unwrap();
            assert!((at_zero - (kappa * (m1 + kappa * s1 / 2.0)).exp()).abs() < 1e-12 * at_zero);
        }
        let v = psi_kappa(&law, 1.0, 0.5).unwrap();
        assert!((v - (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn psi_rejects_wrong_arity() {
        let law = brown_resnick().grid_law(&[t(0.0)]).unwrap();
        assert!(psi_kappa(&law, 1.0, 0.0).is_err());
    }

    #[test]
    fn layer_examples() {
        let law = brown_resnick().grid_law(&[t(0.0), t(1.0)]).unwrap();
        let layer = decompose_layer(&law, 1.0).unwrap();
        assert!((layer.total_mass - 1.0).abs() < 1e-15);
        assert!((layer.profile_mean + 1.0).abs() < 1e-15);
        assert!((layer.profile_variance - 2.0).abs() < 1e-15);
        assert!((layer.laplace(0.5).unwrap() - (-0.25f64).exp()).abs() < 1e-14);

        let zero = decompose_layer(&law, 0.0).unwrap();
        assert_eq!(zero.total_mass, 1.0);
        assert_eq!(zero.profile_mean, law.mean[1] - law.mean[0]);
        assert_eq!(zero.profile_variance, 2.0);

        let same = brown_resnick().grid_law(&[t(0.7), t(0.7)]).unwrap();
        assert_eq!(decompose_layer(&same, 1.0).unwrap().profile_variance, 0.0);
    }

    #[test]
    fn bivariate_on_diagonal_reduces_to_onedim() {
        let p = brown_resnick();
        let v = bivariate_intensity(&p, &t(0.0), &t(0.0), [iv(0.0, 1.0), iv(0.0, 1.0)]).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        for time in [0.5, 1.0] {
            let wide = bivariate_intensity(&p, &t(time), &t(time), [iv(-1.0, 2.0), iv(-1e3, 1e3)]).unwrap();
            let m = onedim_mass(&p, &t(time), iv(-1.0, 2.0)).unwrap();
            assert!((wide - m).abs() < 1e-7 * m);
        }
    }

    #[test]
    fn lebesgue_diagonal_shift_invariance() {
        let p = PairSpec::new(
            MeasureSpec::lebesgue(2.0).unwrap(),
            ProcessSpec::fbm(1, 0.7, DriftSpec::None).unwrap(),
            0.0,
        )
        .unwrap();
        let base = bivariate_intensity(&p, &t(0.3), &t(1.4), [iv(0.0, 1.0), iv(-1.0, 1.0)]).unwrap();
        for s in [-2.5, 0.4, 3.0] {
            let moved = bivariate_intensity(&p, &t(0.3), &t(1.4), [iv(s, 1.0 + s), iv(s - 1.0, 1.0 + s)]).unwrap();
            assert!((moved - base).abs() < 1e-9 * base);
        }
    }

    #[test]
    fn bivariate_rejects_gaussian_measures() {
        let p = PairSpec::new(
            MeasureSpec::gaussian(GaussianMeasure1D::normal(0.0, 1.0).unwrap()),
            ProcessSpec::fbm(1, 1.0, DriftSpec::None).unwrap(),
            0.0,
        )
        .unwrap();
        assert!(matches!(
            bivariate_intensity(&p, &t(0.0), &t(1.0), [iv(0.0, 1.0), iv(0.0, 1.0)]),
            Err(Error::Unsupported(_))
        ));
        assert_eq!(analytic_intensity(&p, &[t(0.0), t(1.0)], &[iv(0.0, 1.0), iv(0.0, 1.0)]).unwrap(), None);
    }

    #[test]
    fn pair_json_round_trip() {
        let p = brown_resnick();
        let s = serde_json::to_string(&p).unwrap();
        let back: PairSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PairSpec>(&s.replace("\"initial_shift\"", "\"shift\"")).is_err());
    }
}
