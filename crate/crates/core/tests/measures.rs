mod common;

use common::{integrate_1d, phi};
use gaussys_core::measures::{ExpTerm, GaussianMeasure1D, MeasureSpec};
use proptest::prelude::*;

fn gauss(mean: f64, var: f64) -> GaussianMeasure1D {
    GaussianMeasure1D::normal(mean, var).unwrap()
}

fn exp_mixture() -> impl Strategy<Value = MeasureSpec> {
    prop::collection::vec((0.1f64..3.0, -2.0f64..2.0), 1..4).prop_map(|terms| {
        MeasureSpec::new(terms.into_iter().map(|(weight, rate)| ExpTerm { weight, rate }).collect(), vec![]).unwrap()
    })
}

fn any_measure() -> impl Strategy<Value = MeasureSpec> {
    (
        prop::collection::vec((0.1f64..3.0, -2.0f64..2.0), 0..3),
        prop::collection::vec((-2.0f64..2.0, 0.0f64..2.0, 0.1f64..2.0), 0..3),
    )
        .prop_filter("non-empty", |(e, g)| !e.is_empty() || !g.is_empty())
        .prop_map(|(e, g)| {
            MeasureSpec::new(
                e.into_iter().map(|(weight, rate)| ExpTerm { weight, rate }).collect(),
                g.into_iter().map(|(m, v, w)| GaussianMeasure1D::new(m, v, w).unwrap()).collect(),
            )
            .unwrap()
        })
}

#[test]
fn laplace_examples_match_quadrature() {
    for &(mu, var, y) in &[(0.0, 1.0, 1.0), (1.0, 2.0, -1.0), (-0.5, 0.3, 2.5)] {
        let sd: f64 = f64::sqrt(var);
        let oracle = integrate_1d(|x| (y * x).exp() * phi((x - mu) / sd) / sd, mu + y * var - 12.0 * sd, mu + y * var + 12.0 * sd, 200);
        let got = gauss(mu, var).laplace(y).unwrap();
        assert!((got - oracle).abs() <= 1e-12 * oracle, "{got} vs {oracle}");
    }
    assert!((gauss(1.0, 2.0).laplace(-1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((gauss(0.0, 1.0).laplace(1.0).unwrap() - 0.5f64.exp()).abs() < 1e-15);
}

#[test]
fn exp_convolution_matches_grid_convolution() {
    let m = MeasureSpec::exponential(1.0, 1.0).unwrap();
    let conv = m.convolve_with_gaussian(&gauss(0.0, 2.0)).unwrap();
    assert!(conv.approx_eq(&MeasureSpec::exponential(1f64.exp(), 1.0).unwrap(), 1e-14));
    let sd = 2f64.sqrt();
    for &x in &[-3.0, -1.0, 0.0, 0.7, 2.5] {
        let oracle = integrate_1d(|y| (-(x - y)).exp() * phi(y / sd) / sd, -20.0 * sd, 20.0 * sd, 400);
        let got = conv.density(x).unwrap();
        assert!((got - oracle).abs() <= 1e-8 * oracle, "x={x}: {got} vs {oracle}");
    }
}

#[test]
fn exp_mass_and_inversion_examples() {
    let m = MeasureSpec::exponential(1.0, 1.0).unwrap();
    let oracle = integrate_1d(|x| (-x).exp(), 0.0, 10.0, 100);
    assert!((m.mass_on_interval(0.0, 10.0).unwrap() - oracle).abs() < 1e-12);
    assert!((m.mass_on_interval(0.0, 10.0).unwrap() - (1.0 - (-10f64).exp())).abs() < 1e-15);
    let x = m.inverse_cdf_on_window(0.0, 50.0, 0.5).unwrap();
    assert!((x - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn integrability_rejects_nothing_valid() {
    assert!(MeasureSpec::lebesgue(3.0).unwrap().check_integrability());
    assert!(MeasureSpec::exponential(0.5, -4.0).unwrap().check_integrability());
}

#[test]
fn json_roundtrip() {
    let m = MeasureSpec::new(vec![ExpTerm { weight: 2.0, rate: 0.5 }], vec![gauss(1.0, 0.5)]).unwrap();
    let s = serde_json::to_string(&m).unwrap();
    let back: MeasureSpec = serde_json::from_str(&s).unwrap();
    assert_eq!(m, back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_semigroup(m in any_measure(), mu1 in -1.0f64..1.0, v1 in 0.0f64..2.0, mu2 in -1.0f64..1.0, v2 in 0.0f64..2.0) {
        let two_step = m.convolve_with_gaussian(&gauss(mu1, v1)).unwrap().convolve_with_gaussian(&gauss(mu2, v2)).unwrap();
        let one_step = m.convolve_with_gaussian(&gauss(mu1 + mu2, v1 + v2)).unwrap();
        prop_assert!(two_step.approx_eq(&one_step, 1e-12));
    }

    #[test]
    fn mass_is_additive(m in any_measure(), a in -5.0f64..0.0, w1 in 0.0f64..4.0, w2 in 0.0f64..4.0) {
        let (b, c) = (a + w1, a + w1 + w2);
        let whole = m.mass_on_interval(a, c).unwrap();
        let parts = m.mass_on_interval(a, b).unwrap() + m.mass_on_interval(b, c).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1e-300));
    }

    #[test]
    fn inverse_cdf_inverts_mass(m in exp_mixture(), a in -3.0f64..0.0, w in 0.1f64..6.0, frac in 0.01f64..0.99) {
        let b = a + w;
        let x = a + frac * w;
        let u = m.mass_on_interval(a, x).unwrap() / m.mass_on_interval(a, b).unwrap();
        let back = m.inverse_cdf_on_window(a, b, u).unwrap();
        prop_assert!((back - x).abs() <= 1e-9, "{back} vs {x}");
    }

    #[test]
    fn gaussian_components_invert_too(mu in -2.0f64..2.0, v in 0.1f64..2.0, frac in 0.05f64..0.95) {
        let m = MeasureSpec::gaussian(gauss(mu, v));
        let sd = v.sqrt();
        let (a, b) = (mu - 3.0 * sd, mu + 3.0 * sd);
        let x = a + frac * (b - a);
        let u = m.mass_on_interval(a, x).unwrap() / m.mass_on_interval(a, b).unwrap();
        prop_assert!((m.inverse_cdf_on_window(a, b, u).unwrap() - x).abs() <= 1e-9);
    }

    #[test]
    fn shifting_through_a_wider_gaussian(m in any_measure(), mu1 in -1.0f64..1.0, v1 in 0.0f64..1.0, mu2 in -1.0f64..1.0, dv in 0.01f64..1.0) {
        let v2 = v1 + dv;
        let via = m.convolve_with_gaussian(&gauss(mu1, v1)).unwrap().convolve_with_gaussian(&gauss(mu2 - mu1, v2 - v1)).unwrap();
        let direct = m.convolve_with_gaussian(&gauss(mu2, v2)).unwrap();
        prop_assert!(via.approx_eq(&direct, 1e-10));
    }

    #[test]
    fn convolution_is_injective(m in any_measure(), mu in -1.0f64..1.0, v in 0.0f64..1.0, bump in 0.01f64..0.5) {
        let n = gauss(mu, v);
        let other = m.scaled(1.0 + bump).unwrap();
        prop_assert!(!m.convolve_with_gaussian(&n).unwrap().approx_eq(&other.convolve_with_gaussian(&n).unwrap(), 1e-6));
        let moved = m.shifted(bump).unwrap();
        prop_assert!(!m.convolve_with_gaussian(&n).unwrap().approx_eq(&moved.convolve_with_gaussian(&n).unwrap(), 1e-6));
    }

    #[test]
    fn every_valid_measure_is_integrable(m in any_measure()) {
        prop_assert!(m.check_integrability());
    }
}
