#![allow(dead_code)]

use gaussys_core::analytic::PairSpec;
use gaussys_core::measures::{GaussianMeasure1D, MeasureSpec};
use gaussys_core::processes::{DriftSpec, GammaSpec, KernelComponent, KernelSpec, ProcessSpec, TimePoint};

pub fn t(x: f64) -> TimePoint {
    TimePoint::from(x)
}

pub fn brown_resnick() -> PairSpec {
    PairSpec::new(
        MeasureSpec::exponential(1.0, 1.0).unwrap(),
        ProcessSpec::fbm(1, 1.0, DriftSpec::SelfSimilar { lambda: 1.0, offset: 0.0 }).unwrap(),
        0.0,
    )
    .unwrap()
}

/// `e_1` driven by standard Brownian motion without drift.
pub fn bm_nodrift_exp() -> PairSpec {
    PairSpec::new(
        MeasureSpec::exponential(1.0, 1.0).unwrap(),
        ProcessSpec::stat_increment(1, GammaSpec::Bm { scale: 1.0 }, DriftSpec::None).unwrap(),
        0.0,
    )
    .unwrap()
}

/// Pair A of the N₀ construction and pair B with constant kernel part `c0`.
pub fn n0_pairs(c0: f64) -> (PairSpec, PairSpec) {
    let k = KernelComponent::Exp { variance: 0.5, scale: 1.0 };
    let a = PairSpec::new(
        MeasureSpec::gaussian(GaussianMeasure1D::normal(0.0, 1.5).unwrap()),
        ProcessSpec::stationary(1, KernelSpec(vec![k.clone()]), 0.0).unwrap(),
        0.0,
    )
    .unwrap();
    let b = PairSpec::new(
        MeasureSpec::gaussian(GaussianMeasure1D::normal(0.0, 1.0).unwrap()),
        ProcessSpec::stationary(1, KernelSpec(vec![k, KernelComponent::Const { variance: c0 }]), 0.0).unwrap(),
        0.0,
    )
    .unwrap();
    (a, b)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule on [a, b].
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for &(x, w) in &gl {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    composite_rule(a, b, panels, 10).iter().map(|&(x, w)| w * f(x)).sum()
}

/// Standard normal density, written out independently of the crate.
pub fn phi(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
