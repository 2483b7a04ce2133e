//! Standard normal helpers with accurate tails.

use statrs::distribution::{ContinuousCDF, Normal};
use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Φ(z).
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// 1 − Φ(z), without cancellation for large z.
pub fn sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Φ⁻¹(p) for p in (0, 1).
pub fn quantile(p: f64) -> f64 {
    let mut x = Normal::standard().inverse_cdf(p);
    if x.is_finite() {
        // one Newton step against the accurate cdf, on the tail side
        let resid = if x > 0.0 { (1.0 - p) - sf(x) } else { cdf(x) - p };
        x -= resid / pdf(x);
    }
    x
}

/// P(N(mean, variance) ∈ [lo, hi]). Variance zero is a Dirac mass and the
/// interval is treated as closed.
pub fn interval_prob(mean: f64, variance: f64, lo: f64, hi: f64) -> f64 {
    if hi < lo {
        return 0.0;
    }
    if variance <= 0.0 {
        return if lo <= mean && mean <= hi { 1.0 } else { 0.0 };
    }
    let sd = variance.sqrt();
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    // pick the tail that avoids cancellation
    if a > 0.0 {
        (sf(a) - sf(b)).max(0.0)
    } else {
        (cdf(b) - cdf(a)).max(0.0)
    }
}

/// Density of N(mean, variance) at x; variance must be positive.
pub fn density(mean: f64, variance: f64, x: f64) -> f64 {
    let sd = variance.sqrt();
    pdf((x - mean) / sd) / sd
}
