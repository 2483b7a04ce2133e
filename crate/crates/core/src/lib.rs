//! Gaussian systems: Poisson starting points driven by Gaussian processes.
//!
//! The crate covers the measure and process DSLs, closed-form intensities,
//! exact simulation, Monte Carlo tests of stationarity and equality in law,
//! and analytic classification into the stationary families.

pub mod analytic;
pub mod classify;
pub mod error;
pub mod interval;
pub mod measures;
pub mod normal;
pub mod processes;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod verify;

pub use analytic::{bivariate_intensity, decompose_layer, psi_kappa, DiagonalGaussianLayer, PairSpec};
pub use error::{Error, Result};
pub use interval::Interval;
pub use measures::{ExpTerm, GaussianMeasure1D, MeasureSpec};
pub use processes::{DriftSpec, GammaSpec, GridLaw, KernelComponent, KernelSpec, ProcessFamily, ProcessSpec, TimePoint, ValidationGrid};
pub use sampler::{simulate_system, Padding, SimulationConfig, Simulator, Strategy, SystemSample};
pub use classify::{canonicalize, classify_pair, equal_in_law_analytic, ClassificationReport, FamilyLabel, LawComparison};
pub use verify::{equal_in_law_mc, estimate_intensity, stationarity_test, Design, McOptions, Query, TestReport, Verdict};
