mod common;

use common::{bm_nodrift_exp, brown_resnick, n0_pairs};
use gaussys_core::analytic::PairSpec;
use gaussys_core::classify::{canonicalize, classify_pair, equal_in_law_analytic, FamilyLabel, CLASSIFY_TOL};
use gaussys_core::measures::{GaussianMeasure1D, MeasureSpec};
use gaussys_core::processes::{DriftSpec, GammaSpec, KernelComponent, KernelSpec, ProcessSpec, ValidationGrid};
use gaussys_core::verify::{equal_in_law_mc, Design, McOptions, Verdict};
use gaussys_core::Error;
use proptest::prelude::*;

fn grid() -> ValidationGrid {
    ValidationGrid::default_for(1)
}

fn classify(p: &PairSpec) -> FamilyLabel {
    classify_pair(p, &grid(), CLASSIFY_TOL).unwrap().label
}

fn s3(alpha: f64, lambda: f64, kappa: f64, offset: f64, shift: f64) -> PairSpec {
    PairSpec::new(
        MeasureSpec::exponential(alpha, lambda).unwrap(),
        ProcessSpec::fbm(1, kappa, DriftSpec::SelfSimilar { lambda, offset }).unwrap(),
        shift,
    )
    .unwrap()
}

fn s2(alpha: f64, scale: f64, slope: f64, offset: f64) -> PairSpec {
    PairSpec::new(
        MeasureSpec::lebesgue(alpha).unwrap(),
        ProcessSpec::stat_increment(1, GammaSpec::Bm { scale }, DriftSpec::Linear { coeffs: vec![slope], offset }).unwrap(),
        0.0,
    )
    .unwrap()
}

#[test]
fn labels_of_reference_pairs() {
    match classify(&brown_resnick()) {
        FamilyLabel::S3 { alpha, lambda, c, .. } => assert_eq!((alpha, lambda, c), (1.0, 1.0, 0.0)),
        other => panic!("{other:?}"),
    }
    match classify(&s2(1.0, 1.0, 2.0, 5.0)) {
        FamilyLabel::S2 { coeffs, c, .. } => {
            assert_eq!(coeffs, vec![2.0]);
            assert_eq!(c, 5.0);
        }
        other => panic!("{other:?}"),
    }
    let report = classify_pair(&bm_nodrift_exp(), &grid(), CLASSIFY_TOL).unwrap();
    match &report.label {
        FamilyLabel::NotStationary { reason } => assert!(reason.contains("mean")),
        other => panic!("{other:?}"),
    }
    assert_eq!(report.evidence.last().unwrap().check, "s3_drift_relation");

    let clock = PairSpec::new(
        MeasureSpec::exponential(1.0, 1.0).unwrap(),
        ProcessSpec::stat_increment(1, GammaSpec::TimeChangedBm { power: 2.0 }, DriftSpec::None).unwrap(),
        0.0,
    )
    .unwrap();
    match classify(&clock) {
        FamilyLabel::NotStationary { reason } => assert!(reason.contains("increments")),
        other => panic!("{other:?}"),
    }
    let gauss_fbm = PairSpec::new(
        MeasureSpec::gaussian(GaussianMeasure1D::normal(0.0, 1.0).unwrap()),
        ProcessSpec::fbm(1, 1.0, DriftSpec::None).unwrap(),
        0.0,
    )
    .unwrap();
    assert_eq!(classify(&gauss_fbm).name(), "not_stationary");
    assert_eq!(classify(&n0_pairs(0.5).0).name(), "S1*");
}

#[test]
fn canonical_examples() {
    let c = canonicalize(&s3(1.0, 1.0, 1.0, 3.0, 0.0), &grid(), CLASSIFY_TOL).unwrap();
    assert!(c.measure.approx_eq(&MeasureSpec::exponential(3f64.exp(), 1.0).unwrap(), 1e-14));
    assert_eq!(c.process, ProcessSpec::fbm(1, 1.0, DriftSpec::SelfSimilar { lambda: 1.0, offset: 0.0 }).unwrap());

    let c = canonicalize(&s2(1.0, 1.0, 2.0, 5.0), &grid(), CLASSIFY_TOL).unwrap();
    assert_eq!(c, s2(1.0, 1.0, 2.0, 0.0));

    assert!(matches!(canonicalize(&bm_nodrift_exp(), &grid(), CLASSIFY_TOL), Err(Error::WrongLabel(_))));
}

#[test]
fn n0_construction() {
    let (a, b) = n0_pairs(0.5);
    let cmp = equal_in_law_analytic(&a, &b, &grid(), CLASSIFY_TOL).unwrap();
    assert!(cmp.equal, "{}", cmp.reason);
    assert_eq!(cmp.via, "n0_shift");
    assert_eq!(cmp.direction.as_deref(), Some("a_to_b"));
    let n0 = cmp.n0.unwrap();
    assert_eq!((n0.mean, n0.variance), (0.0, 0.5));

    let (a, b) = n0_pairs(0.4);
    assert!(!equal_in_law_analytic(&a, &b, &grid(), CLASSIFY_TOL).unwrap().equal);
}

#[test]
fn analytic_equality_is_confirmed_by_simulation() {
    let (a, b) = n0_pairs(0.5);
    let report = equal_in_law_mc(&a, &b, &Design::default_for(1), 20_000, 0.05, &McOptions::with_seed(17)).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);

    let x = s3(2.0, 1.0, 1.0, 0.7, -0.2);
    let y = canonicalize(&x, &grid(), CLASSIFY_TOL).unwrap();
    assert!(equal_in_law_analytic(&x, &y, &grid(), CLASSIFY_TOL).unwrap().equal);
    let report = equal_in_law_mc(&x, &y, &Design::default_for(1), 20_000, 0.05, &McOptions::with_seed(18)).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
}

#[test]
fn report_json_keys() {
    let report = classify_pair(&brown_resnick(), &grid(), CLASSIFY_TOL).unwrap();
    let v = serde_json::to_value(&report).unwrap();
    assert_eq!(v["label"], "S3");
    assert_eq!(v["params"]["lambda"], 1.0);
    assert!(v["evidence"].as_array().unwrap().iter().all(|e| e["check"].is_string() && e["residual"].is_number()));
    assert!(v["canonical"].is_object());
}

#[test]
fn planar_pairs_classify() {
    let g = ValidationGrid::default_for(2);
    let p = PairSpec::new(
        MeasureSpec::lebesgue(1.0).unwrap(),
        ProcessSpec::stat_increment(2, GammaSpec::Bm { scale: 1.0 }, DriftSpec::Linear { coeffs: vec![1.0, -1.0], offset: 0.5 })
            .unwrap(),
        0.0,
    )
    .unwrap();
    match classify_pair(&p, &g, CLASSIFY_TOL).unwrap().label {
        FamilyLabel::S2 { coeffs, c, .. } => {
            assert_eq!(coeffs, vec![1.0, -1.0]);
            assert_eq!(c, 0.5);
        }
        other => panic!("{other:?}"),
    }
    assert!(classify_pair(&p, &grid(), CLASSIFY_TOL).is_err());
}

fn s3_strategy() -> impl Strategy<Value = PairSpec> {
    (0.2f64..3.0, 0.2f64..2.0, 0.2f64..2.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, l, k, o, s)| s3(a, l, k, o, s))
}

fn s2_strategy() -> impl Strategy<Value = PairSpec> {
    (0.2f64..3.0, 0.1f64..2.0, -1.0f64..1.0, -2.0f64..2.0).prop_map(|(a, sc, sl, o)| s2(a, sc, sl, o))
}

fn s1_strategy() -> impl Strategy<Value = PairSpec> {
    (0.2f64..2.0, 0.1f64..1.0, 0.0f64..0.5, -1.0f64..1.0).prop_map(|(v, k, c, m)| {
        PairSpec::new(
            MeasureSpec::gaussian(GaussianMeasure1D::normal(m, v).unwrap()),
            ProcessSpec::stationary(1, KernelSpec(vec![KernelComponent::Exp { variance: k, scale: 1.0 }, KernelComponent::Const { variance: c }]), m)
                .unwrap(),
            0.0,
        )
        .unwrap()
    })
}

fn any_pair() -> impl Strategy<Value = PairSpec> {
    prop_oneof![s3_strategy(), s2_strategy(), s1_strategy(), Just(bm_nodrift_exp())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonicalize_is_idempotent_and_keeps_the_label(p in prop_oneof![s3_strategy(), s2_strategy()]) {
        let c1 = canonicalize(&p, &grid(), CLASSIFY_TOL).unwrap();
        let c2 = canonicalize(&c1, &grid(), CLASSIFY_TOL).unwrap();
        prop_assert!(c1.measure.approx_eq(&c2.measure, 1e-12));
        prop_assert_eq!(&c1.process, &c2.process);
        prop_assert_eq!(classify(&p).name(), classify(&c1).name());
        prop_assert!(equal_in_law_analytic(&p, &c1, &grid(), CLASSIFY_TOL).unwrap().equal);
    }

    #[test]
    fn self_similar_residual_is_small(p in s3_strategy()) {
        let report = classify_pair(&p, &grid(), CLASSIFY_TOL).unwrap();
        let ev = report.evidence.iter().find(|e| e.check == "s3_drift_relation").unwrap();
        prop_assert!(ev.residual <= CLASSIFY_TOL);
    }

    #[test]
    fn different_families_are_never_equal(a in s2_strategy(), b in s3_strategy()) {
        prop_assert_eq!(classify(&a).name(), "S2");
        prop_assert_eq!(classify(&b).name(), "S3");
        prop_assert!(!equal_in_law_analytic(&a, &b, &grid(), CLASSIFY_TOL).unwrap().equal);
    }

    #[test]
    fn equality_is_reflexive_and_symmetric(a in any_pair(), b in any_pair()) {
        prop_assert!(equal_in_law_analytic(&a, &a, &grid(), CLASSIFY_TOL).unwrap().equal);
        let ab = equal_in_law_analytic(&a, &b, &grid(), CLASSIFY_TOL).unwrap();
        let ba = equal_in_law_analytic(&b, &a, &grid(), CLASSIFY_TOL).unwrap();
        prop_assert_eq!(ab.equal, ba.equal);
    }
}
