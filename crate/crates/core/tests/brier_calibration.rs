use deteval::fixtures::{brier_models, bx, ranked_frame, RANKED_OUTCOMES, RANKED_SCORES};
use deteval::metrics::{
    brier_score, calibration_curve, calibration_distance, BrierSupport, EvalConfig,
};
use deteval::matching::{generate_scenario, ScenarioParams};
use deteval::{Detection, Frame};
use proptest::prelude::*;

fn config() -> EvalConfig {
    EvalConfig { tau: 0.5, ..Default::default() }
}

#[test]
fn union_support_rewards_a_low_confidence_false_positive() {
    let (model_a, model_b) = brier_models();
    let score = |f: &Frame, s| brier_score(std::slice::from_ref(f), &config(), s).unwrap();
    let a_union = score(&model_a, BrierSupport::Union);
    let b_union = score(&model_b, BrierSupport::Union);
    assert!((a_union - 0.01).abs() < 1e-9);
    assert!((b_union - 0.00505).abs() < 1e-9);
    assert!(b_union < a_union);
    let a_labels = score(&model_a, BrierSupport::Labels);
    let b_labels = score(&model_b, BrierSupport::Labels);
    assert!((a_labels - 0.01).abs() < 1e-9);
    assert!((b_labels - 0.01).abs() < 1e-9);
}

#[test]
fn ranked_fixture_by_hand() {
    let frames = [ranked_frame()];
    let sq = |c: f64, tp: bool| if tp { (1.0 - c).powi(2) } else { c * c };
    let tp_sum: f64 = RANKED_SCORES.iter().zip(RANKED_OUTCOMES).filter(|x| x.1).map(|(&c, _)| sq(c, true)).sum();
    let det_sum: f64 = RANKED_SCORES.iter().zip(RANKED_OUTCOMES).map(|(&c, t)| sq(c, t)).sum();
    let want = [
        (BrierSupport::Labels, (tp_sum + 2.0) / 8.0),
        (BrierSupport::Detections, det_sum / 10.0),
        (BrierSupport::Union, (det_sum + 2.0) / 12.0),
    ];
    for (support, expected) in want {
        let got = brier_score(&frames, &config(), support).unwrap();
        assert!((got - expected).abs() < 1e-12, "{support:?}");
    }
    assert!((brier_score(&frames, &config(), BrierSupport::Labels).unwrap() - 0.3014875).abs() < 1e-12);

    let bins = calibration_curve(&frames, &config()).unwrap();
    assert_eq!(bins.len(), 10);
    let occupied: Vec<_> = bins.iter().filter(|b| b.sample_count > 0).collect();
    // Pairs of scores land in bins 5..=9: (0.57, 0.52), (0.67, 0.62), ...
    let expected = [(5, 0.545, 0.5), (6, 0.645, 0.5), (7, 0.745, 0.5), (8, 0.845, 0.5), (9, 0.945, 1.0)];
    assert_eq!(occupied.len(), expected.len());
    for (b, (i, mean, precision)) in occupied.iter().zip(expected) {
        assert!((b.bin_center - (i as f64 + 0.5) / 10.0).abs() < 1e-12);
        assert_eq!(b.sample_count, 2);
        assert!((b.mean_confidence.unwrap() - mean).abs() < 1e-12);
        assert_eq!(b.empirical_precision.unwrap(), precision);
    }
    let gaps: [f64; 5] = [0.045, 0.145, 0.245, 0.345, 0.055];
    let rms = (gaps.iter().map(|g| 2.0 * g * g).sum::<f64>() / 10.0).sqrt();
    assert!((calibration_distance(&bins).unwrap() - rms).abs() < 1e-12);
}

#[test]
fn empty_support_is_reported_not_zero() {
    let f = Frame::new("0", vec![], vec![]);
    assert!(brier_score(&[f.clone()], &config(), BrierSupport::Labels).is_err());
    assert!(brier_score(&[f], &config(), BrierSupport::Union).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn labels_support_ignores_false_positives(seed in 0u64..10_000, score in 0.0f64..=1.0) {
        let s = generate_scenario(seed, &ScenarioParams { labels: (1, 7), ..Default::default() });
        let base = s.into_frame("0");
        let mut more = base.clone();
        // Far outside the generator's 1242x375 canvas.
        more.detections.push(Detection::new(bx(5000.0, 5000.0, 5050.0, 5050.0), score));
        let c = config();
        let before = brier_score(&[base.clone()], &c, BrierSupport::Labels).unwrap();
        let after = brier_score(&[more.clone()], &c, BrierSupport::Labels).unwrap();
        prop_assert_eq!(before, after);
        let m = base.detections.len() as f64;
        let dets_after = brier_score(&[more], &c, BrierSupport::Detections).unwrap();
        let dets_before = brier_score(&[base], &c, BrierSupport::Detections).unwrap_or(0.0);
        prop_assert!((dets_after - (dets_before * m + score * score) / (m + 1.0)).abs() < 1e-12);
    }
}
