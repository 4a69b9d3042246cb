use deteval::matching::{
    brute_force_match, generate_scenario, greedy_match, optimal_match_boxes, GreedyOrder, ScenarioParams,
};

const TAUS: [f64; 3] = [0.25, 0.5, 0.7];

#[test]
fn optimal_matches_exhaustive_search() {
    let params = ScenarioParams::default();
    let mut nonempty = 0;
    for seed in 0..1000u64 {
        let s = generate_scenario(seed, &params);
        let (dets, labels) = (s.detection_boxes(), s.label_boxes());
        for tau in TAUS {
            let opt = optimal_match_boxes(&dets, &labels, tau).unwrap();
            let brute = brute_force_match(&dets, &labels, tau).unwrap();
            opt.check(dets.len(), labels.len(), tau).unwrap();
            assert_eq!(opt.num_pairs(), brute.num_pairs(), "seed {seed} tau {tau}");
            assert!(
                (opt.total_iou() - brute.total_iou()).abs() <= 1e-9,
                "seed {seed} tau {tau}: {} vs {}",
                opt.total_iou(),
                brute.total_iou()
            );
            nonempty += (brute.num_pairs() > 0) as usize;
        }
    }
    assert!(nonempty > 1000);
}

#[test]
fn greedy_never_beats_optimal() {
    let params = ScenarioParams { overlap_bias: 0.9, ..Default::default() };
    let mut strictly_worse = 0;
    for seed in 0..2000u64 {
        let s = generate_scenario(seed, &params);
        for tau in TAUS {
            let opt = optimal_match_boxes(&s.detection_boxes(), &s.label_boxes(), tau).unwrap();
            for order in [GreedyOrder::ConfidenceDescending, GreedyOrder::InputOrder] {
                let g = greedy_match(&s.scored_detections(), &s.label_boxes(), tau, order).unwrap();
                g.check(s.detections.len(), s.labels.len(), tau).unwrap();
                assert!(g.num_pairs() <= opt.num_pairs(), "seed {seed}");
                strictly_worse += (g.num_pairs() < opt.num_pairs()) as usize;
            }
        }
    }
    assert!(strictly_worse > 0);
}

#[test]
fn disjoint_scenes_agree() {
    let params = ScenarioParams { overlap_bias: 0.0, ..Default::default() };
    for seed in 0..300u64 {
        let s = generate_scenario(seed, &params);
        let opt = optimal_match_boxes(&s.detection_boxes(), &s.label_boxes(), 0.1).unwrap();
        let g = greedy_match(&s.scored_detections(), &s.label_boxes(), 0.1, GreedyOrder::ConfidenceDescending).unwrap();
        assert_eq!(opt.num_pairs(), 0);
        assert_eq!(g.num_pairs(), 0);
    }
}
