use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use deteval::filters::{build_pair_set, filtered_counts, naive_filtered_counts, Atom, Comparator, FilterSpec, Side};
use deteval::geometry::iou_matrix;
use deteval::ingest::{DetectionRecord, LabelRecord};
use deteval::matching::{generate_scenario, Matcher, Scenario, ScenarioParams};
use deteval::metrics::{counts_from_matching, ConfusionCounts};
use deteval::{Box2D, Detection, Label};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{emit_json, thread_pool};
use crate::args::FuzzArgs;
use crate::settings::{default_threads, usage};

const CLASS: &str = "Car";
const FILTER_ATTRIBUTES: [&str; 3] = ["area", "width", "height_px"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Greedy association found fewer TPs than optimal.
    GreedyDisagreement,
    /// Naive filtering raised an FP or FN count above the unfiltered one.
    NaiveInstability,
}

impl WitnessKind {
    fn as_str(&self) -> &'static str {
        match self {
            WitnessKind::GreedyDisagreement => "greedy-disagreement",
            WitnessKind::NaiveInstability => "naive-instability",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub seed: u64,
    /// Detections plus labels.
    pub size: usize,
    pub filter: Option<String>,
    pub reference: ConfusionCounts,
    pub observed: ConfusionCounts,
    pub fixture: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FuzzReport {
    pub seeds: u64,
    pub first_seed: u64,
    pub tau: f64,
    pub bias: f64,
    pub max_boxes: usize,
    pub filters_per_scenario: usize,
    pub disagreements: usize,
    pub disagreement_rate: f64,
    pub filters_tried: usize,
    pub instability_witnesses: usize,
    /// Filtered counts exceeding unfiltered counts under the stable
    /// semantics; expected to stay zero.
    pub stable_violations: usize,
    pub smallest: Vec<Witness>,
}

struct Outcome {
    disagreement: Option<Witness>,
    instabilities: Vec<Witness>,
    stable_violations: usize,
}

fn random_filter(rng: &mut ChaCha8Rng, s: &Scenario) -> Option<FilterSpec> {
    let side = [Side::Label, Side::Detection, Side::Both][rng.gen_range(0..3)];
    let attribute = FILTER_ATTRIBUTES[rng.gen_range(0..FILTER_ATTRIBUTES.len())];
    let value_of = |b: &Box2D| match attribute {
        "area" => b.area(),
        "width" => b.width(),
        _ => b.height(),
    };
    let mut values: Vec<f64> = s
        .labels
        .iter()
        .map(|l| value_of(&l.bbox))
        .chain(s.detections.iter().map(|d| value_of(&d.bbox)))
        .collect();
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    // Cut between two observed values so no box sits exactly on the edge.
    let i = rng.gen_range(0..values.len());
    let cut = if i + 1 < values.len() {
        0.5 * (values[i] + values[i + 1])
    } else {
        values[i] + 1.0
    };
    Some(FilterSpec::new(vec![Atom::new(side, attribute, Comparator::Ge, cut)]))
}

fn run_seed(seed: u64, args: &FuzzArgs, params: &ScenarioParams) -> Result<Outcome> {
    let s = generate_scenario(seed, params);
    let scores: Vec<f64> = s.detections.iter().map(|d| d.score).collect();
    let iou = iou_matrix(&s.detection_boxes(), &s.label_boxes());
    let k = s.labels.len();
    let optimal = Matcher::Optimal.run(&iou, &scores, k, args.tau)?;
    let greedy = Matcher::GreedyConfidence.run(&iou, &scores, k, args.tau)?;
    let base = counts_from_matching(&optimal);
    let greedy_counts = counts_from_matching(&greedy);

    let witness = |kind, filter: Option<String>, observed| Witness {
        kind,
        seed,
        size: s.size(),
        filter,
        reference: base,
        observed,
        fixture: None,
    };
    let disagreement = (greedy_counts.tp != base.tp)
        .then(|| witness(WitnessKind::GreedyDisagreement, None, greedy_counts));

    let pairs = build_pair_set(&optimal, &s.detections, &s.labels, args.tau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f11e_u64);
    let mut instabilities = Vec::new();
    let mut stable_violations = 0;
    for _ in 0..args.filters_per_scenario {
        let Some(filter) = random_filter(&mut rng, &s) else { break };
        if !filtered_counts(&pairs, &filter)?.dominated_by(&base) {
            stable_violations += 1;
        }
        let naive = naive_filtered_counts(&s.detections, &s.labels, &filter, args.tau, Matcher::Optimal)?;
        if naive.fp > base.fp || naive.fn_ > base.fn_ {
            instabilities.push(witness(WitnessKind::NaiveInstability, Some(filter.to_string()), naive));
        }
    }
    Ok(Outcome {
        disagreement,
        instabilities,
        stable_violations,
    })
}

pub fn fuzz(args: &FuzzArgs) -> Result<(FuzzReport, Vec<Scenario>)> {
    if !(args.tau > 0.0 && args.tau <= 1.0) {
        return Err(usage(format!("--tau must lie in (0, 1], got {}", args.tau)));
    }
    let params = ScenarioParams {
        detections: (0, args.max_boxes),
        labels: (0, args.max_boxes),
        overlap_bias: args.bias,
        ..ScenarioParams::default()
    };
    params.validate().map_err(usage)?;

    let outcomes: Vec<Outcome> = (0..args.seeds)
        .into_par_iter()
        .map(|i| run_seed(args.seed.wrapping_add(i), args, &params))
        .collect::<Result<_>>()?;

    let disagreements: Vec<Witness> = outcomes.iter().filter_map(|o| o.disagreement.clone()).collect();
    let instabilities: Vec<Witness> = outcomes.iter().flat_map(|o| o.instabilities.clone()).collect();
    let mut smallest = Vec::new();
    for mut group in [disagreements.clone(), instabilities.clone()] {
        group.sort_by_key(|w| (w.size, w.seed));
        group.dedup_by_key(|w| w.seed);
        smallest.extend(group.into_iter().take(args.keep));
    }
    let scenarios = smallest.iter().map(|w| generate_scenario(w.seed, &params)).collect();

    let report = FuzzReport {
        seeds: args.seeds,
        first_seed: args.seed,
        tau: args.tau,
        bias: args.bias,
        max_boxes: args.max_boxes,
        filters_per_scenario: args.filters_per_scenario,
        disagreements: disagreements.len(),
        disagreement_rate: if args.seeds == 0 { 0.0 } else { disagreements.len() as f64 / args.seeds as f64 },
        filters_tried: args.filters_per_scenario * args.seeds as usize,
        instability_witnesses: instabilities.len(),
        stable_violations: outcomes.iter().map(|o| o.stable_violations).sum(),
        smallest,
    };
    Ok((report, scenarios))
}

fn object_record(bbox: Box2D, label: Option<&Label>) -> LabelRecord {
    let attr = |k: &str| label.and_then(|l| l.attributes.get(k).copied().flatten());
    LabelRecord {
        class_name: CLASS.to_string(),
        truncation: label.map(|_| attr("truncation").unwrap_or(0.0)),
        occlusion: label.map(|_| attr("occlusion").unwrap_or(0.0) as u8),
        alpha: 0.0,
        bbox,
        dimensions_hwl: [1.5, 1.6, 3.9],
        location_xyz: [0.0, 1.7, attr("distance").unwrap_or(20.0)],
        rotation_y: 0.0,
    }
}

/// Writes a scenario as frame `frame_id` of a KITTI dataset rooted at `dir`
/// (`labels/` and `detections/`).
pub fn write_scenario(dir: &Path, frame_id: &str, s: &Scenario) -> Result<()> {
    let labels: String = s
        .labels
        .iter()
        .map(|l| object_record(l.bbox, Some(l)).to_kitti_line() + "\n")
        .collect();
    let dets: String = s
        .detections
        .iter()
        .map(|d: &Detection| {
            DetectionRecord {
                object: object_record(d.bbox, None),
                score: d.score,
            }
            .to_kitti_line()
                + "\n"
        })
        .collect();
    for (sub, text) in [("labels", labels), ("detections", dets)] {
        let d = dir.join(sub);
        fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        fs::write(d.join(format!("{frame_id}.txt")), text).with_context(|| format!("writing {}", d.display()))?;
    }
    Ok(())
}

pub fn run_fuzz(args: &FuzzArgs, _argv: &[String]) -> Result<()> {
    let pool = thread_pool(args.threads.unwrap_or_else(default_threads))?;
    let (mut report, scenarios) = pool.install(|| fuzz(args))?;
    eprintln!(
        "{} scenarios: {} greedy-vs-optimal disagreements ({:.2}%), {} naive-filter instability witnesses, {} stable violations",
        report.seeds,
        report.disagreements,
        100.0 * report.disagreement_rate,
        report.instability_witnesses,
        report.stable_violations
    );
    match &args.out {
        Some(dir) => {
            for (w, s) in report.smallest.iter_mut().zip(&scenarios) {
                let name = format!("{}-{}", w.kind.as_str(), w.seed);
                let fixture = dir.join("witnesses").join(&name);
                write_scenario(&fixture, "000000", s)?;
                if let Some(f) = &w.filter {
                    fs::write(fixture.join("filter.txt"), format!("{f}\n"))?;
                }
                w.fixture = Some(format!("witnesses/{name}"));
            }
            emit_json(&report, Some(&dir.join("fuzz_report.json")))
        }
        None => emit_json(&report, None),
    }
}
