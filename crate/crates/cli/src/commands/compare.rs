use anyhow::Result;
use deteval::geometry::iou_matrix;
use deteval::matching::{Matcher, Matching};
use deteval::metrics::{counts_from_matching, ConfusionCounts, EvalConfig};
use deteval::Frame;
use rayon::prelude::*;
use serde::Serialize;

use super::{emit_json, load, thread_pool};
use crate::args::EvalArgs;
use crate::settings::Settings;

#[derive(Debug, Serialize)]
pub struct Association {
    pub counts: ConfusionCounts,
    pub matching: Matching,
}

#[derive(Debug, Serialize)]
pub struct Disagreement {
    pub class: String,
    pub frame_id: String,
    pub greedy: Association,
    pub optimal: Association,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub tau: f64,
    pub min_confidence: f64,
    pub frames_compared: usize,
    pub disagreement_count: usize,
    pub disagreement_frequency: f64,
    pub disagreements: Vec<Disagreement>,
}

fn associate(frame: &Frame, config: &EvalConfig, matcher: Matcher) -> Result<Association> {
    let kept: Vec<_> = frame
        .detections
        .iter()
        .filter(|d| d.score >= config.min_confidence)
        .collect();
    let boxes: Vec<_> = kept.iter().map(|d| d.bbox).collect();
    let scores: Vec<f64> = kept.iter().map(|d| d.score).collect();
    let iou = iou_matrix(&boxes, &frame.label_boxes());
    let matching = matcher.run(&iou, &scores, frame.labels.len(), config.tau)?;
    Ok(Association {
        counts: counts_from_matching(&matching),
        matching,
    })
}

/// Frames whose greedy TP count differs from the optimal one.
pub fn compare_frames(class: &str, frames: &[Frame], config: &EvalConfig) -> Result<Vec<Disagreement>> {
    let found: Vec<Option<Disagreement>> = frames
        .par_iter()
        .map(|f| -> Result<_> {
            let greedy = associate(f, config, Matcher::GreedyConfidence)?;
            let optimal = associate(f, config, Matcher::Optimal)?;
            Ok((greedy.counts.tp != optimal.counts.tp).then(|| Disagreement {
                class: class.to_string(),
                frame_id: f.id.clone(),
                greedy,
                optimal,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

pub fn run_compare(args: &EvalArgs, _argv: &[String]) -> Result<()> {
    let settings = Settings::resolve(args)?;
    let pool = thread_pool(settings.threads)?;
    let report = pool.install(|| -> Result<CompareReport> {
        let loaded = load(&settings)?;
        let mut disagreements = Vec::new();
        let mut frames_compared = 0;
        for (class, frames) in &loaded.classes {
            frames_compared += frames.len();
            disagreements.extend(compare_frames(class, frames, &settings.config)?);
        }
        Ok(CompareReport {
            tau: settings.config.tau,
            min_confidence: settings.config.min_confidence,
            frames_compared,
            disagreement_count: disagreements.len(),
            disagreement_frequency: if frames_compared == 0 {
                0.0
            } else {
                disagreements.len() as f64 / frames_compared as f64
            },
            disagreements,
        })
    })?;
    for d in &report.disagreements {
        eprintln!(
            "{} frame {}: greedy {} vs optimal {}",
            d.class, d.frame_id, d.greedy.counts, d.optimal.counts
        );
    }
    eprintln!(
        "{} of {} frames disagree ({:.2}%)",
        report.disagreement_count,
        report.frames_compared,
        100.0 * report.disagreement_frequency
    );
    emit_json(&report, settings.out.as_deref())
}
