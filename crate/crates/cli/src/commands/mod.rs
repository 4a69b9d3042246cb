mod compare;
mod evaluate;
mod fuzz;
mod sweep;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use deteval::ingest::{
    apply_score_transform, classes_in, frames_for_class, load_dataset, round_floats, FramePair,
    DONT_CARE,
};
use deteval::report::DatasetFingerprint;
use deteval::Frame;
use serde::Serialize;

pub use compare::run_compare;
pub use evaluate::{run_curves, run_evaluate};
pub use fuzz::{fuzz, run_fuzz, write_scenario, FuzzReport, Witness, WitnessKind};
pub use sweep::run_sweep;

use crate::manifest::fingerprint;
use crate::settings::{usage, Settings};

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage(format!("cannot start {threads} threads: {e}")))
}

pub(crate) struct Loaded {
    pub classes: BTreeMap<String, Vec<Frame>>,
    pub fingerprints: Vec<DatasetFingerprint>,
}

/// Reads both directories, applies the score transform and splits the
/// frames per evaluated class.
pub(crate) fn load(settings: &Settings) -> Result<Loaded> {
    let fingerprints = vec![
        fingerprint("labels", &settings.labels)?,
        fingerprint("detections", &settings.detections)?,
    ];
    let mut pairs: Vec<FramePair> = load_dataset(&settings.labels, &settings.detections)?
        .collect::<Result<_, _>>()?;
    apply_score_transform(&mut pairs, settings.config.score_transform).map_err(|e| anyhow!(e))?;

    let names: Vec<String> = if settings.classes.is_empty() {
        let collapse = &settings.config.class_collapse;
        let mut set = BTreeSet::new();
        for c in classes_in(&pairs) {
            set.insert(collapse.get(&c).cloned().unwrap_or(c));
        }
        set.remove(DONT_CARE);
        set.into_iter().collect()
    } else {
        settings.classes.clone()
    };
    let classes = names
        .into_iter()
        .map(|c| {
            let frames = frames_for_class(&pairs, &c, &settings.config);
            (c, frames)
        })
        .collect();
    Ok(Loaded {
        classes,
        fingerprints,
    })
}

/// Pretty JSON with floats at nine significant digits, to `out` or stdout.
pub(crate) fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let text = serde_json::to_string_pretty(&v)? + "\n";
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
