//! Resolves defaults < `--config` file < explicit flags.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Result;
use deteval::filters::{difficulty_filter, parse_filter, Difficulty};
use deteval::ingest::ReportFormat;
use deteval::metrics::{EvalConfig, ThresholdGrid};
use deteval::report::NamedFilter;

use crate::args::EvalArgs;

/// Bad flags, config keys or flag values. Maps to exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

const CONFIG_KEYS: &[&str] = &[
    "labels",
    "detections",
    "iou",
    "matcher",
    "class",
    "collapse",
    "difficulty",
    "filter",
    "ap-mode",
    "brier-support",
    "min-confidence",
    "grid",
    "calibration-bins",
    "score-transform",
    "dontcare",
    "dontcare-threshold",
    "out",
    "format",
    "threads",
];

/// Parsed `key = value` file. Keys may repeat; `#` starts a comment line.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, Vec<String>>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                usage(format!("{}: line {}: expected key = value", origin.display(), i + 1))
            })?;
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(usage(format!(
                    "{}: line {}: unknown key `{}`",
                    origin.display(),
                    i + 1,
                    k.trim()
                )));
            }
            values.entry(key).or_default().push(v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.values.get(key).and_then(|v| v.last()).map(String::as_str)
    }

    fn all(&self, key: &str) -> Vec<String> {
        self.values.get(key).cloned().unwrap_or_default()
    }
}

fn parse_value<T: FromStr>(key: &str, text: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    text.parse()
        .map_err(|e| usage(format!("invalid value `{text}` for {key}: {e}")))
}

/// Flag value if given, else the config file's, else `None`.
fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.last(key).map(|s| parse_value(key, s)).transpose(),
    }
}

fn pick_list(flag: &[String], file: &ConfigFile, key: &str) -> Vec<String> {
    if flag.is_empty() {
        file.all(key)
    } else {
        flag.to_vec()
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub labels: PathBuf,
    pub detections: PathBuf,
    pub config: EvalConfig,
    /// Empty means every class in the dataset.
    pub classes: Vec<String>,
    pub filters: Vec<NamedFilter>,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    pub threads: usize,
}

impl Settings {
    pub fn resolve(args: &EvalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let labels = pick(args.labels.clone(), &file, "labels")?
            .ok_or_else(|| usage("missing required --labels DIR"))?;
        let detections = pick(args.detections.clone(), &file, "detections")?
            .ok_or_else(|| usage("missing required --detections DIR"))?;

        let mut config = EvalConfig::default();
        if let Some(t) = pick(args.iou, &file, "iou")? {
            config.tau = t;
        }
        if let Some(m) = pick(args.matcher.clone(), &file, "matcher")? {
            config.matcher = parse_value("--matcher", &m)?;
        }
        if let Some(m) = pick(args.ap_mode.clone(), &file, "ap-mode")? {
            config.ap_mode = parse_value("--ap-mode", &m)?;
        }
        if let Some(s) = pick(args.brier_support.clone(), &file, "brier-support")? {
            config.brier_support = parse_value("--brier-support", &s)?;
        }
        if let Some(c) = pick(args.min_confidence, &file, "min-confidence")? {
            config.min_confidence = c;
        }
        if let Some(g) = pick(args.grid.clone(), &file, "grid")? {
            config.threshold_grid = parse_value::<ThresholdGrid>("--grid", &g)?;
        }
        if let Some(b) = pick(args.calibration_bins, &file, "calibration-bins")? {
            config.calibration_bins = b;
        }
        if let Some(s) = pick(args.score_transform.clone(), &file, "score-transform")? {
            config.score_transform = parse_value("--score-transform", &s)?;
        }
        if args.no_dontcare {
            config.dontcare.enabled = false;
        } else if let Some(on) = file.last("dontcare") {
            config.dontcare.enabled = parse_value("dontcare", on)?;
        }
        if let Some(t) = pick(args.dontcare_threshold, &file, "dontcare-threshold")? {
            config.dontcare.overlap_threshold = t;
        }
        for pair in pick_list(&args.collapse, &file, "collapse") {
            let (from, to) = pair
                .split_once('=')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .ok_or_else(|| usage(format!("--collapse expects A=B, got `{pair}`")))?;
            config.class_collapse.insert(from.to_string(), to.to_string());
        }
        config.validate().map_err(|e| usage(e.to_string()))?;

        let mut filters = vec![NamedFilter::all()];
        for d in pick_list(&args.difficulties, &file, "difficulty") {
            let level: Difficulty = parse_value("--difficulty", &d)?;
            filters.push(NamedFilter::new(level.as_str(), difficulty_filter(level)));
        }
        for expr in pick_list(&args.filters, &file, "filter") {
            let spec = parse_filter(&expr).map_err(|e| usage(format!("--filter `{expr}`: {e}")))?;
            filters.push(NamedFilter::new(expr.trim(), spec));
        }
        dedup_names(&mut filters);

        let format = match pick(args.format.clone(), &file, "format")? {
            Some(f) => parse_value("--format", &f)?,
            None => ReportFormat::Json,
        };
        let out = pick(args.out.clone(), &file, "out")?;
        if format == ReportFormat::Csv && out.is_none() {
            return Err(usage("--format csv needs --out DIR"));
        }
        let threads = pick(args.threads, &file, "threads")?.unwrap_or_else(default_threads);
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }

        Ok(Self {
            labels,
            detections,
            config,
            classes: pick_list(&args.classes, &file, "class"),
            filters,
            out,
            format,
            threads,
        })
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn dedup_names(filters: &mut Vec<NamedFilter>) {
    let mut seen = std::collections::BTreeSet::new();
    filters.retain(|f| seen.insert(f.name.clone()));
}
