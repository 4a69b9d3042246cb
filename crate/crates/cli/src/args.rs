use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "deteval", version, about = "Object-detection evaluation with optimal association")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a detection set against labels and write a report.
    Evaluate(EvalArgs),
    /// List frames where greedy and optimal association disagree.
    Compare(EvalArgs),
    /// Export PR, recall-vs-FP-per-frame and calibration curves.
    Curves(EvalArgs),
    /// Sweep a minimum-size filter and compare stable against naive filtering.
    SweepFilter(SweepArgs),
    /// Search random scenarios for greedy disagreements and naive-filter instabilities.
    Fuzz(FuzzArgs),
}

/// Flags shared by every dataset command. Everything is optional here so
/// that a `--config` file can supply values; see `settings`.
#[derive(Debug, Args, Default)]
pub struct EvalArgs {
    /// Directory of KITTI label files (`<frame_id>.txt`).
    #[arg(long, value_name = "DIR")]
    pub labels: Option<PathBuf>,
    /// Directory of KITTI result files (`<frame_id>.txt`).
    #[arg(long, value_name = "DIR")]
    pub detections: Option<PathBuf>,
    /// key=value file; explicit flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Minimum IoU for a candidate pair.
    #[arg(long = "iou", value_name = "TAU")]
    pub iou: Option<f64>,
    /// optimal | greedy-confidence | brute-force
    #[arg(long)]
    pub matcher: Option<String>,
    /// Class to evaluate; repeatable. Defaults to every class present.
    #[arg(long = "class", value_name = "NAME")]
    pub classes: Vec<String>,
    /// Rename class A to B before evaluation; repeatable.
    #[arg(long = "collapse", value_name = "A=B")]
    pub collapse: Vec<String>,
    /// easy | medium | hard; repeatable.
    #[arg(long = "difficulty")]
    pub difficulties: Vec<String>,
    /// Filter expression such as `label.distance < 30 & both.height_px >= 25`; repeatable.
    #[arg(long = "filter", value_name = "EXPR")]
    pub filters: Vec<String>,
    /// all-points | eleven-point | forty-one-point
    #[arg(long)]
    pub ap_mode: Option<String>,
    /// labels | detections | union
    #[arg(long)]
    pub brier_support: Option<String>,
    #[arg(long)]
    pub min_confidence: Option<f64>,
    /// unique | fixed:N
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub calibration_bins: Option<usize>,
    /// none | sigmoid | minmax
    #[arg(long)]
    pub score_transform: Option<String>,
    /// Keep detections inside DontCare regions.
    #[arg(long)]
    pub no_dontcare: bool,
    #[arg(long, value_name = "FRACTION")]
    pub dontcare_threshold: Option<f64>,
    /// Output file (JSON) or directory (CSV). JSON goes to stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// area | width | height_px
    #[arg(long)]
    pub attribute: String,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    /// Which records the filter applies to: label | detection | both
    #[arg(long, default_value = "both")]
    pub side: String,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Number of scenarios.
    #[arg(long)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Overlap bias of the scenario generator, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub bias: f64,
    /// First scenario seed; scenario i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 7)]
    pub max_boxes: usize,
    /// Random filters tried per scenario.
    #[arg(long, default_value_t = 4)]
    pub filters_per_scenario: usize,
    /// Smallest witnesses kept per kind.
    #[arg(long, default_value_t = 5)]
    pub keep: usize,
    /// Directory for the report and witness fixtures; report goes to stdout when omitted.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}
