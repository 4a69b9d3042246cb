use serde::{Deserialize, Serialize};

use super::spec::{Atom, Comparator, FilterSpec, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub fn as_str(&self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

impl std::str::FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "easy" => Ok(Difficulty::Easy),
            "medium" | "moderate" => Ok(Difficulty::Medium),
            "hard" => Ok(Difficulty::Hard),
            other => Err(format!("unknown difficulty `{other}` (expected easy, medium or hard)")),
        }
    }
}

/// Per-level bounds, indexed easy/medium/hard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyThresholds {
    pub min_height_px: [f64; 3],
    pub max_occlusion: [f64; 3],
    pub max_truncation: [f64; 3],
}

impl Default for DifficultyThresholds {
    /// The bounds of the KITTI object devkit (`evaluate_object.cpp`).
    fn default() -> Self {
        Self {
            min_height_px: [40.0, 25.0, 25.0],
            max_occlusion: [0.0, 1.0, 2.0],
            max_truncation: [0.15, 0.30, 0.50],
        }
    }
}

pub fn difficulty_filter(level: Difficulty) -> FilterSpec {
    difficulty_filter_with(level, &DifficultyThresholds::default())
}

/// Labels must meet all three bounds; detections only the height bound.
/// Unknown occlusion fails easy and medium and passes hard.
pub fn difficulty_filter_with(level: Difficulty, t: &DifficultyThresholds) -> FilterSpec {
    let i = level.index();
    let mut occlusion = Atom::new(Side::Label, "occlusion", Comparator::Le, t.max_occlusion[i]);
    if level == Difficulty::Hard {
        occlusion = occlusion.unknown_passes();
    }
    FilterSpec::new(vec![
        Atom::new(Side::Both, "height_px", Comparator::Ge, t.min_height_px[i]),
        occlusion,
        Atom::new(Side::Label, "truncation", Comparator::Le, t.max_truncation[i]),
    ])
}
