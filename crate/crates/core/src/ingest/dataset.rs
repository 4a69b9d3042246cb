use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use super::kitti::{parse_detection_line, parse_label_line, DetectionRecord, LabelRecord};
use crate::error::IngestError;

#[derive(Debug, Clone, PartialEq)]
pub struct FramePair {
    pub frame_id: String,
    pub labels: Vec<LabelRecord>,
    pub detections: Vec<DetectionRecord>,
}

/// Frames in lexicographic `frame_id` order, parsed lazily.
#[derive(Debug)]
pub struct DatasetIter {
    labels_dir: PathBuf,
    detections_dir: PathBuf,
    ids: std::vec::IntoIter<String>,
}

impl DatasetIter {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.len() == 0
    }
}

impl Iterator for DatasetIter {
    type Item = Result<FramePair, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        let id = self.ids.next()?;
        Some(load_frame(&self.labels_dir, &self.detections_dir, id))
    }
}

fn stems(dir: &Path) -> Result<BTreeSet<String>, IngestError> {
    let io = |source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut out = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string());
            }
        }
    }
    Ok(out)
}

/// Frames are the union of `<frame_id>.txt` stems in both directories. A
/// frame missing on one side gets an empty list there.
pub fn load_dataset(labels_dir: &Path, detections_dir: &Path) -> Result<DatasetIter, IngestError> {
    let mut ids = stems(labels_dir)?;
    ids.extend(stems(detections_dir)?);
    Ok(DatasetIter {
        labels_dir: labels_dir.to_path_buf(),
        detections_dir: detections_dir.to_path_buf(),
        ids: ids.into_iter().collect::<Vec<_>>().into_iter(),
    })
}

fn read_lines<T>(
    path: &Path,
    parse: impl Fn(&str, usize) -> Result<T, IngestError>,
) -> Result<Vec<T>, IngestError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse(l, i + 1).map_err(|e| e.with_file(path)))
        .collect()
}

fn load_frame(labels_dir: &Path, detections_dir: &Path, id: String) -> Result<FramePair, IngestError> {
    let file = format!("{id}.txt");
    Ok(FramePair {
        labels: read_lines(&labels_dir.join(&file), parse_label_line)?,
        detections: read_lines(&detections_dir.join(&file), parse_detection_line)?,
        frame_id: id,
    })
}
