use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FilterError;
use crate::frame::{Attributes, Detection, Label};
use crate::geometry::Box2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Detection,
    Label,
    Both,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Detection => "detection",
            Side::Label => "label",
            Side::Both => "both",
        }
    }

    fn applies_to_detections(&self) -> bool {
        matches!(self, Side::Detection | Side::Both)
    }

    fn applies_to_labels(&self) -> bool {
        matches!(self, Side::Label | Side::Both)
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "detection" => Ok(Side::Detection),
            "label" => Ok(Side::Label),
            "both" => Ok(Side::Both),
            other => Err(format!("unknown side `{other}` (expected label, detection or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Comparator {
    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Eq => "==",
        }
    }
}

/// Outcome of an atom whose attribute is present but declared unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnknownPolicy {
    #[default]
    Fail,
    Pass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub side: Side,
    pub attribute: String,
    pub comparator: Comparator,
    pub value: f64,
    #[serde(default)]
    pub on_unknown: UnknownPolicy,
}

impl Atom {
    pub fn new(side: Side, attribute: &str, comparator: Comparator, value: f64) -> Self {
        Self {
            side,
            attribute: attribute.to_string(),
            comparator,
            value,
            on_unknown: UnknownPolicy::Fail,
        }
    }

    pub fn unknown_passes(mut self) -> Self {
        self.on_unknown = UnknownPolicy::Pass;
        self
    }

    fn eval(&self, value: Lookup) -> Result<bool, FilterError> {
        match value {
            Lookup::Known(v) => Ok(self.comparator.holds(v, self.value)),
            Lookup::Unknown => Ok(self.on_unknown == UnknownPolicy::Pass),
            Lookup::Missing(side) => Err(FilterError::MissingAttribute {
                side,
                attribute: self.attribute.clone(),
            }),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} {} {}",
            self.side.as_str(),
            self.attribute,
            self.comparator.as_str(),
            self.value
        )
    }
}

/// Conjunction of atomic predicates; empty means always true.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FilterSpec {
    pub atoms: Vec<Atom>,
}

impl FilterSpec {
    pub fn always() -> Self {
        Self::default()
    }

    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn is_always(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Conjunction of `self` and `other`.
    pub fn and(mut self, other: &FilterSpec) -> Self {
        self.atoms.extend(other.atoms.iter().cloned());
        self
    }

    pub fn passes_detection(&self, d: &Detection) -> Result<bool, FilterError> {
        for atom in self.atoms.iter().filter(|a| a.side.applies_to_detections()) {
            let v = lookup(&d.bbox, &d.attributes, &atom.attribute, Some(d.score), "detection");
            if !atom.eval(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn passes_label(&self, l: &Label) -> Result<bool, FilterError> {
        for atom in self.atoms.iter().filter(|a| a.side.applies_to_labels()) {
            if !atom.eval(lookup(&l.bbox, &l.attributes, &atom.attribute, None, "label"))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("all");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

enum Lookup {
    Known(f64),
    Unknown,
    Missing(&'static str),
}

fn lookup(
    bbox: &Box2D,
    attributes: &Attributes,
    key: &str,
    score: Option<f64>,
    side: &'static str,
) -> Lookup {
    match key {
        "area" => Lookup::Known(bbox.area()),
        "width" => Lookup::Known(bbox.width()),
        "height_px" | "bbox_height" => Lookup::Known(bbox.height()),
        "score" if score.is_some() => Lookup::Known(score.unwrap_or_default()),
        _ => match attributes.get(key) {
            Some(Some(v)) => Lookup::Known(*v),
            Some(None) => Lookup::Unknown,
            None => Lookup::Missing(side),
        },
    }
}

/// Parses `side.attribute OP value` atoms joined by `&`.
///
/// An empty (or all-whitespace) expression is the always-true filter.
pub fn parse_filter(text: &str) -> Result<FilterSpec, FilterError> {
    let mut atoms = Vec::new();
    if text.trim().is_empty() {
        return Ok(FilterSpec::always());
    }
    let mut offset = 0;
    for part in text.split('&') {
        atoms.push(parse_atom(part, offset)?);
        offset += part.len() + 1;
    }
    Ok(FilterSpec { atoms })
}

fn syntax(position: usize, message: impl Into<String>) -> FilterError {
    FilterError::Syntax {
        position,
        message: message.into(),
    }
}

fn parse_atom(part: &str, base: usize) -> Result<Atom, FilterError> {
    let bytes = part.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let ident = |pos: &mut usize| -> Option<&str> {
        let start = *pos;
        while *pos < bytes.len() && (bytes[*pos].is_ascii_alphanumeric() || bytes[*pos] == b'_') {
            *pos += 1;
        }
        let s = &part[start..*pos];
        (!s.is_empty() && !s.as_bytes()[0].is_ascii_digit()).then_some(s)
    };

    skip_ws(&mut pos);
    let side_at = pos;
    let side = match ident(&mut pos) {
        Some("detection") => Side::Detection,
        Some("label") => Side::Label,
        Some("both") => Side::Both,
        Some(other) => {
            return Err(syntax(
                base + side_at,
                format!("unknown side `{other}` (expected detection, label or both)"),
            ))
        }
        None => return Err(syntax(base + side_at, "expected `side.attribute`")),
    };
    if bytes.get(pos) != Some(&b'.') {
        return Err(syntax(base + pos, "expected `.` after side"));
    }
    pos += 1;
    let attr_at = pos;
    let attribute = ident(&mut pos)
        .ok_or_else(|| syntax(base + attr_at, "expected attribute name"))?
        .to_string();

    skip_ws(&mut pos);
    let op_at = pos;
    let rest = &part[pos..];
    let (comparator, len) = if rest.starts_with("<=") {
        (Comparator::Le, 2)
    } else if rest.starts_with(">=") {
        (Comparator::Ge, 2)
    } else if rest.starts_with("==") {
        (Comparator::Eq, 2)
    } else if rest.starts_with('<') {
        (Comparator::Lt, 1)
    } else if rest.starts_with('>') {
        (Comparator::Gt, 1)
    } else {
        return Err(syntax(base + op_at, "expected one of <, <=, >, >=, =="));
    };
    pos += len;

    skip_ws(&mut pos);
    let value_at = pos;
    let end = part[pos..]
        .find(|c: char| c.is_ascii_whitespace())
        .map_or(part.len(), |i| pos + i);
    let token = &part[pos..end];
    let value = crate::ingest::parse_strict_number(token)
        .ok_or_else(|| syntax(base + value_at, format!("invalid number `{token}`")))?;
    pos = end;
    skip_ws(&mut pos);
    if pos != part.len() {
        return Err(syntax(base + pos, "unexpected trailing input"));
    }
    Ok(Atom::new(side, &attribute, comparator, value))
}
