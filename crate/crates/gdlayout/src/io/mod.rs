//! On-disk formats: graphs, layouts and schedules as JSON, quality reports as
//! CSV or JSON, drawings as SVG.
//!
//! Node order in a graph file defines node indices everywhere else, so a
//! layout file is just a list of positions in that order.

mod graph;
mod layout;
mod report;
mod schedule;
mod svg;

use std::path::{Path, PathBuf};

use gdlayout_core::CriterionId;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub use self::graph::{read_graph, write_graph, GraphFile, NamedGraph};
pub use self::layout::{read_layout, read_layout_for, write_layout, LayoutFile, LayoutMeta};
pub use self::report::{write_report_csv, write_report_json, Flag, QualityReport};
pub use self::schedule::{parse_weights, read_schedule, write_schedule, ScheduleFile};
pub use self::svg::{export_svg, SvgOptions};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Engine(#[from] gdlayout_core::Error),
}

impl IoError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Field { field: field.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|source| IoError::File { path: path.to_owned(), source })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, bytes).map_err(|source| IoError::File { path: path.to_owned(), source })
}

/// Per-criterion values, serialized as a JSON object keyed by criterion code
/// in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionMap<T>(pub Vec<(CriterionId, T)>);

impl<T: Serialize> Serialize for CriterionMap<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (c, v) in &self.0 {
            map.serialize_entry(c.code(), v)?;
        }
        map.end()
    }
}

impl<T: Copy> CriterionMap<T> {
    pub fn from_options(values: &[Option<T>; 9]) -> Self {
        CriterionMap(CriterionId::ALL.iter().filter_map(|&c| Some((c, values[c.index()]?))).collect())
    }
}
