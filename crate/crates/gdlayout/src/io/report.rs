use gdlayout_core::{CriterionId, Qualities};
use serde::Serialize;

use super::CriterionMap;

/// Quality scores of one drawing, optionally next to a baseline drawing of
/// the same graph (typically the initial layout).
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub graph: String,
    pub source: String,
    pub qualities: Qualities,
    pub baseline: Option<Qualities>,
    /// Criteria whose run ended in an error. Their values describe the last
    /// layout reached and they are flagged as failed.
    pub failed: Vec<CriterionId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Improved,
    Unchanged,
    Worse,
    Failed,
}

impl Flag {
    pub fn compare(c: CriterionId, baseline: f64, value: f64) -> Flag {
        let (better, worse) = if c.higher_is_better() {
            (value > baseline, value < baseline)
        } else {
            (value < baseline, value > baseline)
        };
        match (better, worse) {
            (true, _) => Flag::Improved,
            (_, true) => Flag::Worse,
            _ => Flag::Unchanged,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Flag::Improved => "improved",
            Flag::Unchanged => "unchanged",
            Flag::Worse => "worse",
            Flag::Failed => "failed",
        }
    }
}

impl QualityReport {
    pub fn flag(&self, c: CriterionId) -> Option<Flag> {
        let b = self.baseline?;
        Some(if self.failed.contains(&c) { Flag::Failed } else { Flag::compare(c, b.get(c), self.qualities.get(c)) })
    }
}

/// One row per report. When any report carries a baseline, every criterion
/// gets `<code>_initial` and `<code>_flag` columns as well.
pub fn write_report_csv(reports: &[QualityReport]) -> Vec<u8> {
    let with_baseline = reports.iter().any(|r| r.baseline.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["graph".to_string(), "source".to_string()];
    for c in CriterionId::ALL {
        if with_baseline {
            header.push(format!("{c}_initial"));
        }
        header.push(c.code().to_string());
        if with_baseline {
            header.push(format!("{c}_flag"));
        }
    }
    w.write_record(&header).expect("writing to memory");
    for r in reports {
        let mut row = vec![r.graph.clone(), r.source.clone()];
        for c in CriterionId::ALL {
            if with_baseline {
                row.push(r.baseline.map(|b| b.get(c).to_string()).unwrap_or_default());
            }
            row.push(r.qualities.get(c).to_string());
            if with_baseline {
                row.push(r.flag(c).map(|f| f.as_str().to_string()).unwrap_or_default());
            }
        }
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

#[derive(Serialize)]
struct JsonRow<'a> {
    graph: &'a str,
    source: &'a str,
    qualities: CriterionMap<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<CriterionMap<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flags: Option<CriterionMap<Flag>>,
}

fn as_map(q: &Qualities) -> CriterionMap<f64> {
    CriterionMap(q.iter().collect())
}

/// The same content as the CSV, as a JSON array of objects.
pub fn write_report_json(reports: &[QualityReport]) -> Vec<u8> {
    let rows: Vec<JsonRow> = reports
        .iter()
        .map(|r| JsonRow {
            graph: &r.graph,
            source: &r.source,
            qualities: as_map(&r.qualities),
            initial: r.baseline.as_ref().map(as_map),
            flags: r
                .baseline
                .map(|_| CriterionMap(CriterionId::ALL.iter().map(|&c| (c, r.flag(c).unwrap())).collect())),
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&rows).expect("reports always serialize");
    out.push(b'\n');
    out
}
