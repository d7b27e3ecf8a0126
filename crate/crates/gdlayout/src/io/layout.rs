use gdlayout_core::{Graph, Layout, Vec2, WeightSchedule};
use serde::{Deserialize, Serialize};

use super::{IoError, ScheduleFile};

/// The JSON shape of a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    pub positions: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<LayoutMeta>,
}

/// How a layout was produced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleFile>,
}

impl LayoutMeta {
    pub fn new(seed: u64, iterations: usize, schedule: &WeightSchedule) -> Self {
        LayoutMeta { seed: Some(seed), iterations: Some(iterations), schedule: Some(ScheduleFile(schedule.clone())) }
    }
}

pub fn read_layout(bytes: &[u8]) -> Result<(Layout, Option<LayoutMeta>), IoError> {
    let file: LayoutFile = serde_json::from_slice(bytes)?;
    if let Some(i) = file.positions.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(IoError::field(format!("positions[{i}]"), "coordinate is not finite"));
    }
    let layout = Layout::new(file.positions.into_iter().map(Vec2::from).collect())?;
    Ok((layout, file.meta))
}

/// Reads a layout and checks that it has one row per node of `g`.
pub fn read_layout_for(bytes: &[u8], g: &Graph) -> Result<(Layout, Option<LayoutMeta>), IoError> {
    let (layout, meta) = read_layout(bytes)?;
    layout.check_for(g)?;
    Ok((layout, meta))
}

/// Serializes with the shortest decimal form that reads back to the same
/// `f64`, so a round trip is exact.
pub fn write_layout(layout: &Layout, meta: Option<&LayoutMeta>) -> Vec<u8> {
    let file = LayoutFile { positions: layout.positions().iter().map(|&p| p.into()).collect(), meta: meta.cloned() };
    let mut out = serde_json::to_vec(&file).expect("finite layouts always serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gdlayout_core::{random_layout, CriterionId, Weights};

    #[test]
    fn two_node_round_trip() {
        let l = Layout::new(vec![Vec2::new(0.0, 1.0), Vec2::new(-2.5, 3.0)]).unwrap();
        let (back, meta) = read_layout(&write_layout(&l, None)).unwrap();
        assert_eq!(back, l);
        assert_eq!(meta, None);
    }

    #[test]
    fn precision_is_kept() {
        let l = random_layout(50, 3);
        let meta = LayoutMeta::new(3, 10, &WeightSchedule::constant(Weights::single(CriterionId::Stress, 1.0)));
        let (back, m) = read_layout(&write_layout(&l, Some(&meta))).unwrap();
        assert_eq!(m, Some(meta));
        for (a, b) in back.positions().iter().zip(l.positions()) {
            assert!((a.x - b.x).abs() <= 1e-12 && (a.y - b.y).abs() <= 1e-12);
        }
    }

    #[test]
    fn length_must_match_graph() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let text = write_layout(&random_layout(2, 0), None);
        assert!(read_layout_for(&text, &g).is_err());
        assert!(read_layout(br#"{"positions":[[0,null]]}"#).is_err());
    }
}
