use std::collections::BTreeMap;

use gdlayout_core::{CriterionId, WeightSchedule, Weights};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IoError;

/// A weight schedule as stored on disk: `{"ST": [[0, 1.0]], "CN": [[999, 0], [1000, 100]]}`.
///
/// Criteria are written in their canonical order; tracks without
/// breakpoints are omitted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScheduleFile(pub WeightSchedule);

impl Serialize for ScheduleFile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let tracks: Vec<_> = CriterionId::ALL.iter().filter(|c| !self.0.track(**c).is_empty()).collect();
        let mut map = s.serialize_map(Some(tracks.len()))?;
        for c in tracks {
            map.serialize_entry(c.code(), self.0.track(*c))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ScheduleFile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, Vec<(usize, f64)>>::deserialize(d)?;
        let mut schedule = WeightSchedule::new();
        for (name, track) in raw {
            let c: CriterionId = name.parse().map_err(D::Error::custom)?;
            if !schedule.track(c).is_empty() {
                return Err(D::Error::custom(format!("criterion {c} listed twice")));
            }
            schedule.set_track(c, track).map_err(D::Error::custom)?;
        }
        Ok(ScheduleFile(schedule))
    }
}

pub fn read_schedule(bytes: &[u8]) -> Result<WeightSchedule, IoError> {
    Ok(serde_json::from_slice::<ScheduleFile>(bytes)?.0)
}

pub fn write_schedule(schedule: &WeightSchedule) -> Vec<u8> {
    let mut out = serde_json::to_vec(&ScheduleFile(schedule.clone())).expect("schedules always serialize");
    out.push(b'\n');
    out
}

/// Parses the `ST=1,CN=0.5` shorthand. Zero weights are allowed; at least
/// one weight must be positive.
pub fn parse_weights(text: &str) -> Result<Weights, IoError> {
    let mut weights = Weights::zero();
    let mut seen = [false; 9];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| IoError::field("weights", format!("expected NAME=VALUE, got {part:?}")))?;
        let c: CriterionId = name.parse()?;
        let w: f64 =
            value.trim().parse().map_err(|_| IoError::field("weights", format!("{c}: {value:?} is not a number")))?;
        if std::mem::replace(&mut seen[c.index()], true) {
            return Err(IoError::field("weights", format!("{c} given twice")));
        }
        weights.set(c, w);
    }
    weights.validate()?;
    if weights.is_idle() {
        return Err(IoError::field("weights", "no active criteria"));
    }
    Ok(weights)
}
