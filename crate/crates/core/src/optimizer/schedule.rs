use alloc::format;
use alloc::vec::Vec;

use crate::criteria::CriterionId;
use crate::{Error, Result};

/// One weight per criterion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Weights(pub [f64; 9]);

impl Weights {
    pub fn zero() -> Self {
        Weights([0.0; 9])
    }

    pub fn single(c: CriterionId, w: f64) -> Self {
        let mut out = Weights::zero();
        out.set(c, w);
        out
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (CriterionId, f64)>) -> Result<Self> {
        let mut out = Weights::zero();
        for (c, w) in pairs {
            out.set(c, w);
        }
        out.validate()?;
        Ok(out)
    }

    #[inline]
    pub fn get(&self, c: CriterionId) -> f64 {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: CriterionId, w: f64) {
        self.0[c.index()] = w;
    }

    /// Criteria with a positive weight, in canonical order.
    pub fn active(&self) -> impl Iterator<Item = (CriterionId, f64)> + '_ {
        CriterionId::ALL.iter().map(move |&c| (c, self.get(c))).filter(|&(_, w)| w > 0.0)
    }

    pub fn is_idle(&self) -> bool {
        self.active().next().is_none()
    }

    pub fn validate(&self) -> Result<()> {
        for c in CriterionId::ALL {
            let w = self.get(c);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "weight for {c} must be a finite non-negative number, got {w}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-criterion piecewise-linear weights over iterations.
///
/// Each criterion has a list of `(iteration, weight)` breakpoints. Before the
/// first breakpoint the first weight holds, after the last the last one
/// does, and in between weights are interpolated linearly. A criterion with
/// no breakpoints has weight zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightSchedule {
    tracks: [Vec<(usize, f64)>; 9],
}

impl WeightSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same weights at every iteration.
    pub fn constant(weights: Weights) -> Self {
        let mut s = WeightSchedule::new();
        for (c, w) in weights.active() {
            s.tracks[c.index()] = alloc::vec![(0, w)];
        }
        s
    }

    pub fn with_track(mut self, c: CriterionId, breakpoints: Vec<(usize, f64)>) -> Result<Self> {
        self.set_track(c, breakpoints)?;
        Ok(self)
    }

    pub fn set_track(&mut self, c: CriterionId, breakpoints: Vec<(usize, f64)>) -> Result<()> {
        for pair in breakpoints.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidParameter(format!(
                    "schedule for {c}: breakpoint iterations must increase strictly"
                )));
            }
        }
        if let Some(&(_, w)) = breakpoints.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "schedule for {c}: weight {w} is not a finite non-negative number"
            )));
        }
        self.tracks[c.index()] = breakpoints;
        Ok(())
    }

    pub fn track(&self, c: CriterionId) -> &[(usize, f64)] {
        &self.tracks[c.index()]
    }

    /// Whether no criterion ever receives a positive weight.
    pub fn is_empty(&self) -> bool {
        self.tracks.iter().all(|t| t.iter().all(|&(_, w)| w == 0.0))
    }

    /// Iteration after which no weight changes any more.
    pub fn settled_at(&self) -> usize {
        self.tracks.iter().filter_map(|t| t.last().map(|b| b.0)).max().unwrap_or(0)
    }

    pub fn at(&self, iteration: usize) -> Weights {
        let mut out = Weights::zero();
        for c in CriterionId::ALL {
            out.set(c, interpolate(self.track(c), iteration));
        }
        out
    }
}

fn interpolate(track: &[(usize, f64)], t: usize) -> f64 {
    let (first, last) = match (track.first(), track.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return 0.0,
    };
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let upper = track.iter().position(|&(it, _)| it > t).unwrap_or(track.len() - 1);
    let (t0, w0) = track[upper - 1];
    let (t1, w1) = track[upper];
    let frac = (t - t0) as f64 / (t1 - t0) as f64;
    w0 + frac * (w1 - w0)
}
