//! Inputs shared by the command line and the session service, so both turn
//! the same settings into the same optimizer configuration.

use gdlayout_core::{Family, Mode, OptimizerConfig};
use serde::Deserialize;

/// A generated graph family and its size parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// cycle, path, grid, balanced_tree, complete, complete_bipartite, cube
    /// or dodecahedron.
    #[arg(long = "family")]
    pub name: String,
    /// Parameters as `key=value` pairs, e.g. `w=4,h=5`. Individual flags
    /// take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub params: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub w: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub h: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub branch: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub depth: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub a: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub b: Option<usize>,
}

impl FamilySpec {
    pub fn to_family(&self) -> Result<Family, String> {
        let mut spec = self.clone();
        if let Some(params) = &self.params {
            for part in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (key, value) = part.split_once('=').ok_or_else(|| format!("bad parameter {part:?}"))?;
                let value: usize = value.trim().parse().map_err(|_| format!("bad value in {part:?}"))?;
                let slot = match key.trim() {
                    "n" => &mut spec.n,
                    "w" => &mut spec.w,
                    "h" => &mut spec.h,
                    "branch" => &mut spec.branch,
                    "depth" => &mut spec.depth,
                    "a" => &mut spec.a,
                    "b" => &mut spec.b,
                    other => return Err(format!("unknown parameter {other:?}")),
                };
                slot.get_or_insert(value);
            }
        }
        let need = |v: Option<usize>, what: &str| v.ok_or_else(|| format!("{} needs {what}", self.name));
        Ok(match self.name.replace('-', "_").to_ascii_lowercase().as_str() {
            "cycle" => Family::Cycle(need(spec.n, "n")?),
            "path" => Family::Path(need(spec.n, "n")?),
            "grid" => Family::Grid { w: need(spec.w, "w")?, h: need(spec.h, "h")? },
            "balanced_tree" => {
                Family::BalancedTree { branch: spec.branch.unwrap_or(2), depth: spec.depth.unwrap_or(4) }
            }
            "complete" => Family::Complete(need(spec.n, "n")?),
            "complete_bipartite" => Family::CompleteBipartite(need(spec.a, "a")?, need(spec.b, "b")?),
            "cube" => Family::Cube,
            "dodecahedron" => Family::Dodecahedron,
            other => return Err(format!("unknown family {other:?}")),
        })
    }
}

pub fn parse_mode(text: &str) -> Result<Mode, String> {
    match text.to_ascii_lowercase().as_str() {
        "full" => Ok(Mode::Full),
        "stochastic" | "sgd" => Ok(Mode::Stochastic),
        other => Err(format!("unknown mode {other:?}")),
    }
}

/// Optimizer knobs exposed to users. Everything else keeps its default.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub seed: u64,
    pub iters: usize,
    pub lr: f64,
    pub mode: String,
    pub batch: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        RunSettings { seed: 0, iters: d.iters, lr: d.lr, mode: "full".into(), batch: d.batch }
    }
}

impl RunSettings {
    pub fn config(&self) -> Result<OptimizerConfig, String> {
        let config = OptimizerConfig {
            seed: self.seed,
            iters: self.iters,
            lr: self.lr,
            mode: parse_mode(&self.mode)?,
            batch: self.batch,
            ..OptimizerConfig::default()
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str) -> FamilySpec {
        FamilySpec { name: name.into(), ..FamilySpec::default() }
    }

    #[test]
    fn families() {
        assert_eq!(FamilySpec { n: Some(10), ..spec("cycle") }.to_family(), Ok(Family::Cycle(10)));
        let grid = FamilySpec { params: Some("w=4, h=5".into()), ..spec("grid") };
        assert_eq!(grid.to_family(), Ok(Family::Grid { w: 4, h: 5 }));
        let flag_wins = FamilySpec { params: Some("w=4,h=5".into()), w: Some(2), ..spec("grid") };
        assert_eq!(flag_wins.to_family(), Ok(Family::Grid { w: 2, h: 5 }));
        assert_eq!(spec("balanced-tree").to_family(), Ok(Family::BalancedTree { branch: 2, depth: 4 }));
        assert!(spec("grid").to_family().is_err());
        assert!(spec("petersen").to_family().unwrap_err().contains("unknown family"));
        assert!(FamilySpec { params: Some("q=1".into()), ..spec("cube") }.to_family().is_err());
    }

    #[test]
    fn run_settings() {
        let c = RunSettings { mode: "stochastic".into(), seed: 3, ..RunSettings::default() }.config().unwrap();
        assert_eq!(c.mode, Mode::Stochastic);
        assert_eq!(c.seed, 3);
        assert!(RunSettings { lr: -1.0, ..RunSettings::default() }.config().is_err());
        assert!(RunSettings { mode: "adam".into(), ..RunSettings::default() }.config().is_err());
    }
}
