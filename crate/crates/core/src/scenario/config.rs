//! Experiment files: one TOML document per scenario.
//!
//! ```toml
//! kind = "transport"     # validate | bands | isoenergy | transform | transport | front
//! seed = 7
//! level = 1              # approximant index, default: deepest
//!
//! [potential]            # see `potentials::config`
//! kind = "free"
//!
//! [grid]
//! length = [128.0, 128.0]
//! resolution = [512, 512]
//!
//! [branch]               # optional, defaults shown in `BranchOptions`
//! theta = 0.9
//!
//! [packet]
//! profile = { shape = "gaussian", center = [6.0, 0.0], sigma = 0.4 }
//! delta_cells = 4.0
//!
//! [transport]
//! t_grid = [0.2, 0.4, 0.8, 2.0]
//! dt = 0.01
//! sample_every = 1
//! ```
//!
//! Every table rejects unknown keys. Errors carry the line of the offending
//! key (or of its table when the key is missing).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bloch::BranchOptions;
use crate::error::{Error, Result};
use crate::potentials::config::PotentialTable;
use crate::potentials::A1Options;
use crate::transform::ProfileShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Validate,
    Bands,
    Isoenergy,
    Transform,
    Transport,
    Front,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Validate => "validate",
            ScenarioKind::Bands => "bands",
            ScenarioKind::Isoenergy => "isoenergy",
            ScenarioKind::Transform => "transform",
            ScenarioKind::Transport => "transport",
            ScenarioKind::Front => "front",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTable {
    pub length: Option<[f64; 2]>,
    pub resolution: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketTable {
    pub profile: ProfileShape,
    /// `δ` of the cutoff in dual-grid cells.
    #[serde(default = "default_delta_cells")]
    pub delta_cells: f64,
}

fn default_delta_cells() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateTable {
    #[serde(default = "default_n0")]
    pub n0: f64,
    #[serde(default = "default_n1")]
    pub n1: u64,
    #[serde(default = "default_search_bound")]
    pub search_bound: u64,
    /// Also sample the potential on `[grid]` and report its range and mean.
    #[serde(default)]
    pub sample: bool,
}

fn default_n0() -> f64 {
    A1Options::default().n0
}

fn default_n1() -> u64 {
    A1Options::default().n1_floor
}

fn default_search_bound() -> u64 {
    A1Options::default().search_bound
}

impl Default for ValidateTable {
    fn default() -> Self {
        Self { n0: default_n0(), n1: default_n1(), search_bound: default_search_bound(), sample: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsTable {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub cells: [usize; 2],
    /// Extension blend width in momentum units; default three cells.
    pub blend_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoenergyTable {
    pub lambdas: Vec<f64>,
    #[serde(default = "default_directions")]
    pub directions: usize,
}

fn default_directions() -> usize {
    720
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformTable {
    #[serde(default = "default_random_fields")]
    pub random_fields: usize,
    #[serde(default = "default_iterations")]
    pub closeness_iterations: usize,
}

fn default_random_fields() -> usize {
    20
}

fn default_iterations() -> usize {
    30
}

impl Default for TransformTable {
    fn default() -> Self {
        Self { random_fields: default_random_fields(), closeness_iterations: default_iterations() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportTable {
    pub t_grid: Vec<f64>,
    /// Defaults to `0.2 / max |k|²` of the grid.
    pub dt: Option<f64>,
    #[serde(default = "one")]
    pub sample_every: usize,
    /// Slack of the upper-bound speed in profile momentum widths: the bound
    /// uses `v = max |∇λ| + slack · width / 2`.
    #[serde(default = "default_slack")]
    pub slack_widths: f64,
}

fn one() -> usize {
    1
}

fn default_slack() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontTable {
    pub t: f64,
    pub dt: Option<f64>,
    pub bin_width: f64,
    pub tail_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    pub level: Option<usize>,
    pub potential: PotentialTable,
    pub grid: Option<GridTable>,
    #[serde(default)]
    pub branch: BranchOptions,
    pub packet: Option<PacketTable>,
    pub validate: Option<ValidateTable>,
    pub bands: Option<BandsTable>,
    pub isoenergy: Option<IsoenergyTable>,
    pub transform: Option<TransformTable>,
    pub transport: Option<TransportTable>,
    pub front: Option<FrontTable>,
}

/// Schema error tied to a dotted key such as `grid.resolution`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub key: String,
    pub message: String,
}

impl SchemaError {
    fn missing(key: &str) -> Self {
        Self { key: key.into(), message: format!("missing key `{key}`") }
    }

    fn invalid(key: &str, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

/// 1-based line of `key` (dotted) in `text`; falls back to its table
/// header, then to line 1.
pub fn locate_key(text: &str, key: &str) -> usize {
    let parts: Vec<&str> = key.split('.').collect();
    let (table, leaf) = match parts.as_slice() {
        [leaf] => (None, *leaf),
        [t, leaf, ..] => (Some(*t), *leaf),
        [] => return 1,
    };
    let mut current: Option<String> = None;
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[') {
            let name = h.trim_start_matches('[').split(']').next().unwrap_or("").trim().to_string();
            if Some(name.as_str()) == table {
                header_line = Some(i + 1);
            }
            current = Some(name);
            continue;
        }
        let in_table = match table {
            None => current.is_none(),
            Some(t) => current.as_deref() == Some(t),
        };
        let key_here = line.split('=').next().map(str::trim) == Some(leaf) && line.contains('=');
        if in_table && key_here {
            return i + 1;
        }
        // inline table form `table = { leaf = ... }` at top level
        if table.is_some() && current.is_none() && line.split('=').next().map(str::trim) == table && line.contains(leaf) {
            return i + 1;
        }
    }
    header_line.unwrap_or(1)
}

impl ExperimentConfig {
    /// Parses and checks a configuration. Errors name the file and line.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].lines().count().max(1));
            let line = match e.span() {
                Some(s) if text[..s.start.min(text.len())].ends_with('\n') => line + 1,
                _ => line,
            };
            Error::Config { path: path.to_path_buf(), message: format!("line {line}: {}", e.message()) }
        })?;
        cfg.check().map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: format!("line {}: {}", locate_key(text, &e.key), e.message),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn grid_table(&self) -> Option<([f64; 2], [usize; 2])> {
        let g = self.grid.as_ref()?;
        Some((g.length?, g.resolution?))
    }

    fn need_grid(&self) -> std::result::Result<(), SchemaError> {
        let Some(g) = &self.grid else { return Err(SchemaError::missing("grid")) };
        let Some(len) = g.length else { return Err(SchemaError::missing("grid.length")) };
        let Some(res) = g.resolution else { return Err(SchemaError::missing("grid.resolution")) };
        if !len.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(SchemaError::invalid("grid.length", "`grid.length` must be positive"));
        }
        if !res.iter().all(|n| *n >= 2 && n.is_power_of_two()) {
            return Err(SchemaError::invalid("grid.resolution", "`grid.resolution` must be powers of two"));
        }
        Ok(())
    }

    fn need_packet(&self) -> std::result::Result<&PacketTable, SchemaError> {
        let p = self.packet.as_ref().ok_or_else(|| SchemaError::missing("packet"))?;
        p.profile.validate().map_err(|e| SchemaError::invalid("packet.profile", e.to_string()))?;
        if !(p.delta_cells >= 2.0) {
            return Err(SchemaError::invalid("packet.delta_cells", "`packet.delta_cells` must be at least 2"));
        }
        Ok(p)
    }

    fn check(&self) -> std::result::Result<(), SchemaError> {
        let spec = self.potential.build().map_err(|e| SchemaError::invalid("potential.kind", e.to_string()))?;
        if let Some(l) = self.level {
            if l == 0 || l > spec.levels() {
                return Err(SchemaError::invalid("level", format!("`level` must lie in 1..={}", spec.levels())));
            }
        }
        let b = &self.branch;
        if !(b.theta > 0.0 && b.theta <= 1.0) {
            return Err(SchemaError::invalid("branch.theta", "`branch.theta` must lie in (0, 1]"));
        }
        if !(b.gap_floor >= 0.0) {
            return Err(SchemaError::invalid("branch.gap_floor", "`branch.gap_floor` must be nonnegative"));
        }
        match self.kind {
            ScenarioKind::Validate => {
                if let Some(v) = &self.validate {
                    if !(v.n0 > 0.0) {
                        return Err(SchemaError::invalid("validate.n0", "`validate.n0` must be positive"));
                    }
                    if v.search_bound < v.n1 {
                        return Err(SchemaError::invalid("validate.search_bound", "`validate.search_bound` must be >= `validate.n1`"));
                    }
                    if v.sample {
                        self.need_grid()?;
                    }
                }
            }
            ScenarioKind::Bands => {
                let t = self.bands.as_ref().ok_or_else(|| SchemaError::missing("bands"))?;
                if !(0..2).all(|a| t.hi[a] > t.lo[a] && t.cells[a] > 0) {
                    return Err(SchemaError::invalid("bands.cells", "`bands` needs lo < hi and at least one cell per axis"));
                }
            }
            ScenarioKind::Isoenergy => {
                let t = self.isoenergy.as_ref().ok_or_else(|| SchemaError::missing("isoenergy"))?;
                if t.lambdas.is_empty() || !t.lambdas.iter().all(|l| *l > 0.0 && l.is_finite()) {
                    return Err(SchemaError::invalid("isoenergy.lambdas", "`isoenergy.lambdas` must be positive"));
                }
                if t.directions < 3 {
                    return Err(SchemaError::invalid("isoenergy.directions", "`isoenergy.directions` must be at least 3"));
                }
            }
            ScenarioKind::Transform => {
                self.need_grid()?;
                self.need_packet()?;
            }
            ScenarioKind::Transport => {
                self.need_grid()?;
                self.need_packet()?;
                let t = self.transport.as_ref().ok_or_else(|| SchemaError::missing("transport"))?;
                if t.t_grid.is_empty() || !t.t_grid.iter().all(|v| *v > 0.0) || t.t_grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(SchemaError::invalid("transport.t_grid", "`transport.t_grid` must be positive and increasing"));
                }
                if t.dt.is_some_and(|d| !(d > 0.0)) {
                    return Err(SchemaError::invalid("transport.dt", "`transport.dt` must be positive"));
                }
                if t.sample_every == 0 {
                    return Err(SchemaError::invalid("transport.sample_every", "`transport.sample_every` must be positive"));
                }
            }
            ScenarioKind::Front => {
                self.need_grid()?;
                self.need_packet()?;
                let t = self.front.as_ref().ok_or_else(|| SchemaError::missing("front"))?;
                if !(t.t > 0.0 && t.bin_width > 0.0 && t.tail_radius > 0.0) {
                    return Err(SchemaError::invalid("front.t", "`front.t`, `front.bin_width`, `front.tail_radius` must be positive"));
                }
                if t.dt.is_some_and(|d| !(d > 0.0)) {
                    return Err(SchemaError::invalid("front.dt", "`front.dt` must be positive"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = r#"kind = "transport"
seed = 3

[potential]
kind = "free"

[grid]
length = [16.0, 16.0]
resolution = [32, 32]

[packet]
profile = { shape = "gaussian", center = [2.0, 0.0], sigma = 0.5 }

[transport]
t_grid = [0.1, 0.2, 0.4, 0.6, 1.0]
"#;

    #[test]
    fn parses_a_transport_scenario() {
        let c = ExperimentConfig::parse(FREE, Path::new("t.toml")).unwrap();
        assert_eq!(c.kind, ScenarioKind::Transport);
        assert_eq!(c.seed, 3);
        assert_eq!(c.packet.unwrap().delta_cells, 4.0);
        assert_eq!(c.branch, BranchOptions::default());
    }

    #[test]
    fn missing_resolution_names_the_key_and_line() {
        let text = FREE.replace("resolution = [32, 32]\n", "");
        let e = ExperimentConfig::parse(&text, Path::new("t.toml")).unwrap_err().to_string();
        assert!(e.contains("grid.resolution"), "{e}");
        assert!(e.contains("line 7:"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let text = FREE.replace("seed = 3", "seed = 3\ncolour = 1");
        let e = ExperimentConfig::parse(&text, Path::new("t.toml")).unwrap_err().to_string();
        assert!(e.contains("colour") && e.contains("line 3:"), "{e}");
        let text = FREE.replace("sigma = 0.5", "sigma = -1.0");
        let e = ExperimentConfig::parse(&text, Path::new("t.toml")).unwrap_err().to_string();
        assert!(e.contains("line 12:"), "{e}");
    }
}
