//! Run configuration: one JSON document, with command-line overrides.

use std::path::{Path, PathBuf};

use qcompress_core::circuit::{build_template, Arch};
use qcompress_core::compress::{CostKind, HyperGrid};
use qcompress_core::model::{ModelKind, ModelSpec};
use qcompress_core::OPERATOR_CEILING;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Result, RunError};

/// Hyperparameter grid: a preset name (`"paper"` or `"reduced"`) or explicit
/// value lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Preset(String),
    Custom(HyperGrid),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Preset("reduced".into())
    }
}

impl GridSpec {
    /// The grid for an architecture (presets differ between blocked and TIVB).
    pub fn resolve(&self, arch: Arch) -> Result<HyperGrid> {
        match self {
            GridSpec::Preset(name) => match name.as_str() {
                "paper" => Ok(HyperGrid::paper(arch.is_blocked())),
                "reduced" => Ok(HyperGrid::reduced(arch.is_blocked())),
                other => Err(RunError::InvalidConfig(format!("unknown grid preset {other:?}"))),
            },
            GridSpec::Custom(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: Option<String>,
    /// Sizes optimized in sequence.
    #[serde(default)]
    pub ladder: Vec<usize>,
    /// Sizes for `evaluate`.
    #[serde(default)]
    pub eval_sizes: Vec<usize>,
    #[serde(default)]
    pub archs: Vec<String>,
    /// `M` (or `M̃`) per architecture.
    #[serde(default)]
    pub depths: Vec<usize>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    /// Adam iterations per ladder size.
    #[serde(default)]
    pub iterations: Vec<usize>,
    /// `"full"` or `"restricted"`.
    #[serde(default = "default_cost")]
    pub cost: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Trotter steps for baseline rows; derived from the depth for blocked
    /// architectures when absent.
    #[serde(default)]
    pub trotter_steps: Option<usize>,
    /// Reference product state for observables (`NEEL` or `NEEL_QLM`).
    #[serde(default)]
    pub state: Option<String>,
}

fn default_cost() -> String {
    "full".into()
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

fn default_workers() -> usize {
    1
}

/// Command-line values that replace config keys when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub ladder: Option<Vec<usize>>,
    pub eval_sizes: Option<Vec<usize>>,
    pub archs: Option<Vec<String>>,
    pub depths: Option<Vec<usize>>,
    pub times: Option<Vec<f64>>,
    pub grid: Option<String>,
    pub iterations: Option<Vec<usize>>,
    pub cost: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub trotter_steps: Option<usize>,
    pub state: Option<String>,
}

impl Overrides {
    fn apply(&self, doc: &mut Map<String, Value>) {
        let mut set = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                doc.insert(key.into(), v);
            }
        };
        set("model", self.model.clone().map(Value::from));
        set("ladder", self.ladder.clone().map(Value::from));
        set("eval_sizes", self.eval_sizes.clone().map(Value::from));
        set("archs", self.archs.clone().map(Value::from));
        set("depths", self.depths.clone().map(Value::from));
        set("times", self.times.clone().map(Value::from));
        set("grid", self.grid.clone().map(Value::from));
        set("iterations", self.iterations.clone().map(Value::from));
        set("cost", self.cost.clone().map(Value::from));
        set("seed", self.seed.map(Value::from));
        set("out", self.out.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())));
        set("workers", self.workers.map(Value::from));
        set("trotter_steps", self.trotter_steps.map(Value::from));
        set("state", self.state.clone().map(Value::from));
    }
}

impl RunConfig {
    /// Reads the JSON file (if any) and applies the overrides on top.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| RunError::InvalidConfig(format!("{}: {e}", p.display())))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(RunError::InvalidConfig(format!("{}: expected a JSON object", p.display()))),
                    Err(e) => return Err(RunError::InvalidConfig(format!("{}: {e}", p.display()))),
                }
            }
            None => Map::new(),
        };
        overrides.apply(&mut doc);
        serde_json::from_value(Value::Object(doc)).map_err(|e| RunError::InvalidConfig(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| RunError::InvalidConfig(e.to_string()))
    }

    pub fn model_kind(&self) -> Result<ModelKind> {
        let name = self.model.as_deref().ok_or_else(|| RunError::InvalidConfig("missing model".into()))?;
        ModelKind::parse(name).ok_or_else(|| RunError::InvalidConfig(format!("unknown model {name:?}")))
    }

    pub fn cost_kind(&self) -> Result<CostKind> {
        match self.cost.as_str() {
            "full" => Ok(CostKind::Full),
            "restricted" => Ok(CostKind::RestrictedD1O1),
            other => Err(RunError::InvalidConfig(format!("unknown cost {other:?}"))),
        }
    }

    /// Checks everything `optimize` needs and resolves names.
    pub fn plan(&self) -> Result<Plan> {
        let kind = self.model_kind()?;
        let cost = self.cost_kind()?;
        if self.workers == 0 {
            return Err(RunError::InvalidConfig("workers must be at least 1".into()));
        }
        if self.ladder.is_empty() {
            return Err(RunError::InvalidConfig("ladder is empty".into()));
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RunError::InvalidConfig("ladder must increase".into()));
        }
        if self.iterations.len() != self.ladder.len() {
            return Err(RunError::InvalidConfig(format!(
                "{} iteration budgets for {} ladder sizes",
                self.iterations.len(),
                self.ladder.len()
            )));
        }
        validate_times(&self.times)?;
        if self.archs.is_empty() || self.depths.is_empty() {
            return Err(RunError::InvalidConfig("archs and depths must be nonempty".into()));
        }
        let archs = self.archs.iter().map(|a| parse_arch(a, kind)).collect::<Result<Vec<_>>>()?;
        for &l in self.ladder.iter().chain(&self.eval_sizes) {
            check_size(kind, l)?;
            for &arch in &archs {
                for &m in &self.depths {
                    build_template(arch, l, m).map_err(config_error)?;
                }
            }
        }
        let mut grids = Vec::with_capacity(archs.len());
        for &arch in &archs {
            let g = self.grid.resolve(arch)?;
            let points = g.points(1);
            if points.is_empty() {
                return Err(RunError::InvalidConfig("empty hyperparameter grid".into()));
            }
            for p in &points {
                p.validate().map_err(config_error)?;
            }
            grids.push(g);
        }
        Ok(Plan { kind, archs, grids, cost, config: self.clone() })
    }
}

/// A validated optimization config.
#[derive(Debug, Clone)]
pub struct Plan {
    pub kind: ModelKind,
    pub archs: Vec<Arch>,
    /// One grid per entry of `archs`.
    pub grids: Vec<HyperGrid>,
    pub cost: CostKind,
    pub config: RunConfig,
}

impl Plan {
    /// Every `(arch, M, t)` stage, in execution order within each series.
    pub fn stages(&self) -> Vec<(Arch, usize, f64)> {
        let mut out = Vec::new();
        for &arch in &self.archs {
            for &m in &self.config.depths {
                for &t in &self.config.times {
                    out.push((arch, m, t));
                }
            }
        }
        out
    }

    /// The `(arch index, M)` series; each runs its times in order.
    pub fn series(&self) -> Vec<(usize, usize)> {
        (0..self.archs.len())
            .flat_map(|a| self.config.depths.iter().map(move |&m| (a, m)))
            .collect()
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(RunError::InvalidConfig("times are empty".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(RunError::InvalidConfig("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RunError::InvalidConfig("times must increase".into()));
    }
    Ok(())
}

pub(crate) fn check_size(kind: ModelKind, l: usize) -> Result<()> {
    ModelSpec::new(kind, l).map_err(config_error)?;
    if l > OPERATOR_CEILING {
        return Err(qcompress_core::Error::SizeCeiling { n_qubits: l, ceiling: OPERATOR_CEILING }.into());
    }
    Ok(())
}

/// Size ceilings keep their own exit code; every other core error here is
/// a configuration problem.
pub(crate) fn config_error(e: qcompress_core::Error) -> RunError {
    match e {
        qcompress_core::Error::SizeCeiling { .. } => RunError::Core(e),
        other => RunError::InvalidConfig(other.to_string()),
    }
}

pub fn parse_arch(name: &str, kind: ModelKind) -> Result<Arch> {
    let arch = Arch::parse(name).ok_or_else(|| RunError::InvalidConfig(format!("unknown arch {name:?}")))?;
    let native = match arch {
        Arch::Tivb2 | Arch::Tivb4 => true,
        Arch::Trotter2(k) => k == kind,
        blocked => blocked == Arch::blocked_for(kind),
    };
    if !native {
        return Err(RunError::InvalidConfig(format!("{name} does not fit the {} model", kind.name())));
    }
    Ok(arch)
}
