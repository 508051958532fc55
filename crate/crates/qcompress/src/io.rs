//! On-disk formats: binary operators, JSON checkpoints and manifests, CSV.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qcompress_core::circuit::{build_template, stack, Arch, CircuitTemplate};
use qcompress_core::compress::OptimizationRun;
use qcompress_core::model::ModelKind;
use qcompress_core::{DenseOperator, C64, OPERATOR_CEILING};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RunError};

pub const SCHEMA_VERSION: u32 = 1;

/// Writes `L` as a little-endian `u64`, then the row-major entries as
/// little-endian `(re, im)` pairs of `f64`.
pub fn write_operator(path: &Path, op: &DenseOperator) -> Result<()> {
    let mut buf = Vec::with_capacity(8 + 16 * op.as_slice().len());
    buf.extend_from_slice(&(op.n_qubits() as u64).to_le_bytes());
    for z in op.as_slice() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    write_bytes(path, &buf)
}

pub fn read_operator(path: &Path) -> Result<DenseOperator> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(RunError::io(path))?;
    let bad = |msg: String| RunError::Format { path: path.into(), msg };
    if bytes.len() < 8 {
        return Err(bad("missing header".into()));
    }
    let l = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
    if l > OPERATOR_CEILING {
        return Err(qcompress_core::Error::SizeCeiling { n_qubits: l, ceiling: OPERATOR_CEILING }.into());
    }
    let d = 1usize << l;
    if bytes.len() != 8 + 16 * d * d {
        return Err(bad(format!("expected {} bytes for L={l}, found {}", 8 + 16 * d * d, bytes.len())));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().expect("8 bytes"));
    let data = (0..d * d).map(|i| C64::new(f(8 + 16 * i), f(16 + 16 * i))).collect();
    Ok(DenseOperator::from_vec(l, data)?)
}

/// One optimized stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub model: String,
    pub arch: String,
    pub depth: usize,
    #[serde(default = "one")]
    pub repeats: usize,
    pub n_qubits: usize,
    pub t: f64,
    pub params: Vec<f64>,
    /// Full-cost `ε` of `params` against `U(t)`.
    pub epsilon: f64,
    pub cost: String,
    pub run: Option<OptimizationRun>,
}

fn one() -> usize {
    1
}

impl Checkpoint {
    pub fn model_kind(&self) -> Result<ModelKind> {
        ModelKind::parse(&self.model).ok_or_else(|| RunError::InvalidConfig(format!("unknown model {:?}", self.model)))
    }

    pub fn arch(&self) -> Result<Arch> {
        Arch::parse(&self.arch).ok_or_else(|| RunError::InvalidConfig(format!("unknown arch {:?}", self.arch)))
    }

    /// The circuit at the stored size.
    pub fn template(&self) -> Result<CircuitTemplate> {
        self.template_at(self.n_qubits)
    }

    /// The circuit rebuilt on `n_qubits` with the same parameters.
    pub fn template_at(&self, n_qubits: usize) -> Result<CircuitTemplate> {
        let base = build_template(self.arch()?, n_qubits, self.depth)?;
        base.check_params(&self.params)?;
        Ok(stack(&base, &self.params, self.repeats.max(1))?.0)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(RunError::io(path))?;
        let cp: Checkpoint =
            serde_json::from_str(&text).map_err(|source| RunError::Json { path: path.into(), source })?;
        if cp.schema_version != SCHEMA_VERSION {
            return Err(RunError::Format { path: path.into(), msg: format!("schema_version {}", cp.schema_version) });
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// `{out}/checkpoints/{model}_{arch}_M{M}`.
pub fn checkpoint_dir(out: &Path, kind: ModelKind, arch: Arch, depth: usize) -> PathBuf {
    out.join("checkpoints").join(format!("{}_{}_M{depth}", kind.name(), arch.name()))
}

/// `t{t}_L{L}.json`.
pub fn checkpoint_name(t: f64, n_qubits: usize) -> String {
    format!("t{}_L{n_qubits}.json", fmt_time(t))
}

pub fn fmt_time(t: f64) -> String {
    format!("{t}")
}

/// Numbers in data columns: shortest round-trip scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| RunError::Json { path: path.into(), source })?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(RunError::io(dir))?;
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(RunError::io(path))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |source| RunError::Csv { path: path.into(), source };
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Io { path: path.into(), source: e.into_error() })?;
    write_bytes(path, &bytes)
}

/// Rows of a CSV file as string records, header first.
pub fn read_csv(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|source| RunError::Csv { path: path.into(), source })?;
    r.records()
        .map(|rec| {
            rec.map(|r| r.iter().map(String::from).collect())
                .map_err(|source| RunError::Csv { path: path.into(), source })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub created_unix: u64,
    pub inputs: T,
    pub files: Vec<String>,
}

/// Writes `{artifact}.manifest.json` next to the artifact.
pub fn write_manifest<T: Serialize>(artifact: &Path, command: &str, inputs: T, files: &[PathBuf]) -> Result<()> {
    let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let m = Manifest {
        schema_version: SCHEMA_VERSION,
        command,
        created_unix,
        inputs,
        files: files.iter().map(|f| f.display().to_string()).collect(),
    };
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    write_json(Path::new(&name), &m)
}
