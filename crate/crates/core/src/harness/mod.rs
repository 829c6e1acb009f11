//! Experiment configuration, registry and artifact writing for the `whlab` CLI.
//!
//! A run reads one TOML file, samples the ensemble, computes one long-format
//! table plus a JSON summary and writes them under
//! `<out>/<experiment>/<hash>/` where `hash` is derived from the resolved
//! configuration.

mod experiments;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::{sample, Couplings, EnsembleSpec, Interaction, ModelKind};
use crate::teleport::{Channel, ProtocolConfig, Slice};

pub use experiments::compute;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A grid given either as an explicit list or as `{ start, stop, count }`
/// (inclusive, evenly spaced).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                _ => (0..*count)
                    .map(|i| start + (stop - start) * i as f64 / (*count - 1) as f64)
                    .collect(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<GridSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "J")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<Interaction>,
    /// Majorana index of the probe fermion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fermion: Option<usize>,
    /// Fixed right time of the OTOC.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_right: Option<f64>,
    /// `[t_lo, t_hi]` for the Lyapunov fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    /// Upper end (exclusive) of the mu range used for the gap power law.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_mu_max: Option<f64>,
    /// Number of eigenvalues per spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<Slice>,
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub grid: Grids,
}

fn need<T: Copy>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(field, "required for this experiment"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<root>".to_string());
            Error::config(field, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<root>", e.to_string()))
    }

    /// Grids materialized as explicit lists, for the resolved config.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        for g in [&mut c.grid.t, &mut c.grid.t0, &mut c.grid.t1, &mut c.grid.mu, &mut c.grid.beta, &mut c.grid.tau] {
            if let Some(spec) = g.as_mut() {
                *spec = GridSpec::List(spec.values());
            }
        }
        c.output = None;
        c
    }

    /// First 16 hex digits of the SHA-256 of the resolved config.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.resolved().to_toml()?.as_bytes());
        let mut s = String::with_capacity(16);
        for b in &digest[..8] {
            write!(s, "{b:02x}").unwrap();
        }
        Ok(s)
    }

    pub fn grid(&self, name: &str) -> Result<Vec<f64>> {
        let spec = match name {
            "t" => &self.grid.t,
            "t0" => &self.grid.t0,
            "t1" => &self.grid.t1,
            "mu" => &self.grid.mu,
            "beta" => &self.grid.beta,
            "tau" => &self.grid.tau,
            _ => return Err(Error::config(format!("grid.{name}"), "unknown grid")),
        };
        let field = format!("grid.{name}");
        let v = spec.as_ref().ok_or_else(|| Error::config(&field, "required for this experiment"))?.values();
        if v.is_empty() {
            return Err(Error::config(&field, "grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(&field, "grid values must be finite and strictly increasing"));
        }
        Ok(v)
    }

    pub fn beta(&self) -> Result<f64> {
        need(self.beta, "beta")
    }
    pub fn mu(&self) -> Result<f64> {
        need(self.mu, "mu")
    }
    pub fn t0(&self) -> Result<f64> {
        need(self.t0, "t0")
    }
    pub fn t1(&self) -> Result<f64> {
        need(self.t1, "t1")
    }
    pub fn interaction(&self) -> Result<Interaction> {
        need(self.interaction, "interaction")
    }
    pub fn model(&self) -> Result<ModelKind> {
        need(self.model, "model")
    }
    pub fn fermion(&self) -> Result<usize> {
        let j = need(self.fermion, "fermion")?;
        if j >= self.n {
            return Err(Error::config("fermion", format!("must be < N = {}", self.n)));
        }
        Ok(j)
    }

    /// Protocol template with the given interaction; times default to zero
    /// and are set per grid point by the experiment.
    pub fn protocol(&self, interaction: Interaction) -> Result<ProtocolConfig> {
        let mut p = ProtocolConfig::new(self.n, self.q, self.beta()?, self.mu()?, interaction);
        p.scale = self.scale;
        p.schedule = self.schedule.clone();
        p.seed = self.ensemble.master_seed;
        p.channel = Channel::Quantum;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if registry_entry(&self.experiment).is_none() {
            let names: Vec<&str> = experiment_registry().iter().map(|e| e.name).collect();
            return Err(Error::config("experiment", format!("unknown experiment; expected one of {}", names.join(", "))));
        }
        if self.n == 0 || self.n % 2 != 0 || self.n > 24 {
            return Err(Error::config("N", "must be even with 2 <= N <= 24"));
        }
        if self.q == 0 || self.q % 2 != 0 || self.q > self.n {
            return Err(Error::config("q", "must be even with 2 <= q <= N"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::config("J", "must be positive"));
        }
        if self.ensemble.count == 0 {
            return Err(Error::config("ensemble.count", "must be at least 1"));
        }
        if let Some(b) = self.beta {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::config("beta", "must be finite and >= 0"));
            }
        }
        for (name, v) in [("mu", self.mu), ("t0", self.t0), ("t1", self.t1), ("t_right", self.t_right)] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::config(name, "must be finite"));
                }
            }
        }
        for (i, s) in self.schedule.iter().enumerate() {
            if !s.time.is_finite() || !s.mu.is_finite() {
                return Err(Error::config(format!("schedule[{i}]"), "must be finite"));
            }
        }
        if let Some(w) = self.fit_window {
            if !(w[0] < w[1]) {
                return Err(Error::config("fit_window", "needs t_lo < t_hi"));
            }
        }
        if let Some(k) = self.levels {
            if k < 2 {
                return Err(Error::config("levels", "must be at least 2"));
            }
        }
        Ok(())
    }

    /// Ensemble members `(seed, couplings)` for a model.
    pub fn members(&self, model: ModelKind) -> Result<Vec<(u64, Couplings)>> {
        self.ensemble
            .seeds()
            .map(|s| Ok((s, sample(model, self.n, self.q, self.scale, s)?)))
            .collect()
    }
}

/// One registry entry.
#[derive(Clone, Debug, Serialize)]
pub struct RegistryEntry {
    pub name: &'static str,
    /// What the output reproduces.
    pub reproduces: &'static str,
    /// Parameters of the original large-N figure.
    pub reference_parameters: &'static str,
    /// Rows of `series.csv`.
    pub rows: &'static str,
    /// Complete desk-scale default config.
    pub default_config: &'static str,
}

pub fn experiment_registry() -> &'static [RegistryEntry] {
    &REGISTRY
}

pub fn registry_entry(name: &str) -> Option<&'static RegistryEntry> {
    REGISTRY.iter().find(|e| e.name == name)
}

static REGISTRY: [RegistryEntry; 13] = [
    RegistryEntry {
        name: "mi-curve",
        reproduces: "I(R:T) versus t0 = t1 for -|mu| and +|mu| over an ensemble, with the mean asymmetry",
        reference_parameters: "N = 10, 14, 24; q = 4; J = 1; beta = 4; mu = -0.3/+0.3 (N = 10), +-0.2 (N = 14, 24); 10 instantiations",
        rows: "count x |grid.t| x 2",
        default_config: r#"experiment = "mi-curve"
N = 10
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = 0.3
interaction = "V"

[ensemble]
master_seed = 2024
count = 10

[grid]
t = { start = 0.0, stop = 6.0, count = 25 }
"#,
    },
    RegistryEntry {
        name: "warmup",
        reproduces: "exact rho_TR and I(R:T) = 2 log2(1 + sin^2 mu) at t0 = t1 = beta = 0",
        reference_parameters: "any N; t0 = t1 = beta = 0; mu in [0, pi/2]",
        rows: "count x |grid.mu|",
        default_config: r#"experiment = "warmup"
N = 4
q = 4
J = 1.0
model = "syk"
beta = 0.0
t0 = 0.0
t1 = 0.0
interaction = "V"

[ensemble]
master_seed = 1
count = 1

[grid]
mu = { start = 0.0, stop = 1.5707963267948966, count = 9 }
"#,
    },
    RegistryEntry {
        name: "winding",
        reproduces: "P(s) and Q(s) of the thermal fermion before and after the interaction and on the right side",
        reference_parameters: "N = 20; q = 4; J = 1; beta = 4; t0 = t1 = 2.9; mu = -0.2 (V); N = 20, q = 4 for the Vb variant",
        rows: "count x |grid.t| x 3 stages x (max size + 1)",
        default_config: r#"experiment = "winding"
N = 12
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = -0.2
fermion = 0
interaction = "V"

[ensemble]
master_seed = 2024
count = 1

[grid]
t = [1.0, 2.0, 2.75, 4.0]
"#,
    },
    RegistryEntry {
        name: "winding-summary",
        reproduces: "winding slope, coherence and size moments versus time, next to the MI asymmetry",
        reference_parameters: "N = 20; q = 4; J = 1; beta = 4; mu = -0.2",
        rows: "count x |grid.t|",
        default_config: r#"experiment = "winding-summary"
N = 12
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = -0.2
fermion = 0
interaction = "V"

[ensemble]
master_seed = 2024
count = 1

[grid]
t = { start = 0.5, stop = 8.0, count = 16 }
"#,
    },
    RegistryEntry {
        name: "lyapunov",
        reproduces: "Lyapunov exponent from the exponential decay of the winding slope, against 2 pi / beta",
        reference_parameters: "N = 26; q = 4; J = 1; several beta",
        rows: "|grid.beta| x count x |grid.t|",
        default_config: r#"experiment = "lyapunov"
N = 12
q = 4
J = 1.0
model = "syk"
fermion = 0
interaction = "V"
fit_window = [2.0, 8.0]

[ensemble]
master_seed = 7
count = 3

[grid]
beta = [1.0, 2.0, 4.0, 8.0]
t = { start = 0.0, stop = 10.0, count = 21 }
"#,
    },
    RegistryEntry {
        name: "eternal",
        reproduces: "gap of H_L + H_R + mu V, its small-mu power law, the optimal beta and tfd overlap, and the SL(2,R) figure of merit",
        reference_parameters: "N = 10 spectrum at mu = 0.3; N = 20 gap fit (b = 0.69); N = 8, 10, 12 overlaps and figure of merit; q = 4; J = 1",
        rows: "count x |grid.mu|",
        default_config: r#"experiment = "eternal"
N = 10
q = 4
J = 1.0
model = "syk"
fit_mu_max = 0.3
levels = 8

[ensemble]
master_seed = 11
count = 10

[grid]
mu = [0.04, 0.08, 0.12, 0.16, 0.2, 0.24, 0.28, 0.3, 0.4, 0.6]
beta = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0]
"#,
    },
    RegistryEntry {
        name: "eternal-vb",
        reproduces: "the same spectral analysis for H_L + H_R + mu Vb, with the discrete-symmetry report",
        reference_parameters: "N = 18, 20; q = 4; J = 1; mu = 0.3",
        rows: "count x |grid.mu|",
        default_config: r#"experiment = "eternal-vb"
N = 10
q = 4
J = 1.0
model = "syk"
fit_mu_max = 0.3
levels = 8

[ensemble]
master_seed = 11
count = 4

[grid]
mu = [0.1, 0.2, 0.3, 0.4]
beta = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0]
"#,
    },
    RegistryEntry {
        name: "causal",
        reproduces: "extraction time maximizing the MI asymmetry versus injection time, single or multi-slice interaction",
        reference_parameters: "N = 24, q = 8, beta = 20, Vb, mu = -0.18 at t = 0; N = 26, q = 8, beta = 16, Vb, mu = -0.11 at t = -1.5, +1.5",
        rows: "|grid.t0| x |grid.t1| (ensemble mean)",
        default_config: r#"experiment = "causal"
N = 10
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = -0.3
interaction = "Vb"

[ensemble]
master_seed = 3
count = 2

[grid]
t0 = { start = 1.5, stop = 5.0, count = 8 }
t1 = { start = 1.5, stop = 6.0, count = 19 }
"#,
    },
    RegistryEntry {
        name: "classical",
        reproduces: "outcome-resolved I(R:T) of the classical-channel protocol against the quantum channel",
        reference_parameters: "N = 20; q = 4; J = 1; beta = 4; |mu| = 0.25; single instantiation; 1024 outcomes",
        rows: "count x |grid.t| x 2 x 2^(N/2)",
        default_config: r#"experiment = "classical"
N = 10
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = 0.25
interaction = "Vb"

[ensemble]
master_seed = 5
count = 1

[grid]
t = { start = 0.5, stop = 5.0, count = 10 }
"#,
    },
    RegistryEntry {
        name: "tripartite",
        reproduces: "I(R:T) and the tripartite information I(R:L:T) versus t0 = t1 for both signs of mu",
        reference_parameters: "N = 24; q = 4 (beta = 4) and q = 8 (beta = 8); |mu| = 0.2; single instantiation",
        rows: "count x |grid.t| x 2",
        default_config: r#"experiment = "tripartite"
N = 10
q = 4
J = 1.0
model = "syk"
beta = 4.0
mu = 0.2
interaction = "Vb"

[ensemble]
master_seed = 5
count = 1

[grid]
t = { start = 0.0, stop = 6.0, count = 13 }
"#,
    },
    RegistryEntry {
        name: "otoc",
        reproduces: "OTOC H and C = -2 Im H versus the left time at fixed right time, both signs of mu",
        reference_parameters: "N = 10; q = 4; beta = 1; mu = +-0.139 pi; t_R = -0.720; 100 instantiations",
        rows: "count x |grid.t| x 2",
        default_config: r#"experiment = "otoc"
N = 10
q = 4
J = 1.0
model = "syk"
beta = 1.0
mu = 0.43668137874744366
interaction = "V"
fermion = 2
t_right = -0.72

[ensemble]
master_seed = 17
count = 10

[grid]
t = { start = -2.0, stop = 4.0, count = 25 }
"#,
    },
    RegistryEntry {
        name: "pg-compare",
        reproduces: "I(R:T) versus extraction time at fixed injection time for SYK and PG commuting models",
        reference_parameters: "N = 10; q = 4; beta = 1; mu = +-0.139 pi; t0 = -0.720; 10 SYK and 100 PG instantiations",
        rows: "2 models x count x |grid.t1| x 2",
        default_config: r#"experiment = "pg-compare"
N = 10
q = 4
J = 1.0
beta = 1.0
mu = 0.43668137874744366
t0 = -0.72
interaction = "V"

[ensemble]
master_seed = 19
count = 10

[grid]
t1 = { start = -0.5, stop = 4.0, count = 19 }
"#,
    },
    RegistryEntry {
        name: "twopoint",
        reproduces: "Euclidean two-point function G(tau) against exp(-J^2 tau (beta - tau)) for the PG commuting model",
        reference_parameters: "PG commuting; q = 4; beta = 1; 100 instantiations",
        rows: "count x |grid.tau|",
        default_config: r#"experiment = "twopoint"
N = 16
q = 4
J = 1.0
model = "pg"
beta = 1.0
fermion = 0

[ensemble]
master_seed = 99
count = 100

[grid]
tau = [0.1, 0.25, 0.5, 0.75, 0.9]
"#,
    },
];

/// A cell of a result table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Text(x.to_string())
    }
}
impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// 17 significant digits, exact round trip.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path, provenance: &str) -> Result<()> {
        let mut bytes = format!("# {provenance}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut bytes);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        fs::write(path, bytes)?;
        Ok(())
    }
}

/// Everything an experiment produces.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub series: ResultTable,
    pub summary: serde_json::Value,
    /// Additional tables written next to `series.csv`.
    pub extra: Vec<(String, ResultTable)>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub hash: String,
    pub summary: serde_json::Value,
}

/// Load, override, compute and write.
pub fn run_experiment(config_path: &Path, opts: &RunOptions) -> Result<RunArtifacts> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seed) = opts.seed {
        cfg.ensemble.master_seed = seed;
    }
    let out = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    run_config(&cfg, &out)
}

pub fn run_config(cfg: &ExperimentConfig, out_root: &Path) -> Result<RunArtifacts> {
    cfg.validate()?;
    let hash = cfg.hash()?;
    let output = compute(cfg)?;
    let parent = out_root.join(&cfg.experiment);
    fs::create_dir_all(&parent).map_err(|e| Error::config("output", format!("{}: {e}", parent.display())))?;
    let dir = parent.join(&hash);
    let tmp = parent.join(format!(".{hash}.partial"));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    let written = write_artifacts(cfg, &hash, &output, &tmp);
    if let Err(e) = written {
        let _ = fs::remove_dir_all(&tmp);
        return Err(e);
    }
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::rename(&tmp, &dir)?;
    Ok(RunArtifacts {
        dir,
        hash,
        summary: output.summary,
    })
}

fn write_artifacts(cfg: &ExperimentConfig, hash: &str, output: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let provenance = format!(
        "whlab {VERSION} experiment={} config={hash} master_seed={}",
        cfg.experiment, cfg.ensemble.master_seed
    );
    output.series.write_csv(&dir.join("series.csv"), &provenance)?;
    for (name, table) in &output.extra {
        table.write_csv(&dir.join(name), &provenance)?;
    }
    let entry = registry_entry(&cfg.experiment).expect("validated");
    let summary = serde_json::json!({
        "experiment": cfg.experiment,
        "version": VERSION,
        "config_hash": hash,
        "master_seed": cfg.ensemble.master_seed,
        "rows": output.series.rows.len(),
        "reproduces": entry.reproduces,
        "reference_parameters": entry.reference_parameters,
        "scale_note": format!(
            "computed at N = {}, q = {}; the reference parameters are recorded for comparison only",
            cfg.n, cfg.q
        ),
        "results": output.summary,
    });
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    fs::write(dir.join("config.resolved.toml"), cfg.resolved().to_toml()?)?;
    Ok(())
}

/// Process exit code for an error: 2 for configuration and input problems,
/// 3 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_defaults_parse() {
        for e in experiment_registry() {
            let cfg = ExperimentConfig::from_toml(e.default_config).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(cfg.experiment, e.name);
            let again = ExperimentConfig::from_toml(&cfg.resolved().to_toml().unwrap()).unwrap();
            assert_eq!(again.hash().unwrap(), cfg.hash().unwrap());
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = registry_entry("mi-curve").unwrap().default_config.replace("N = 10\n", "");
        match ExperimentConfig::from_toml(&text) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "N"),
            other => panic!("{other:?}"),
        }
        let text = registry_entry("mi-curve").unwrap().default_config.replace("beta = 4.0\n", "");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        match compute(&cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "beta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grids() {
        let g = GridSpec::Range {
            start: 0.0,
            stop: 1.0,
            count: 5,
        };
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let text = registry_entry("mi-curve")
            .unwrap()
            .default_config
            .replace("t = { start = 0.0, stop = 6.0, count = 25 }", "t = [1.0, 0.5]");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert!(matches!(cfg.grid("t"), Err(Error::Config { .. })));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
