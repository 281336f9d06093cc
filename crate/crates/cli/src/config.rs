use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use robust_coreset::data::{load_csv, synth, Columns, LoadOptions, SynthSpec};
use robust_coreset::Dataset;
use serde::Serialize;

/// `v<crate version>` plus `git describe` output when built from a checkout.
pub fn version() -> String {
    let describe = env!("ROBUST_CORESET_GIT_DESCRIBE");
    if describe.is_empty() {
        format!("v{}", env!("CARGO_PKG_VERSION"))
    } else {
        format!("v{}-{describe}", env!("CARGO_PKG_VERSION"))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv(PathBuf),
    Synth(SynthSpec),
}

#[derive(Debug, Clone, Serialize)]
pub struct DataConfig {
    pub source: DataSource,
    pub columns: Option<String>,
    pub subsample: Option<usize>,
    pub data_seed: u64,
    pub standardize: bool,
}

impl DataConfig {
    pub fn load(&self) -> Result<Dataset> {
        let x = match &self.source {
            DataSource::Csv(path) => {
                let opts = LoadOptions {
                    columns: Columns::parse(self.columns.as_deref()),
                    subsample: self.subsample,
                    seed: self.data_seed,
                    standardize: self.standardize,
                };
                load_csv(path, &opts).with_context(|| format!("reading {}", path.display()))?
            }
            DataSource::Synth(spec) => {
                if self.subsample.is_some() || self.columns.is_some() || self.standardize {
                    bail!("--subsample, --columns and --standardize apply to CSV input only");
                }
                synth(spec)?.dataset
            }
        };
        if x.is_empty() {
            bail!("dataset is empty");
        }
        Ok(x)
    }
}

/// Parses `clusters=5,per-cluster=4000,dim=5,outliers=200[,separation=..,spread=..,outlier-distance=..,seed=..]`.
pub fn parse_synth(spec: &str) -> Result<SynthSpec> {
    let mut out = SynthSpec::new(0, 0, 0, 0, 0);
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .with_context(|| format!("synthetic spec entry {part:?} is not key=value"))?;
        let bad = || format!("bad value {value:?} for {key}");
        match key.trim().replace('_', "-").as_str() {
            "clusters" => out.clusters = value.parse().with_context(bad)?,
            "per-cluster" => out.per_cluster = value.parse().with_context(bad)?,
            "dim" => out.dim = value.parse().with_context(bad)?,
            "outliers" => out.outliers = value.parse().with_context(bad)?,
            "separation" => out.separation = value.parse().with_context(bad)?,
            "spread" => out.spread = value.parse().with_context(bad)?,
            "outlier-distance" => out.outlier_distance = value.parse().with_context(bad)?,
            "seed" => out.seed = value.parse().with_context(bad)?,
            other => bail!("unknown synthetic spec key {other:?}"),
        }
    }
    if out.clusters == 0 || out.per_cluster == 0 || out.dim == 0 {
        bail!("synthetic spec needs clusters, per-cluster and dim, all positive");
    }
    Ok(out)
}

/// `--m` as given on the command line and the value used.
#[derive(Debug, Clone, Serialize)]
pub struct OutlierCount {
    pub requested: String,
    pub resolved: usize,
}

/// Everything that determines a run's numeric output, embedded in every file
/// the run writes.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<OutlierCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_sets: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_distribution: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coreset: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(command: &str, seed: u64, threads: Option<usize>, out_dir: PathBuf) -> Self {
        Self { command: command.to_string(), seed, threads, out_dir, ..Self::default() }
    }
}
