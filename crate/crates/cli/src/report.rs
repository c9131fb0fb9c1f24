//! Machine-readable result schemas written by the subcommands.

use serde::Serialize;

use qclust_core::cluster::ScatterStats;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Versions {
    #[serde(rename = "qclust-cli")]
    pub cli: &'static str,
    #[serde(rename = "qclust-core")]
    pub core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            cli: env!("CARGO_PKG_VERSION"),
            core: qclust_core::VERSION,
        }
    }
}

/// Echo of every flag that shaped a run.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub input: Option<String>,
    pub blobs: Option<String>,
    pub centers: String,
    pub spread: f64,
    pub header: bool,
    pub kernel: String,
    pub model: String,
    pub fixed_index: Option<usize>,
    pub tau: f64,
    pub steps: Option<usize>,
    pub samples: usize,
    pub normalize_energy: bool,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct DataSummary {
    pub n: usize,
    pub dim: usize,
    pub point_ids: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ModelSummary {
    pub kind: String,
    pub num_spins: usize,
    /// 1-based index of the pinned point, reduced models only.
    pub fixed_index: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct EvolutionSummary {
    pub tau: f64,
    pub steps: usize,
    pub sample_count: usize,
    pub normalize_energy: bool,
    pub energy_scale: f64,
    pub norm_drift_max: f64,
}

#[derive(Debug, Serialize)]
pub struct TopState {
    pub index: usize,
    pub ket: String,
    pub probability: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleState {
    pub index: usize,
    pub ket: String,
    pub energy: f64,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub min_energy: f64,
    pub states: Vec<OracleState>,
    /// Whether the evolution's top state is one of the oracle's ground
    /// states.
    pub agrees: bool,
}

#[derive(Debug, Serialize)]
pub struct ScatterSummary {
    pub s_w: f64,
    pub s_b: f64,
    pub s_t: f64,
}

impl From<&ScatterStats> for ScatterSummary {
    fn from(stats: &ScatterStats) -> Self {
        ScatterSummary {
            s_w: stats.s_w,
            s_b: stats.s_b,
            s_t: stats.s_t,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LloydSummary {
    pub assignment: Vec<u8>,
    pub s_w: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether Lloyd found the same bipartition as the annealer.
    pub same_bipartition: bool,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub versions: Versions,
    pub config: ConfigEcho,
    pub data: DataSummary,
    pub model: ModelSummary,
    pub evolution: EvolutionSummary,
    pub top_states: Vec<TopState>,
    pub oracle: OracleSummary,
    pub assignment: Vec<u8>,
    pub cluster_sizes: [usize; 2],
    pub scatter: ScatterSummary,
    pub anova_residual: f64,
    pub lloyd: LloydSummary,
}

#[derive(Debug, Serialize)]
pub struct BruteState {
    pub index: usize,
    pub ket: String,
    pub energy: f64,
    /// Labels over all points; absent when the state leaves a cluster
    /// empty.
    pub assignment: Option<Vec<u8>>,
}

#[derive(Debug, Serialize)]
pub struct BruteReport {
    pub schema: u32,
    pub versions: Versions,
    pub kernel: String,
    pub model: ModelSummary,
    pub n_points: usize,
    pub min_energy: f64,
    pub ground_state_count: usize,
    pub ground_states: Vec<BruteState>,
}

#[derive(Debug, Serialize)]
pub struct AnovaReport {
    pub schema: u32,
    pub versions: Versions,
    pub n_points: usize,
    pub trials: usize,
    pub max_relative_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}
