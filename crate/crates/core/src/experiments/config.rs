//! Declarative experiment manifests: a TOML document selects the experiment
//! kind and parameterizes instances, sparsification, schedules, and seeds.
//! All seeding is explicit; nothing reads the wall clock. The serialized
//! resolved config is the determinism contract: its hash stamps every output
//! row.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::oracle::BRUTE_FORCE_LIMIT;
use crate::sparsify::k_for_copies;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Full-adder Boltzmann fidelity vs W0: rows (w0, kl, conflict_fraction).
    BoltzmannFa,
    /// Max-Cut success probability and approximation ratio vs W0.
    W0Sweep,
    /// Dense Max-Cut annealing baseline over one or more instances.
    MaxcutGrid,
    /// Residual-energy relaxation curves per size plus an FSS collapse.
    ResidualFss,
    /// Invertible-logic factorization trials.
    Factor,
    /// Clock-cycle cost of dense vs sparse sweeps across sizes.
    CostModel,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::BoltzmannFa => "boltzmann_fa",
            ExperimentKind::W0Sweep => "w0_sweep",
            ExperimentKind::MaxcutGrid => "maxcut_grid",
            ExperimentKind::ResidualFss => "residual_fss",
            ExperimentKind::Factor => "factor",
            ExperimentKind::CostModel => "cost_model",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceBlock {
    /// Logical node count.
    pub n: usize,
    pub edge_probability: f64,
    /// Base instance seed; instance i uses a stream derived from it.
    pub seed: u64,
    /// Number of instances (maxcut_grid only).
    pub count: usize,
}

impl Default for InstanceBlock {
    fn default() -> Self {
        InstanceBlock {
            n: 16,
            edge_probability: 0.75,
            seed: 1,
            count: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SparsifyBlock {
    /// Copies per logical node (chain length, source included). Mutually
    /// exclusive with `k`; when neither is set, 2 copies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
    /// Explicit degree bound. For cost_model this defaults to 51.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Copy-edge strength where a single value is used.
    pub w0: f64,
    /// W0 grid for sweep kinds.
    pub w0_grid: Vec<f64>,
}

impl Default for SparsifyBlock {
    fn default() -> Self {
        SparsifyBlock {
            copies: None,
            k: None,
            w0: 4.0,
            w0_grid: (1..=16).map(|i| f64::from(i) * 0.5).collect(),
        }
    }
}

impl SparsifyBlock {
    /// Degree bound for a dense model of the given max degree.
    pub fn resolve_k(&self, max_degree: usize) -> Result<usize> {
        match (self.k, self.copies) {
            (Some(_), Some(_)) => Err(Error::InvalidSpec(
                "set sparsify.k or sparsify.copies, not both".into(),
            )),
            (Some(k), None) => Ok(k),
            (None, Some(c)) => k_for_copies(max_degree, c),
            (None, None) => k_for_copies(max_degree, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleBlock {
    /// Final inverse temperature; betas step linearly up to it.
    pub beta_max: f64,
    pub beta_steps: usize,
    pub sweeps_per_beta: u64,
    pub readout_tail: u64,
}

impl Default for ScheduleBlock {
    fn default() -> Self {
        ScheduleBlock {
            beta_max: 1.0,
            beta_steps: 8,
            sweeps_per_beta: 1000,
            readout_tail: 1,
        }
    }
}

impl ScheduleBlock {
    pub fn build(&self) -> Result<crate::sampler::AnnealSchedule> {
        self.with_sweeps(self.sweeps_per_beta, self.readout_tail)
    }

    /// Schedule whose total sweep count is (about) `total`, for relaxation
    /// curves parameterized by anneal time. Readout is the final state only.
    pub fn build_for_budget(&self, total: u64) -> Result<crate::sampler::AnnealSchedule> {
        let per_beta = (total / self.beta_steps.max(1) as u64).max(1);
        self.with_sweeps(per_beta, 1)
    }

    fn with_sweeps(
        &self,
        sweeps_per_beta: u64,
        readout_tail: u64,
    ) -> Result<crate::sampler::AnnealSchedule> {
        if self.beta_steps == 0 {
            return Err(Error::InvalidSpec("schedule.beta_steps must be >= 1".into()));
        }
        let steps = self.beta_steps as f64;
        let betas = (1..=self.beta_steps)
            .map(|i| self.beta_max * i as f64 / steps)
            .collect();
        crate::sampler::AnnealSchedule::new(betas, sweeps_per_beta, readout_tail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingBlock {
    pub beta: f64,
    pub sweeps: u64,
    pub burn_in: u64,
}

impl Default for SamplingBlock {
    fn default() -> Self {
        SamplingBlock {
            beta: 1.0,
            sweeps: 1_000_000,
            burn_in: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FssTopology {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FssBlock {
    /// Logical sizes, one relaxation curve each.
    pub sizes: Vec<usize>,
    /// Total anneal sweeps per curve point, strictly increasing.
    pub anneal_times: Vec<u64>,
    pub topology: FssTopology,
    /// Search bracket for the collapse exponent mu.
    pub bracket: (f64, f64),
    /// When set, skip sampling and inject exact curves rho = N^(1/2 scaling)
    /// from a known master function with this mu (machinery check).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic_mu: Option<f64>,
}

impl Default for FssBlock {
    fn default() -> Self {
        FssBlock {
            sizes: vec![12, 16, 20],
            anneal_times: vec![8, 16, 32, 64, 128, 256],
            topology: FssTopology::Sparse,
            bracket: (-2.0, 8.0),
            synthetic_mu: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactorBlock {
    /// Factor width in bits; the product port is 2x wide.
    pub n_bits: usize,
    pub semiprime: u64,
    /// Gate-search weight bound.
    pub max_weight: i64,
}

impl Default for FactorBlock {
    fn default() -> Self {
        FactorBlock {
            n_bits: 3,
            semiprime: 35,
            max_weight: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostBlock {
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for CostBlock {
    fn default() -> Self {
        CostBlock {
            n_min: 70,
            n_max: 130,
        }
    }
}

/// Default degree bound for the cost model when sparsify.k is unset.
pub const COST_DEFAULT_K: usize = 51;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Documentation of how far below publication scale this manifest sits
    /// (sweep counts and sizes divided by roughly this factor); recorded in
    /// output metadata.
    #[serde(default = "default_scale_factor")]
    pub scale_factor: f64,
    #[serde(default)]
    pub instance: InstanceBlock,
    #[serde(default)]
    pub sparsify: SparsifyBlock,
    #[serde(default)]
    pub schedule: ScheduleBlock,
    #[serde(default)]
    pub sampling: SamplingBlock,
    #[serde(default)]
    pub fss: FssBlock,
    #[serde(default)]
    pub factor: FactorBlock,
    #[serde(default)]
    pub cost: CostBlock,
}

fn default_master_seed() -> u64 {
    1
}

fn default_trials() -> usize {
    100
}

fn default_scale_factor() -> f64 {
    100.0
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            master_seed: default_master_seed(),
            trials: default_trials(),
            scale_factor: default_scale_factor(),
            instance: InstanceBlock::default(),
            sparsify: SparsifyBlock::default(),
            schedule: ScheduleBlock::default(),
            sampling: SamplingBlock::default(),
            fss: FssBlock::default(),
            factor: FactorBlock::default(),
            cost: CostBlock::default(),
        }
    }

    /// Parse a manifest. Validation is deferred to the run boundary so a
    /// partial file can be completed by overrides first.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidSpec(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// First 16 hex characters of the SHA-256 of the serialized config.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Kind-aware validation of every field the run will reference.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        match self.kind {
            ExperimentKind::BoltzmannFa => {
                if self.sparsify.w0_grid.is_empty() {
                    return fail("sparsify.w0_grid must be nonempty".into());
                }
                if self.sampling.sweeps == 0 {
                    return fail("sampling.sweeps must be >= 1".into());
                }
                if self.sampling.burn_in >= self.sampling.sweeps {
                    return fail("sampling.burn_in must be < sampling.sweeps".into());
                }
            }
            ExperimentKind::W0Sweep => {
                if self.sparsify.w0_grid.is_empty() {
                    return fail("sparsify.w0_grid must be nonempty".into());
                }
                self.check_trials()?;
                self.check_oracle_size(self.instance.n)?;
                self.schedule.build()?;
            }
            ExperimentKind::MaxcutGrid => {
                self.check_trials()?;
                self.check_oracle_size(self.instance.n)?;
                if self.instance.count == 0 {
                    return fail("instance.count must be >= 1".into());
                }
                self.schedule.build()?;
            }
            ExperimentKind::ResidualFss => {
                let mut sizes = self.fss.sizes.clone();
                sizes.sort_unstable();
                sizes.dedup();
                if sizes.len() < 3 {
                    return fail(format!(
                        "fss.sizes needs >= 3 distinct sizes, got {}",
                        sizes.len()
                    ));
                }
                if self.fss.anneal_times.is_empty() {
                    return fail("fss.anneal_times must be nonempty".into());
                }
                if self.fss.anneal_times.windows(2).any(|w| w[1] <= w[0]) {
                    return fail("fss.anneal_times must be strictly increasing".into());
                }
                if self.fss.synthetic_mu.is_none() {
                    self.check_trials()?;
                    if self.instance.count == 0 {
                        return fail("instance.count must be >= 1".into());
                    }
                    for &n in &sizes {
                        self.check_oracle_size(n)?;
                    }
                    self.schedule.build()?;
                }
                let (lo, hi) = self.fss.bracket;
                if !(hi > lo) {
                    return fail(format!("fss.bracket [{lo}, {hi}] is empty"));
                }
            }
            ExperimentKind::Factor => {
                self.check_trials()?;
                if self.factor.n_bits < 2 {
                    return fail("factor.n_bits must be >= 2".into());
                }
                let width = 2 * self.factor.n_bits;
                if width < 64 && self.factor.semiprime >> width != 0 {
                    return Err(Error::Overflow(format!(
                        "factor.semiprime {} does not fit {width} bits",
                        self.factor.semiprime
                    )));
                }
                self.schedule.build()?;
            }
            ExperimentKind::CostModel => {
                if self.cost.n_min < 2 || self.cost.n_min > self.cost.n_max {
                    return fail(format!(
                        "cost grid [{}, {}] is invalid",
                        self.cost.n_min, self.cost.n_max
                    ));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.instance.edge_probability) {
            return fail(format!(
                "instance.edge_probability {} outside [0, 1]",
                self.instance.edge_probability
            ));
        }
        Ok(())
    }

    fn check_trials(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be >= 1".into()));
        }
        Ok(())
    }

    fn check_oracle_size(&self, n: usize) -> Result<()> {
        if n > BRUTE_FORCE_LIMIT {
            return Err(Error::Capacity {
                n,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        Ok(())
    }
}
