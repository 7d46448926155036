//! `pbit`: experiment runner for the p-bit Ising machine toolkit.
//!
//! Utility subcommands (`gen`, `sparsify`, `anneal`) compose through the
//! instance/embedding text formats; experiment subcommands (`sample`,
//! `w0-sweep`, `fss`, `factor`, `cost-model`) run declarative manifests and
//! emit CSV tables. Every manifest field can come from a `--config` TOML
//! file and be overridden by the same-named flag. Exit codes: 0 success,
//! 2 config or input error, 3 capacity/infeasibility/runtime error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use pbit_core::experiments::{
    fmt_f64, run_experiment, trajectory_csv, CsvTable, ExperimentConfig, ExperimentKind,
    FssTopology, CORE_VERSION,
};
use pbit_core::{
    generate_er_maxcut, parse_embedding, parse_instance, simulated_anneal,
    simulated_anneal_recorded, sparsify, write_embedding, write_instance, write_state, Decoder,
    Error, FixedPointSpec, InstanceSpec, IsingModel, RngSpec, SparseEmbedding, SweepKind,
};

#[derive(Parser)]
#[command(name = "pbit", version, about = "p-bit Ising machine experiment toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for trial-level parallelism (0 = all cores). Output
    /// is byte-identical regardless.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an ER Max-Cut instance file
    Gen {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Sparsify an instance file into a bounded-degree embedding file
    Sparsify {
        /// Instance file to sparsify
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Anneal an instance or embedding file over independent trials
    Anneal {
        /// Instance or embedding file; omitted = generate from [instance]
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also record trial 0 as a trajectory CSV at this path
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Trajectory sampling stride in sweeps
        #[arg(long, default_value_t = 100)]
        record_every: u64,
        /// Sweep a fixed-point quantized model (1 sign / 6 integer /
        /// 3 fraction bits)
        #[arg(long)]
        quantize: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Boltzmann-fidelity sampling of the sparsified full adder
    Sample {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Max-Cut success probability and approximation ratio over the W0 grid
    #[command(name = "w0-sweep")]
    W0Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Residual-energy relaxation curves and finite-size-scaling collapse
    Fss {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Invertible-logic factorization trials
    Factor {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Dense vs sparse sweep-cost table
    CostModel {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

/// Manifest source plus one override flag per config field.
#[derive(Args)]
struct ConfigArgs {
    /// TOML manifest; its `kind` must match the subcommand
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    scale_factor: Option<f64>,
    /// instance.n
    #[arg(long)]
    n: Option<usize>,
    /// instance.edge_probability
    #[arg(long)]
    edge_probability: Option<f64>,
    /// instance.seed
    #[arg(long)]
    seed: Option<u64>,
    /// instance.count
    #[arg(long)]
    count: Option<usize>,
    /// sparsify.copies
    #[arg(long)]
    copies: Option<usize>,
    /// sparsify.k
    #[arg(long)]
    k: Option<usize>,
    /// sparsify.w0
    #[arg(long)]
    w0: Option<f64>,
    /// sparsify.w0_grid, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w0_grid: Option<Vec<f64>>,
    /// schedule.beta_max
    #[arg(long)]
    beta_max: Option<f64>,
    /// schedule.beta_steps
    #[arg(long)]
    beta_steps: Option<usize>,
    /// schedule.sweeps_per_beta
    #[arg(long)]
    sweeps_per_beta: Option<u64>,
    /// schedule.readout_tail
    #[arg(long)]
    readout_tail: Option<u64>,
    /// sampling.beta
    #[arg(long)]
    beta: Option<f64>,
    /// sampling.sweeps
    #[arg(long)]
    sweeps: Option<u64>,
    /// sampling.burn_in
    #[arg(long)]
    burn_in: Option<u64>,
    /// fss.sizes, comma-separated
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// fss.anneal_times, comma-separated
    #[arg(long, value_delimiter = ',')]
    anneal_times: Option<Vec<u64>>,
    /// fss.topology: dense | sparse
    #[arg(long)]
    topology: Option<String>,
    /// fss.bracket as lo,hi
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    bracket: Option<Vec<f64>>,
    /// fss.synthetic_mu
    #[arg(long)]
    synthetic_mu: Option<f64>,
    /// factor.n_bits
    #[arg(long)]
    n_bits: Option<usize>,
    /// factor.semiprime
    #[arg(long)]
    semiprime: Option<u64>,
    /// factor.max_weight
    #[arg(long)]
    max_weight: Option<i64>,
    /// cost.n_min
    #[arg(long)]
    n_min: Option<usize>,
    /// cost.n_max
    #[arg(long)]
    n_max: Option<usize>,
}

impl ConfigArgs {
    /// Manifest for `kind`: file (if any), then flag overrides, then
    /// validation.
    fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => {
                let text = read_text(path)?;
                let config = ExperimentConfig::from_toml(&text)?;
                if config.kind != kind {
                    return Err(Error::InvalidSpec(format!(
                        "config kind {} does not match this subcommand ({})",
                        config.kind.as_str(),
                        kind.as_str()
                    )));
                }
                config
            }
            None => ExperimentConfig::new(kind),
        };
        self.apply(&mut config)?;
        config.validate()?;
        Ok(config)
    }

    /// Like `resolve` but without kind-specific validation, for the utility
    /// subcommands that only use a subset of the manifest.
    fn resolve_loose(&self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_toml(&read_text(path)?)?,
            None => ExperimentConfig::new(kind),
        };
        self.apply(&mut config)?;
        Ok(config)
    }

    fn apply(&self, config: &mut ExperimentConfig) -> Result<(), Error> {
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = $flag {
                    $field = v;
                }
            };
        }
        set!(self.master_seed, config.master_seed);
        set!(self.trials, config.trials);
        set!(self.scale_factor, config.scale_factor);
        set!(self.n, config.instance.n);
        set!(self.edge_probability, config.instance.edge_probability);
        set!(self.seed, config.instance.seed);
        set!(self.count, config.instance.count);
        if self.copies.is_some() {
            config.sparsify.copies = self.copies;
        }
        if self.k.is_some() {
            config.sparsify.k = self.k;
        }
        set!(self.w0, config.sparsify.w0);
        if let Some(grid) = &self.w0_grid {
            config.sparsify.w0_grid = grid.clone();
        }
        set!(self.beta_max, config.schedule.beta_max);
        set!(self.beta_steps, config.schedule.beta_steps);
        set!(self.sweeps_per_beta, config.schedule.sweeps_per_beta);
        set!(self.readout_tail, config.schedule.readout_tail);
        set!(self.beta, config.sampling.beta);
        set!(self.sweeps, config.sampling.sweeps);
        set!(self.burn_in, config.sampling.burn_in);
        if let Some(sizes) = &self.sizes {
            config.fss.sizes = sizes.clone();
        }
        if let Some(times) = &self.anneal_times {
            config.fss.anneal_times = times.clone();
        }
        if let Some(t) = &self.topology {
            config.fss.topology = match t.as_str() {
                "dense" => FssTopology::Dense,
                "sparse" => FssTopology::Sparse,
                other => {
                    return Err(Error::InvalidSpec(format!(
                        "topology must be dense or sparse, got {other:?}"
                    )))
                }
            };
        }
        if let Some(b) = &self.bracket {
            if b.len() != 2 {
                return Err(Error::InvalidSpec("bracket takes exactly lo,hi".into()));
            }
            config.fss.bracket = (b[0], b[1]);
        }
        if self.synthetic_mu.is_some() {
            config.fss.synthetic_mu = self.synthetic_mu;
        }
        set!(self.n_bits, config.factor.n_bits);
        set!(self.semiprime, config.factor.semiprime);
        set!(self.max_weight, config.factor.max_weight);
        set!(self.n_min, config.cost.n_min);
        set!(self.n_max, config.cost.n_max);
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidSpec(_) | Error::Parse { .. } | Error::Io(_) | Error::InvalidModel(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Gen { cfg } => cmd_gen(cfg, cli.output.as_deref()),
        Command::Sparsify { input, cfg } => cmd_sparsify(input, cfg, cli.output.as_deref()),
        Command::Anneal {
            input,
            trajectory,
            record_every,
            quantize,
            cfg,
        } => cmd_anneal(
            input.as_deref(),
            trajectory.as_deref(),
            *record_every,
            *quantize,
            cfg,
            cli.workers,
            cli.output.as_deref(),
        ),
        Command::Sample { cfg } => cmd_experiment(cfg, ExperimentKind::BoltzmannFa, &cli),
        Command::W0Sweep { cfg } => cmd_experiment(cfg, ExperimentKind::W0Sweep, &cli),
        Command::Fss { cfg } => cmd_experiment(cfg, ExperimentKind::ResidualFss, &cli),
        Command::Factor { cfg } => cmd_experiment(cfg, ExperimentKind::Factor, &cli),
        Command::CostModel { cfg } => cmd_experiment(cfg, ExperimentKind::CostModel, &cli),
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// out.csv -> out.<suffix>.csv for auxiliary tables.
fn aux_path(base: &Path, suffix: &str) -> PathBuf {
    match base.extension() {
        Some(ext) => base.with_extension(format!("{suffix}.{}", ext.to_string_lossy())),
        None => base.with_extension(suffix),
    }
}

fn digest16(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn cmd_experiment(cfg: &ConfigArgs, kind: ExperimentKind, cli: &Cli) -> Result<(), Error> {
    let config = cfg.resolve(kind)?;
    let out = run_experiment(&config, cli.workers)?;
    match &cli.output {
        Some(path) => {
            fs::write(path, &out.primary)?;
            for (suffix, csv) in &out.aux {
                fs::write(aux_path(path, suffix), csv)?;
            }
        }
        None => {
            print!("{}", out.primary);
            for (_, csv) in &out.aux {
                print!("{csv}");
            }
        }
    }
    Ok(())
}

fn cmd_gen(cfg: &ConfigArgs, output: Option<&Path>) -> Result<(), Error> {
    let config = cfg.resolve_loose(ExperimentKind::MaxcutGrid)?;
    let spec = InstanceSpec::new(
        config.instance.n,
        config.instance.edge_probability,
        config.instance.seed,
    )?;
    let model = generate_er_maxcut(&spec)?;
    let mut text = String::new();
    writeln!(text, "# meta command=gen").unwrap();
    writeln!(
        text,
        "# meta n={} edge_probability={} seed={}",
        config.instance.n,
        fmt_f64(config.instance.edge_probability),
        config.instance.seed
    )
    .unwrap();
    writeln!(
        text,
        "# meta core_version={CORE_VERSION} rng={}",
        pbit_core::rng::ALGORITHM
    )
    .unwrap();
    text.push_str(&write_instance(&model));
    emit(&text, output)
}

fn cmd_sparsify(input: &Path, cfg: &ConfigArgs, output: Option<&Path>) -> Result<(), Error> {
    let config = cfg.resolve_loose(ExperimentKind::MaxcutGrid)?;
    let source = read_text(input)?;
    let dense = parse_instance(&source)?;
    let k = config.sparsify.resolve_k(dense.max_degree())?;
    let embedding = sparsify(&dense, k, config.sparsify.w0)?;
    let mut text = String::new();
    writeln!(text, "# meta command=sparsify input_sha={}", digest16(&source)).unwrap();
    writeln!(
        text,
        "# meta k={k} w0={} copies={}",
        fmt_f64(embedding.w0()),
        embedding.copies_per_node()
    )
    .unwrap();
    writeln!(
        text,
        "# meta core_version={CORE_VERSION} rng={}",
        pbit_core::rng::ALGORITHM
    )
    .unwrap();
    text.push_str(&write_embedding(&embedding));
    emit(&text, output)
}

/// Swept model, optional embedding, and the logical model results are
/// reported on.
fn load_anneal_target(
    input: Option<&Path>,
    config: &ExperimentConfig,
) -> Result<(IsingModel, Option<SparseEmbedding>, IsingModel, Option<String>), Error> {
    match input {
        Some(path) => {
            let text = read_text(path)?;
            let digest = Some(digest16(&text));
            let is_embedding = text.lines().any(|l| {
                let body = l.split('#').next().unwrap_or("").trim_start();
                body.starts_with("copy ") || body.starts_with("meta ")
            });
            if is_embedding {
                let embedding = parse_embedding(&text)?;
                let logical = embedding.logical_model()?;
                Ok((
                    embedding.physical().clone(),
                    Some(embedding),
                    logical,
                    digest,
                ))
            } else {
                let model = parse_instance(&text)?;
                Ok((model.clone(), None, model, digest))
            }
        }
        None => {
            let spec = InstanceSpec::new(
                config.instance.n,
                config.instance.edge_probability,
                config.instance.seed,
            )?;
            let model = generate_er_maxcut(&spec)?;
            Ok((model.clone(), None, model, None))
        }
    }
}

struct AnnealRow {
    trial: u64,
    seed: u64,
    energy: f64,
    cut: f64,
    conflict_fraction: f64,
    clamp_warnings: u64,
    state: String,
}

fn cmd_anneal(
    input: Option<&Path>,
    trajectory: Option<&Path>,
    record_every: u64,
    quantize: bool,
    cfg: &ConfigArgs,
    workers: usize,
    output: Option<&Path>,
) -> Result<(), Error> {
    let config = cfg.resolve_loose(ExperimentKind::MaxcutGrid)?;
    if config.trials == 0 {
        return Err(Error::InvalidSpec("trials must be >= 1".into()));
    }
    let schedule = config.schedule.build()?;
    let (swept, embedding, logical, input_digest) = load_anneal_target(input, &config)?;
    let quant = quantize.then(FixedPointSpec::default);
    let spec = RngSpec::new(config.master_seed);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("worker pool: {e}")))?;
    let rows: Vec<AnnealRow> = pool.install(|| {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| -> Result<AnnealRow, Error> {
                let trial = spec.trial(t);
                let result =
                    simulated_anneal(&swept, &schedule, SweepKind::Sequential, &trial, quant)?;
                let (solution, conflict) = match &embedding {
                    Some(emb) => {
                        let conflict = emb.chain_break_fraction(&result.best_state)?;
                        let policy = pbit_core::experiments::decode_policy_for(
                            emb,
                            trial.decode_seed(),
                        );
                        let mut decoder = Decoder::new(policy);
                        (decoder.decode(emb, &result.best_state)?, conflict)
                    }
                    None => (result.best_state.clone(), 0.0),
                };
                Ok(AnnealRow {
                    trial: t,
                    seed: trial.master_seed,
                    energy: logical.energy(&solution)?,
                    cut: logical.cut_value(&solution)?,
                    conflict_fraction: conflict,
                    clamp_warnings: result.clamp_warnings,
                    state: write_state(&solution),
                })
            })
            .collect::<Result<_, Error>>()
    })?;

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &[
            "trial",
            "seed",
            "config_hash",
            "energy",
            "cut",
            "conflict_fraction",
            "clamp_warnings",
            "state",
        ],
        &config,
        &hash,
    );
    table.meta("command", "anneal");
    if let Some(digest) = &input_digest {
        table.meta("input_sha", digest.clone());
    }
    if quantize {
        table.meta("quantize", "s1.i6.f3");
    }
    for r in &rows {
        table.row(vec![
            r.trial.to_string(),
            r.seed.to_string(),
            hash.clone(),
            fmt_f64(r.energy),
            fmt_f64(r.cut),
            fmt_f64(r.conflict_fraction),
            r.clamp_warnings.to_string(),
            r.state.clone(),
        ]);
    }
    emit(&table.render(), output)?;

    if let Some(path) = trajectory {
        let (_, rows) = simulated_anneal_recorded(
            &swept,
            &schedule,
            SweepKind::Sequential,
            &spec.trial(0),
            quant,
            record_every,
        )?;
        fs::write(path, trajectory_csv(&rows, &config))?;
    }
    Ok(())
}
