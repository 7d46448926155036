//! Experiment execution. Each runner consumes a validated config and
//! produces typed rows plus rendered CSV. Trials run concurrently on a
//! local thread pool; every trial derives its own seed from the master
//! seed and results are reduced in trial order, so output does not depend
//! on the worker count.

use rayon::prelude::*;

use super::config::{
    ExperimentConfig, ExperimentKind, FssTopology, COST_DEFAULT_K,
};
use super::csv::{fmt_f64, CsvTable};
use crate::analysis::{
    boltzmann_exact, fss_collapse, kl_divergence, mean, optimum_tolerance, stderr_of_mean,
    CollapseResult, Distribution, ResidualCurve, ResidualPoint,
};
use crate::coloring::{color_graph, SweepPlan};
use crate::error::{Error, Result};
use crate::invlogic::{build_multiplier, clamp_output, GateLibrary};
use crate::model::{generate_er_maxcut, InstanceSpec};
use crate::oracle::{brute_force_ground, brute_force_max_cut};
use crate::rng::{derive_seed, Purpose};
use crate::sampler::{
    gibbs_sweep_sequential, simulated_anneal, sweep_cost, RngSpec, SweepKind, Topology,
};
use crate::sparsify::{sparsify, DecodePolicy, Decoder, SparseEmbedding};

/// Rendered output: the main CSV plus any named auxiliary tables.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub primary: String,
    /// (suffix, csv) pairs, written next to the primary file.
    pub aux: Vec<(&'static str, String)>,
}

pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.kind {
        ExperimentKind::BoltzmannFa => Ok(ExperimentOutput {
            primary: run_boltzmann_fa(config, workers)?.csv,
            aux: Vec::new(),
        }),
        ExperimentKind::W0Sweep => Ok(ExperimentOutput {
            primary: run_w0_sweep(config, workers)?.csv,
            aux: Vec::new(),
        }),
        ExperimentKind::MaxcutGrid => Ok(ExperimentOutput {
            primary: run_maxcut_grid(config, workers)?.csv,
            aux: Vec::new(),
        }),
        ExperimentKind::ResidualFss => {
            let report = run_residual_fss(config, workers)?;
            Ok(ExperimentOutput {
                primary: report.csv,
                aux: vec![("collapse", report.collapse_csv)],
            })
        }
        ExperimentKind::Factor => Ok(ExperimentOutput {
            primary: run_factor(config, workers)?.csv,
            aux: Vec::new(),
        }),
        ExperimentKind::CostModel => Ok(ExperimentOutput {
            primary: run_cost_model(config)?.csv,
            aux: Vec::new(),
        }),
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("worker pool: {e}")))
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.kind != kind {
        return Err(Error::InvalidSpec(format!(
            "config kind is {:?}, runner expects {kind:?}",
            config.kind
        )));
    }
    config.validate()
}

/// Instance seed for the i-th instance of a run.
fn instance_seed(base: u64, index: u64) -> u64 {
    derive_seed(base, Purpose::Init, index)
}

/// Coin-flip decoding for 2-copy chains, majority vote for longer ones.
pub fn decode_policy_for(embedding: &SparseEmbedding, seed: u64) -> DecodePolicy {
    if embedding.copies_per_node() <= 2 {
        DecodePolicy::CoinFlip { seed }
    } else {
        DecodePolicy::MajorityVote { seed }
    }
}

/// 0/1 indicators for cut values hitting the optimum.
fn success_flags(cuts: &[f64], optimum: f64) -> Vec<f64> {
    let tol = optimum_tolerance(optimum);
    cuts.iter()
        .map(|&c| f64::from(u8::from((c - optimum).abs() <= tol)))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct BoltzmannRow {
    pub w0: f64,
    pub seed: u64,
    pub samples: u64,
    pub kl: f64,
    pub conflict_fraction: f64,
    pub conflict_stderr: f64,
}

#[derive(Debug, Clone)]
pub struct BoltzmannReport {
    pub rows: Vec<BoltzmannRow>,
    pub csv: String,
}

/// Sparsified full-adder Gibbs chain per W0: KL of the decoded logical
/// histogram against the exact dense Boltzmann distribution, plus the mean
/// chain-conflict fraction.
pub fn run_boltzmann_fa(config: &ExperimentConfig, workers: usize) -> Result<BoltzmannReport> {
    expect_kind(config, ExperimentKind::BoltzmannFa)?;
    let pool = build_pool(workers)?;
    let library = GateLibrary::standard()?;
    let dense = library.full_adder.model();
    let beta = config.sampling.beta;
    let exact = boltzmann_exact(&dense, beta)?;
    let k = config.sparsify.resolve_k(dense.max_degree())?;
    let sweeps = config.sampling.sweeps;
    let burn_in = config.sampling.burn_in;
    let master = config.master_seed;

    let rows: Vec<BoltzmannRow> = pool.install(|| {
        config
            .sparsify
            .w0_grid
            .par_iter()
            .enumerate()
            .map(|(idx, &w0)| -> Result<BoltzmannRow> {
                let seed = derive_seed(master, Purpose::TrialSplit, idx as u64);
                let spec = RngSpec::new(seed);
                let embedding = sparsify(&dense, k, w0)?;
                let n_phys = embedding.physical().n();
                let mut rngs = spec.update_streams(n_phys);
                let mut state = spec.initial_state(n_phys);
                let mut decoder =
                    Decoder::new(decode_policy_for(&embedding, spec.decode_seed()));
                let mut counts = vec![0u64; 1 << dense.n()];
                let (mut conflict_sum, mut conflict_sq) = (0.0, 0.0);
                for sweep in 1..=sweeps {
                    gibbs_sweep_sequential(embedding.physical(), &mut state, beta, &mut rngs)?;
                    if sweep > burn_in {
                        let logical = decoder.decode(&embedding, &state)?;
                        counts[logical.to_index() as usize] += 1;
                        let cbf = embedding.chain_break_fraction(&state)?;
                        conflict_sum += cbf;
                        conflict_sq += cbf * cbf;
                    }
                }
                let samples = sweeps - burn_in;
                let total = samples as f64;
                let empirical = Distribution::new(
                    dense.n(),
                    counts.iter().map(|&c| c as f64 / total).collect(),
                )?;
                let kl = kl_divergence(&empirical, &exact)?;
                let conflict_mean = conflict_sum / total;
                let variance =
                    ((conflict_sq - total * conflict_mean * conflict_mean) / (total - 1.0))
                        .max(0.0);
                Ok(BoltzmannRow {
                    w0,
                    seed,
                    samples,
                    kl,
                    conflict_fraction: conflict_mean,
                    conflict_stderr: (variance / total).sqrt(),
                })
            })
            .collect::<Result<_>>()
    })?;

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &[
            "w0",
            "seed",
            "config_hash",
            "samples",
            "kl",
            "conflict_fraction",
            "conflict_stderr",
        ],
        config,
        &hash,
    );
    table.meta("degree_bound", k.to_string());
    for r in &rows {
        table.row(vec![
            fmt_f64(r.w0),
            r.seed.to_string(),
            hash.clone(),
            r.samples.to_string(),
            fmt_f64(r.kl),
            fmt_f64(r.conflict_fraction),
            fmt_f64(r.conflict_stderr),
        ]);
    }
    Ok(BoltzmannReport {
        rows,
        csv: table.render(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub w0: f64,
    pub seed: u64,
    pub trials: usize,
    pub success_prob: f64,
    pub success_stderr: f64,
    pub approx_ratio: f64,
    pub ratio_stderr: f64,
}

#[derive(Debug, Clone)]
pub struct W0SweepReport {
    pub optimum_cut: f64,
    pub degree_bound: usize,
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

/// Sparse Max-Cut annealing across the W0 grid on one ER instance.
pub fn run_w0_sweep(config: &ExperimentConfig, workers: usize) -> Result<W0SweepReport> {
    expect_kind(config, ExperimentKind::W0Sweep)?;
    let pool = build_pool(workers)?;
    let spec = InstanceSpec::new(
        config.instance.n,
        config.instance.edge_probability,
        instance_seed(config.instance.seed, 0),
    )?;
    let dense = generate_er_maxcut(&spec)?;
    let (optimum, _) = brute_force_max_cut(&dense)?;
    let k = config.sparsify.resolve_k(dense.max_degree())?;
    let schedule = config.schedule.build()?;
    let trials = config.trials;
    let master = config.master_seed;

    let mut rows = Vec::with_capacity(config.sparsify.w0_grid.len());
    for (idx, &w0) in config.sparsify.w0_grid.iter().enumerate() {
        let embedding = sparsify(&dense, k, w0)?;
        let seed = derive_seed(master, Purpose::TrialSplit, idx as u64);
        let row_spec = RngSpec::new(seed);
        let cuts: Vec<f64> = pool.install(|| {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| -> Result<f64> {
                    let trial = row_spec.trial(t);
                    let result = simulated_anneal(
                        embedding.physical(),
                        &schedule,
                        SweepKind::Sequential,
                        &trial,
                        None,
                    )?;
                    let mut decoder =
                        Decoder::new(decode_policy_for(&embedding, trial.decode_seed()));
                    let logical = decoder.decode(&embedding, &result.best_state)?;
                    dense.cut_value(&logical)
                })
                .collect::<Result<_>>()
        })?;
        let flags = success_flags(&cuts, optimum);
        let ratios: Vec<f64> = cuts.iter().map(|&c| c / optimum).collect();
        rows.push(SweepRow {
            w0,
            seed,
            trials,
            success_prob: mean(&flags),
            success_stderr: stderr_of_mean(&flags),
            approx_ratio: mean(&ratios),
            ratio_stderr: stderr_of_mean(&ratios),
        });
    }

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &[
            "w0",
            "seed",
            "config_hash",
            "trials",
            "success_prob",
            "success_stderr",
            "approx_ratio",
            "ratio_stderr",
        ],
        config,
        &hash,
    );
    table.meta("optimum_cut", fmt_f64(optimum));
    table.meta("degree_bound", k.to_string());
    for r in &rows {
        table.row(vec![
            fmt_f64(r.w0),
            r.seed.to_string(),
            hash.clone(),
            r.trials.to_string(),
            fmt_f64(r.success_prob),
            fmt_f64(r.success_stderr),
            fmt_f64(r.approx_ratio),
            fmt_f64(r.ratio_stderr),
        ]);
    }
    Ok(W0SweepReport {
        optimum_cut: optimum,
        degree_bound: k,
        rows,
        csv: table.render(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct GridRow {
    pub instance: usize,
    pub instance_seed: u64,
    pub seed: u64,
    pub trials: usize,
    pub optimum_cut: f64,
    pub success_prob: f64,
    pub success_stderr: f64,
    pub approx_ratio: f64,
    pub ratio_stderr: f64,
}

#[derive(Debug, Clone)]
pub struct MaxcutGridReport {
    pub rows: Vec<GridRow>,
    pub csv: String,
}

/// Dense annealing baseline over `instance.count` ER instances.
pub fn run_maxcut_grid(config: &ExperimentConfig, workers: usize) -> Result<MaxcutGridReport> {
    expect_kind(config, ExperimentKind::MaxcutGrid)?;
    let pool = build_pool(workers)?;
    let schedule = config.schedule.build()?;
    let trials = config.trials;
    let master = config.master_seed;

    let mut rows = Vec::with_capacity(config.instance.count);
    for i in 0..config.instance.count {
        let iseed = instance_seed(config.instance.seed, i as u64);
        let spec =
            InstanceSpec::new(config.instance.n, config.instance.edge_probability, iseed)?;
        let dense = generate_er_maxcut(&spec)?;
        let (optimum, _) = brute_force_max_cut(&dense)?;
        let seed = derive_seed(master, Purpose::TrialSplit, i as u64);
        let row_spec = RngSpec::new(seed);
        let cuts: Vec<f64> = pool.install(|| {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| -> Result<f64> {
                    let trial = row_spec.trial(t);
                    let result = simulated_anneal(
                        &dense,
                        &schedule,
                        SweepKind::Sequential,
                        &trial,
                        None,
                    )?;
                    dense.cut_value(&result.best_state)
                })
                .collect::<Result<_>>()
        })?;
        let flags = success_flags(&cuts, optimum);
        let ratios: Vec<f64> = cuts.iter().map(|&c| c / optimum).collect();
        rows.push(GridRow {
            instance: i,
            instance_seed: iseed,
            seed,
            trials,
            optimum_cut: optimum,
            success_prob: mean(&flags),
            success_stderr: stderr_of_mean(&flags),
            approx_ratio: mean(&ratios),
            ratio_stderr: stderr_of_mean(&ratios),
        });
    }

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &[
            "instance",
            "instance_seed",
            "seed",
            "config_hash",
            "trials",
            "optimum_cut",
            "success_prob",
            "success_stderr",
            "approx_ratio",
            "ratio_stderr",
        ],
        config,
        &hash,
    );
    for r in &rows {
        table.row(vec![
            r.instance.to_string(),
            r.instance_seed.to_string(),
            r.seed.to_string(),
            hash.clone(),
            r.trials.to_string(),
            fmt_f64(r.optimum_cut),
            fmt_f64(r.success_prob),
            fmt_f64(r.success_stderr),
            fmt_f64(r.approx_ratio),
            fmt_f64(r.ratio_stderr),
        ]);
    }
    Ok(MaxcutGridReport {
        rows,
        csv: table.render(),
    })
}

#[derive(Debug, Clone)]
pub struct FssReport {
    pub curves: Vec<ResidualCurve>,
    pub collapse: CollapseResult,
    pub csv: String,
    pub collapse_csv: String,
}

/// The collapse fixes b at the mean-field value -1/2 throughout.
pub const FSS_B: f64 = -0.5;

/// Residual-energy relaxation curves per size and a scaling collapse.
///
/// Real mode anneals each (size, anneal time) point `trials` times with
/// the instantaneous final-state readout; sparse topology decodes through
/// the per-size embedding first. Synthetic mode injects exact curves
/// rho = N^(1/2) G(t N^-mu) from a smooth master function to exercise the
/// collapse machinery end to end.
pub fn run_residual_fss(config: &ExperimentConfig, workers: usize) -> Result<FssReport> {
    expect_kind(config, ExperimentKind::ResidualFss)?;
    let (curves, sampled) = match config.fss.synthetic_mu {
        Some(mu) => (synthetic_curves(&config.fss.sizes, mu), false),
        None => (sample_curves(config, workers)?, true),
    };
    let collapse = fss_collapse(&curves, FSS_B, config.fss.bracket)?;

    let hash = config.hash();
    let topology = match config.fss.topology {
        FssTopology::Dense => "dense",
        FssTopology::Sparse => "sparse",
    };
    let mode = if sampled { topology } else { "synthetic" };
    let mut table = CsvTable::with_provenance(
        &[
            "topology",
            "n",
            "t_a",
            "seed",
            "config_hash",
            "trials",
            "rho_e",
            "rho_stderr",
        ],
        config,
        &hash,
    );
    let trials = if sampled { config.trials } else { 0 };
    let mut row_index = 0u64;
    for curve in &curves {
        for p in &curve.points {
            let seed = if sampled {
                derive_seed(config.master_seed, Purpose::TrialSplit, row_index)
            } else {
                config.master_seed
            };
            row_index += 1;
            table.row(vec![
                mode.to_string(),
                curve.n.to_string(),
                fmt_f64(p.t_a),
                seed.to_string(),
                hash.clone(),
                trials.to_string(),
                fmt_f64(p.rho_e),
                fmt_f64(p.stderr),
            ]);
        }
    }

    let mut summary = CsvTable::with_provenance(
        &["b", "mu", "quality", "sizes", "seed", "config_hash"],
        config,
        &hash,
    );
    let sizes = collapse
        .curves_used
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(";");
    summary.row(vec![
        fmt_f64(collapse.b),
        fmt_f64(collapse.mu),
        fmt_f64(collapse.quality),
        sizes,
        config.master_seed.to_string(),
        hash,
    ]);

    Ok(FssReport {
        curves,
        collapse,
        csv: table.render(),
        collapse_csv: summary.render(),
    })
}

/// Exact curves from a known master function (machinery check): log-spaced
/// x so the rescaled ranges overlap, G(x) = 1/(1+x)^0.8.
fn synthetic_curves(sizes: &[usize], mu: f64) -> Vec<ResidualCurve> {
    let g = |x: f64| 1.0 / (1.0 + x).powf(0.8);
    sizes
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let points = (0..40)
                .map(|k| {
                    let x = 0.01 * (10.0f64).powf(k as f64 * 0.1);
                    ResidualPoint {
                        t_a: x * nf.powf(mu),
                        rho_e: nf.powf(-FSS_B) * g(x),
                        stderr: 0.0,
                    }
                })
                .collect();
            ResidualCurve::new(n, points).expect("t_a grid is increasing")
        })
        .collect()
}

fn sample_curves(config: &ExperimentConfig, workers: usize) -> Result<Vec<ResidualCurve>> {
    let pool = build_pool(workers)?;
    let trials = config.trials;
    let master = config.master_seed;
    let mut curves = Vec::with_capacity(config.fss.sizes.len());
    let mut row_index = 0u64;
    let count = config.instance.count;
    for &n in &config.fss.sizes {
        // Quenched average over `instance.count` disorder realisations per
        // size; at these sizes single instances vary enough in hardness to
        // swamp the size trend the collapse is trying to measure. Each
        // realisation carries its own exact ground energy (and embedding,
        // for the sparse topology).
        let mut realisations = Vec::with_capacity(count);
        for c in 0..count as u64 {
            let spec = InstanceSpec::new(
                n,
                config.instance.edge_probability,
                instance_seed(config.instance.seed, c << 32 | n as u64),
            )?;
            let dense = generate_er_maxcut(&spec)?;
            let (e_gs, _) = brute_force_ground(&dense)?;
            let embedding = match config.fss.topology {
                FssTopology::Dense => None,
                FssTopology::Sparse => {
                    let k = config.sparsify.resolve_k(dense.max_degree())?;
                    Some(sparsify(&dense, k, config.sparsify.w0)?)
                }
            };
            realisations.push((dense, e_gs, embedding));
        }
        let mut points = Vec::with_capacity(config.fss.anneal_times.len());
        for &t_a in &config.fss.anneal_times {
            let schedule = config.schedule.build_for_budget(t_a)?;
            let row_spec = RngSpec::new(derive_seed(master, Purpose::TrialSplit, row_index));
            row_index += 1;
            let residuals: Vec<f64> = pool.install(|| {
                (0..count as u64 * trials as u64)
                    .into_par_iter()
                    .map(|i| -> Result<f64> {
                        let (dense, e_gs, embedding) =
                            &realisations[(i / trials as u64) as usize];
                        let trial = row_spec.trial(i);
                        let state = match embedding {
                            None => {
                                simulated_anneal(
                                    dense,
                                    &schedule,
                                    SweepKind::Sequential,
                                    &trial,
                                    None,
                                )?
                                .best_state
                            }
                            Some(emb) => {
                                let result = simulated_anneal(
                                    emb.physical(),
                                    &schedule,
                                    SweepKind::Sequential,
                                    &trial,
                                    None,
                                )?;
                                let mut decoder = Decoder::new(decode_policy_for(
                                    emb,
                                    trial.decode_seed(),
                                ));
                                decoder.decode(emb, &result.best_state)?
                            }
                        };
                        Ok((dense.energy(&state)? - e_gs) / n as f64)
                    })
                    .collect::<Result<_>>()
            })?;
            points.push(ResidualPoint {
                t_a: t_a as f64,
                rho_e: mean(&residuals),
                stderr: stderr_of_mean(&residuals),
            });
        }
        curves.push(ResidualCurve::new(n, points)?);
    }
    Ok(curves)
}

#[derive(Debug, Clone, Copy)]
pub struct FactorTrialRow {
    pub trial: u64,
    pub seed: u64,
    pub p: u64,
    pub q: u64,
    pub f: u64,
    pub success: bool,
}

#[derive(Debug, Clone)]
pub struct FactorReport {
    pub rows: Vec<FactorTrialRow>,
    pub success_rate: f64,
    pub net_spins: usize,
    pub live_spins: usize,
    pub density: f64,
    pub weight_magnitudes: Vec<f64>,
    pub csv: String,
}

/// Anneals the output-clamped multiplier net; a trial succeeds when the
/// factor ports read back p, q with p * q equal to the clamped semiprime.
pub fn run_factor(config: &ExperimentConfig, workers: usize) -> Result<FactorReport> {
    expect_kind(config, ExperimentKind::Factor)?;
    let pool = build_pool(workers)?;
    let library = GateLibrary::derive(config.factor.max_weight)?;
    let net = build_multiplier(config.factor.n_bits, &library)?;
    let clamped = clamp_output(&net, config.factor.semiprime)?;
    let reduced = clamped.reduced()?;
    let schedule = config.schedule.build()?;
    let spec = RngSpec::new(config.master_seed);
    let semiprime = config.factor.semiprime;

    let rows: Vec<FactorTrialRow> = pool.install(|| {
        (0..config.trials as u64)
            .into_par_iter()
            .map(|t| -> Result<FactorTrialRow> {
                let trial = spec.trial(t);
                let result = simulated_anneal(
                    &reduced.model,
                    &schedule,
                    SweepKind::Sequential,
                    &trial,
                    None,
                )?;
                let p = reduced.read_port(net.p_port(), &result.best_state);
                let q = reduced.read_port(net.q_port(), &result.best_state);
                let f = reduced.read_port(net.f_port(), &result.best_state);
                Ok(FactorTrialRow {
                    trial: t,
                    seed: trial.master_seed,
                    p,
                    q,
                    f,
                    success: f == semiprime && p * q == semiprime,
                })
            })
            .collect::<Result<_>>()
    })?;
    let success_rate =
        rows.iter().filter(|r| r.success).count() as f64 / rows.len().max(1) as f64;

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &["trial", "seed", "config_hash", "p", "q", "f", "success"],
        config,
        &hash,
    );
    let density = net.model().graph_density()?;
    let magnitudes = net.distinct_weight_magnitudes();
    table.meta("net_spins", net.spin_count().to_string());
    table.meta("net_live_spins", reduced.model.n().to_string());
    table.meta("net_density", fmt_f64(density));
    table.meta("distinct_weights", magnitudes.len().to_string());
    table.meta(
        "weight_magnitudes",
        magnitudes
            .iter()
            .map(|&m| fmt_f64(m))
            .collect::<Vec<_>>()
            .join(";"),
    );
    for r in &rows {
        table.row(vec![
            r.trial.to_string(),
            r.seed.to_string(),
            hash.clone(),
            r.p.to_string(),
            r.q.to_string(),
            r.f.to_string(),
            u8::from(r.success).to_string(),
        ]);
    }
    Ok(FactorReport {
        rows,
        success_rate,
        net_spins: net.spin_count(),
        live_spins: reduced.model.n(),
        density,
        weight_magnitudes: magnitudes,
        csv: table.render(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CostRow {
    pub topology: Topology,
    pub n: usize,
    pub cycles_per_mcs: u64,
    pub relative_frequency: f64,
    /// Copies per logical node (1 for all-to-all).
    pub copies: usize,
}

#[derive(Debug, Clone)]
pub struct CostReport {
    pub rows: Vec<CostRow>,
    pub csv: String,
}

/// Sweep cost across a size grid: all-to-all complete graphs vs their
/// bounded-degree sparsifications with a real greedy coloring.
pub fn run_cost_model(config: &ExperimentConfig) -> Result<CostReport> {
    expect_kind(config, ExperimentKind::CostModel)?;
    if config.sparsify.copies.is_some() {
        return Err(Error::InvalidSpec(
            "cost_model takes a fixed sparsify.k, not copies".into(),
        ));
    }
    let k = config.sparsify.k.unwrap_or(COST_DEFAULT_K);
    let mut rows = Vec::new();
    for n in config.cost.n_min..=config.cost.n_max {
        let complete =
            generate_er_maxcut(&InstanceSpec::new(n, 1.0, config.instance.seed)?)?;
        let (cycles, rel) =
            sweep_cost(&complete, &SweepPlan::sequential(n), Topology::AllToAll);
        rows.push(CostRow {
            topology: Topology::AllToAll,
            n,
            cycles_per_mcs: cycles,
            relative_frequency: rel,
            copies: 1,
        });
        let embedding = sparsify(&complete, k, config.sparsify.w0)?;
        let plan = color_graph(embedding.physical());
        let (cycles, rel) = sweep_cost(embedding.physical(), &plan, Topology::Sparse);
        rows.push(CostRow {
            topology: Topology::Sparse,
            n,
            cycles_per_mcs: cycles,
            relative_frequency: rel,
            copies: embedding.copies_per_node(),
        });
    }

    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &[
            "topology",
            "n",
            "seed",
            "config_hash",
            "cycles_per_mcs",
            "relative_frequency",
            "copies",
        ],
        config,
        &hash,
    );
    table.meta("degree_bound", k.to_string());
    for r in &rows {
        let name = match r.topology {
            Topology::AllToAll => "all_to_all",
            Topology::Sparse => "sparse",
        };
        table.row(vec![
            name.to_string(),
            r.n.to_string(),
            config.master_seed.to_string(),
            hash.clone(),
            r.cycles_per_mcs.to_string(),
            fmt_f64(r.relative_frequency),
            r.copies.to_string(),
        ]);
    }
    Ok(CostReport {
        rows,
        csv: table.render(),
    })
}

/// Rendered trajectory CSV for a recorded anneal (opt-in dump).
pub fn trajectory_csv(
    rows: &[crate::sampler::TrajectoryRow],
    config: &ExperimentConfig,
) -> String {
    let hash = config.hash();
    let mut table = CsvTable::with_provenance(
        &["sweep", "beta", "energy", "state"],
        config,
        &hash,
    );
    for r in rows {
        table.row(vec![
            r.sweep.to_string(),
            fmt_f64(r.beta),
            fmt_f64(r.energy),
            crate::io::write_state(&r.state),
        ]);
    }
    table.render()
}
