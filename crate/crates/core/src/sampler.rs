//! Gibbs sampling, chromatic-parallel sweeps, simulated annealing, and the
//! hardware cost model.
//!
//! A p-bit update sets spin i to +1 with probability
//! `(1 + tanh(beta * I_i)) / 2` where `I_i = sum_j J_ij m_j + h_i`. One
//! Monte Carlo sweep (MCS) updates every node once: the sequential kernel
//! visits nodes in index order against the partially updated state, the
//! chromatic kernel updates one proper color class at a time with all nodes
//! of a class reading the pre-class state.
//!
//! Every node draws from its own derived RNG stream and consumes exactly one
//! uniform per sweep, so a chromatic sweep is bit-identical under any
//! intra-class execution order, and the two kernels coincide exactly on
//! edgeless graphs.

use crate::coloring::SweepPlan;
use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};
use crate::rng::{derive_stream, Purpose, SplitMix64};

/// Master seed plus the pinned derivation rule (see [`crate::rng`]):
/// per-node Init streams for initial states, per-node Update streams for
/// sweep draws, a Decode stream for conflict coins, and TrialSplit for
/// per-trial masters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub master_seed: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64) -> Self {
        RngSpec { master_seed }
    }

    /// Master spec for trial `t` of an experiment seeded by `self`.
    pub fn trial(&self, t: u64) -> RngSpec {
        RngSpec {
            master_seed: crate::rng::derive_seed(self.master_seed, Purpose::TrialSplit, t),
        }
    }

    /// Seed for the decode stream of this trial.
    pub fn decode_seed(&self) -> u64 {
        self.master_seed
    }

    /// Per-node update streams.
    pub fn update_streams(&self, n: usize) -> NodeRngs {
        NodeRngs {
            streams: (0..n)
                .map(|i| derive_stream(self.master_seed, Purpose::Update, i as u64))
                .collect(),
        }
    }

    /// Uniform random initial state: one draw from each node's Init stream.
    pub fn initial_state(&self, n: usize) -> SpinState {
        let spins = (0..n)
            .map(|i| derive_stream(self.master_seed, Purpose::Init, i as u64).next_spin())
            .collect();
        SpinState::new(spins).expect("next_spin yields only +1/-1")
    }
}

/// One SplitMix64 stream per node.
#[derive(Debug, Clone)]
pub struct NodeRngs {
    streams: Vec<SplitMix64>,
}

impl NodeRngs {
    pub fn len(&self) -> usize {
        self.streams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.streams.is_empty()
    }

    #[inline]
    pub fn draw(&mut self, node: usize) -> f64 {
        self.streams[node].next_f64()
    }
}

/// Local field I_i = sum_j J_ij m_j + h_i.
pub fn local_field(model: &IsingModel, state: &SpinState, i: usize) -> Result<f64> {
    if i >= model.n() {
        return Err(Error::InvalidModel(format!(
            "node index {i} out of range for n = {}",
            model.n()
        )));
    }
    if state.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: state.len(),
        });
    }
    Ok(field_unchecked(model, state, i))
}

#[inline]
fn field_unchecked(model: &IsingModel, state: &SpinState, i: usize) -> f64 {
    let mut f = model.bias(i);
    for (j, w) in model.neighbors(i) {
        f += w * f64::from(state.get(j));
    }
    f
}

#[inline]
fn gibbs_update(field: f64, beta: f64, u: f64) -> i8 {
    let p_plus = 0.5 * (1.0 + (beta * field).tanh());
    if u < p_plus {
        1
    } else {
        -1
    }
}

fn check_sweep_inputs(model: &IsingModel, state: &SpinState, rngs: &NodeRngs) -> Result<()> {
    if state.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: state.len(),
        });
    }
    if rngs.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: rngs.len(),
        });
    }
    Ok(())
}

/// One sequential MCS: nodes in index order, each update reading the
/// partially updated state. Consumes one uniform per node.
pub fn gibbs_sweep_sequential(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    rngs: &mut NodeRngs,
) -> Result<()> {
    check_sweep_inputs(model, state, rngs)?;
    sequential_sweep_unchecked(model, state, beta, rngs);
    Ok(())
}

#[inline]
fn sequential_sweep_unchecked(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    rngs: &mut NodeRngs,
) {
    for i in 0..model.n() {
        let f = field_unchecked(model, state, i);
        state.set(i, gibbs_update(f, beta, rngs.draw(i)));
    }
}

/// One chromatic MCS: classes in plan order, all nodes of a class updated
/// from the pre-class state. The plan is validated against the model on
/// every call; anneal loops validate once and use the internal kernel.
pub fn gibbs_sweep_chromatic(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    plan: &SweepPlan,
    rngs: &mut NodeRngs,
) -> Result<()> {
    check_sweep_inputs(model, state, rngs)?;
    plan.validate(model)?;
    let mut scratch = Vec::new();
    chromatic_sweep_unchecked(model, state, beta, plan, rngs, &mut scratch);
    Ok(())
}

#[inline]
fn chromatic_sweep_unchecked(
    model: &IsingModel,
    state: &mut SpinState,
    beta: f64,
    plan: &SweepPlan,
    rngs: &mut NodeRngs,
    scratch: &mut Vec<(usize, i8)>,
) {
    for class in plan.classes() {
        scratch.clear();
        for &i in class {
            let f = field_unchecked(model, state, i);
            scratch.push((i, gibbs_update(f, beta, rngs.draw(i))));
        }
        for &(i, v) in scratch.iter() {
            state.set(i, v);
        }
    }
}

/// Inverse-temperature ladder with per-step sweep budget and a recorded
/// readout tail at the final beta.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    betas: Vec<f64>,
    sweeps_per_beta: u64,
    readout_tail: u64,
}

impl AnnealSchedule {
    pub fn new(betas: Vec<f64>, sweeps_per_beta: u64, readout_tail: u64) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidSpec("schedule needs at least one beta".into()));
        }
        if betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidSpec("betas must be finite".into()));
        }
        if betas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("betas must be strictly increasing".into()));
        }
        if sweeps_per_beta < 1 {
            return Err(Error::InvalidSpec("sweeps_per_beta must be >= 1".into()));
        }
        if readout_tail < 1 || readout_tail > sweeps_per_beta {
            return Err(Error::InvalidSpec(
                "readout_tail must be in 1..=sweeps_per_beta".into(),
            ));
        }
        Ok(AnnealSchedule {
            betas,
            sweeps_per_beta,
            readout_tail,
        })
    }

    /// The linear ladder beta = 0.125, 0.25, ..., 1.0.
    pub fn ladder(sweeps_per_beta: u64, readout_tail: u64) -> Result<Self> {
        let betas = (1..=8).map(|i| f64::from(i) * 0.125).collect();
        AnnealSchedule::new(betas, sweeps_per_beta, readout_tail)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn sweeps_per_beta(&self) -> u64 {
        self.sweeps_per_beta
    }

    pub fn readout_tail(&self) -> u64 {
        self.readout_tail
    }

    pub fn total_sweeps(&self) -> u64 {
        self.sweeps_per_beta * self.betas.len() as u64
    }
}

/// Fixed-point weight format: values live on a 2^-fraction_bits grid with
/// magnitude < 2^integer_bits. The hardware-faithful default is 1 sign bit,
/// 6 integer bits, 3 fraction bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointSpec {
    pub sign_bits: u8,
    pub integer_bits: u8,
    pub fraction_bits: u8,
}

impl Default for FixedPointSpec {
    fn default() -> Self {
        FixedPointSpec {
            sign_bits: 1,
            integer_bits: 6,
            fraction_bits: 3,
        }
    }
}

impl FixedPointSpec {
    pub fn step(&self) -> f64 {
        (2.0f64).powi(-i32::from(self.fraction_bits))
    }

    /// Largest representable magnitude: 2^integer_bits - step.
    pub fn max_value(&self) -> f64 {
        (2.0f64).powi(i32::from(self.integer_bits)) - self.step()
    }

    /// Nearest grid value, ties away from zero; out-of-range input clamps
    /// to +/-max_value and sets the flag.
    pub fn quantize(&self, x: f64) -> (f64, bool) {
        let rounded = (x / self.step()).round() * self.step();
        let max = self.max_value();
        if rounded > max {
            (max, true)
        } else if rounded < -max {
            (-max, true)
        } else {
            (rounded, false)
        }
    }
}

/// Model with beta * J and beta * h rounded to the fixed-point grid, plus
/// the number of clamped (out-of-range) values. Sweep the result at beta = 1.
pub fn quantize_weights(
    model: &IsingModel,
    beta: f64,
    spec: &FixedPointSpec,
) -> Result<(IsingModel, u64)> {
    let mut out = IsingModel::new(model.n());
    let mut warnings = 0u64;
    for (i, j, w) in model.edges() {
        let (q, clamped) = spec.quantize(beta * w);
        warnings += u64::from(clamped);
        if q != 0.0 {
            out.set_coupling(i, j, q)?;
        }
    }
    for i in 0..model.n() {
        let h = model.bias(i);
        if h != 0.0 {
            let (q, clamped) = spec.quantize(beta * h);
            warnings += u64::from(clamped);
            out.set_bias(i, q)?;
        }
    }
    Ok((out, warnings))
}

/// Sweep kernel selection for the anneal loop.
#[derive(Debug, Clone, Copy)]
pub enum SweepKind<'a> {
    Sequential,
    Chromatic(&'a SweepPlan),
}

#[derive(Debug, Clone)]
pub struct AnnealResult {
    /// Minimum-energy state among the tail readouts (first occurrence).
    pub best_state: SpinState,
    /// Its energy on the original, unquantized model.
    pub best_energy: f64,
    /// The last readout_tail states at the final beta, in sweep order.
    pub tail_readouts: Vec<SpinState>,
    /// Fixed-point clamp events, nonzero only when quantization is on.
    pub clamp_warnings: u64,
}

/// One row of an opt-in trajectory dump.
#[derive(Debug, Clone)]
pub struct TrajectoryRow {
    pub sweep: u64,
    pub beta: f64,
    pub energy: f64,
    pub state: SpinState,
}

/// Simulated annealing: starting from a uniformly random state, runs
/// `sweeps_per_beta` MCS at each beta in order, recording the last
/// `readout_tail` states at the final beta. The solution is the
/// minimum-energy recorded state.
///
/// With `quantize` set, each beta step sweeps a model whose weights are
/// `beta * J` rounded to the fixed-point grid (at unit temperature);
/// recorded energies always refer to the original model.
pub fn simulated_anneal(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    kind: SweepKind,
    rng: &RngSpec,
    quantize: Option<FixedPointSpec>,
) -> Result<AnnealResult> {
    anneal_inner(model, schedule, kind, rng, quantize, None).map(|(r, _)| r)
}

/// [`simulated_anneal`] that also records every `record_every`-th sweep
/// (global sweep counter starting at 1) as a trajectory row.
pub fn simulated_anneal_recorded(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    kind: SweepKind,
    rng: &RngSpec,
    quantize: Option<FixedPointSpec>,
    record_every: u64,
) -> Result<(AnnealResult, Vec<TrajectoryRow>)> {
    if record_every == 0 {
        return Err(Error::InvalidSpec("record_every must be >= 1".into()));
    }
    anneal_inner(model, schedule, kind, rng, quantize, Some(record_every))
        .map(|(r, rows)| (r, rows.expect("recording was requested")))
}

fn anneal_inner(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    kind: SweepKind,
    rng: &RngSpec,
    quantize: Option<FixedPointSpec>,
    record_every: Option<u64>,
) -> Result<(AnnealResult, Option<Vec<TrajectoryRow>>)> {
    let n = model.n();
    if let SweepKind::Chromatic(plan) = kind {
        plan.validate(model)?;
    }
    let mut state = rng.initial_state(n);
    let mut rngs = rng.update_streams(n);
    let mut scratch = Vec::new();
    let mut tail: Vec<SpinState> = Vec::with_capacity(schedule.readout_tail as usize);
    let mut rows = record_every.map(|_| Vec::new());
    let mut warnings = 0u64;
    let mut sweep_counter = 0u64;
    let last_beta_idx = schedule.betas.len() - 1;

    for (bi, &beta) in schedule.betas.iter().enumerate() {
        let quantized;
        let (run_model, run_beta) = match quantize {
            Some(spec) => {
                let (qm, w) = quantize_weights(model, beta, &spec)?;
                warnings += w;
                quantized = qm;
                (&quantized, 1.0)
            }
            None => (model, beta),
        };
        for s in 0..schedule.sweeps_per_beta {
            match kind {
                SweepKind::Sequential => {
                    sequential_sweep_unchecked(run_model, &mut state, run_beta, &mut rngs)
                }
                SweepKind::Chromatic(plan) => chromatic_sweep_unchecked(
                    run_model, &mut state, run_beta, plan, &mut rngs, &mut scratch,
                ),
            }
            sweep_counter += 1;
            if let (Some(every), Some(rows)) = (record_every, rows.as_mut()) {
                if sweep_counter % every == 0 {
                    rows.push(TrajectoryRow {
                        sweep: sweep_counter,
                        beta,
                        energy: model.energy(&state)?,
                        state: state.clone(),
                    });
                }
            }
            if bi == last_beta_idx && s >= schedule.sweeps_per_beta - schedule.readout_tail {
                tail.push(state.clone());
            }
        }
    }

    let mut best_state = tail[0].clone();
    let mut best_energy = model.energy(&best_state)?;
    for s in &tail[1..] {
        let e = model.energy(s)?;
        if e < best_energy {
            best_energy = e;
            best_state = s.clone();
        }
    }
    Ok((
        AnnealResult {
            best_state,
            best_energy,
            tail_readouts: tail,
            clamp_warnings: warnings,
        },
        rows,
    ))
}

/// Hardware topology of the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    AllToAll,
    Sparse,
}

/// Reference size at which the all-to-all relative frequency is normalized
/// to 1.
pub const COST_REFERENCE_N: usize = 100;

/// Clock cycles per MCS and relative sweep frequency.
///
/// All-to-all hardware updates sequentially (N cycles per MCS) through an
/// N-input adder whose delay grows linearly in N, so the sweep frequency
/// falls as (N_ref/N)^2. Sparse hardware updates one color class per cycle
/// with a fixed-fan-in adder: cycles = class count, frequency constant 1.
pub fn sweep_cost(model: &IsingModel, plan: &SweepPlan, topology: Topology) -> (u64, f64) {
    match topology {
        Topology::AllToAll => {
            let n = model.n();
            let rel = (COST_REFERENCE_N as f64 / n as f64).powi(2);
            (n as u64, rel)
        }
        Topology::Sparse => (plan.class_count() as u64, 1.0),
    }
}
