//! Simulation and analysis toolkit for p-bit Ising machines.
//!
//! The crate covers the full dense-to-sparse pipeline: dense Ising model
//! construction, bounded-degree sparsification via ferromagnetic copy
//! chains, sequential and chromatic-parallel Gibbs sampling, simulated
//! annealing on Max-Cut, copy-conflict decoding, Boltzmann-distribution
//! validation, finite-size-scaling analysis of the sparsification overhead,
//! and natively sparse invertible-logic networks for integer factorization.

pub mod analysis;
pub mod coloring;
pub mod error;
pub mod experiments;
pub mod invlogic;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod sampler;
pub mod sparsify;

pub use analysis::{
    approximation_ratio, boltzmann_exact, fss_collapse, kl_divergence, maxcut_expectation,
    reduced_empirical, residual_energy, success_probability, CollapseResult, Distribution,
    ResidualCurve, ResidualPoint,
};
pub use coloring::{color_graph, SweepPlan};
pub use error::{Error, Result};
pub use invlogic::{
    build_multiplier, clamp_output, derive_gate, pbit_count, unclamp_output, valid_triples,
    CircuitNet, Formulation, GateBinding, GateLibrary, GateLibraryEntry, GateName, ReducedNet,
};
pub use io::{
    parse_embedding, parse_instance, parse_netlist, parse_state, write_embedding, write_instance,
    write_netlist, write_state,
};
pub use model::{generate_er_maxcut, InstanceSpec, IsingModel, SpinState};
pub use oracle::{brute_force_ground, brute_force_max_cut, BRUTE_FORCE_LIMIT};
pub use rng::{derive_seed, derive_stream, Purpose, SplitMix64};
pub use sampler::{
    gibbs_sweep_chromatic, gibbs_sweep_sequential, local_field, quantize_weights,
    simulated_anneal, simulated_anneal_recorded, sweep_cost, AnnealResult, AnnealSchedule,
    FixedPointSpec, NodeRngs, RngSpec, SweepKind, Topology, TrajectoryRow,
};
pub use sparsify::{
    chain_capacity, k_for_copies, required_copies, sparsify, DecodePolicy, Decoder,
    SparseEmbedding,
};
