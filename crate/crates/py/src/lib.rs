//! Python bindings: `Model` and `Embedding` classes plus free functions for
//! annealing, Gibbs sampling, gate tables, multiplier statistics, and the
//! manifest-driven experiment runner. Spin states cross the boundary as
//! lists of +1/-1 integers.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pbit_core::experiments::{run_experiment, FSS_B};
use pbit_core::{
    boltzmann_exact, brute_force_ground, brute_force_max_cut, generate_er_maxcut,
    gibbs_sweep_sequential, kl_divergence, parse_embedding, parse_instance, simulated_anneal,
    sparsify, write_embedding, write_instance, AnnealSchedule, Decoder, Distribution, Error,
    FixedPointSpec, GateLibrary, GateName, InstanceSpec, IsingModel, RngSpec, SparseEmbedding,
    SpinState, SweepKind,
};

/// Config and parse problems become ValueError; capacity and infeasibility
/// become RuntimeError, mirroring the CLI's 2/3 exit split.
fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidSpec(_) | Error::Parse { .. } | Error::Io(_) | Error::InvalidModel(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn state_from(spins: Vec<i8>) -> PyResult<SpinState> {
    SpinState::new(spins).map_err(to_py)
}

/// Dense or sparse Ising model over +1/-1 spins.
#[pyclass(name = "Model", skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: IsingModel,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(n: usize) -> Self {
        PyModel {
            inner: IsingModel::new(n),
        }
    }

    /// ER Max-Cut instance: every edge carries J = -1.
    #[staticmethod]
    fn generate(n: usize, edge_probability: f64, seed: u64) -> PyResult<Self> {
        let spec = InstanceSpec::new(n, edge_probability, seed).map_err(to_py)?;
        Ok(PyModel {
            inner: generate_er_maxcut(&spec).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: parse_instance(text).map_err(to_py)?,
        })
    }

    fn to_text(&self) -> String {
        write_instance(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn graph_density(&self) -> PyResult<f64> {
        self.inner.graph_density().map_err(to_py)
    }

    fn set_coupling(&mut self, i: usize, j: usize, w: f64) -> PyResult<()> {
        self.inner.set_coupling(i, j, w).map_err(to_py)
    }

    fn coupling(&self, i: usize, j: usize) -> f64 {
        self.inner.coupling(i, j)
    }

    fn set_bias(&mut self, i: usize, h: f64) -> PyResult<()> {
        self.inner.set_bias(i, h).map_err(to_py)
    }

    fn bias(&self, i: usize) -> f64 {
        self.inner.bias(i)
    }

    fn energy(&self, state: Vec<i8>) -> PyResult<f64> {
        self.inner.energy(&state_from(state)?).map_err(to_py)
    }

    fn cut_value(&self, state: Vec<i8>) -> PyResult<f64> {
        self.inner.cut_value(&state_from(state)?).map_err(to_py)
    }

    /// Exact ground energy and all ground states (n <= enumeration limit).
    fn ground(&self) -> PyResult<(f64, Vec<Vec<i8>>)> {
        let (e, states) = brute_force_ground(&self.inner).map_err(to_py)?;
        Ok((e, states.iter().map(|s| s.spins().to_vec()).collect()))
    }

    /// Exact maximum cut value and all maximizing states.
    fn max_cut(&self) -> PyResult<(f64, Vec<Vec<i8>>)> {
        let (c, states) = brute_force_max_cut(&self.inner).map_err(to_py)?;
        Ok((c, states.iter().map(|s| s.spins().to_vec()).collect()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(n={}, edges={})",
            self.inner.n(),
            self.inner.edge_count()
        )
    }
}

/// Copy-chain embedding of a dense model into a degree-k physical model.
#[pyclass(name = "Embedding")]
struct PyEmbedding {
    inner: SparseEmbedding,
}

#[pymethods]
impl PyEmbedding {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyEmbedding {
            inner: parse_embedding(text).map_err(to_py)?,
        })
    }

    fn to_text(&self) -> String {
        write_embedding(&self.inner)
    }

    #[getter]
    fn w0(&self) -> f64 {
        self.inner.w0()
    }

    #[getter]
    fn copies_per_node(&self) -> usize {
        self.inner.copies_per_node()
    }

    #[getter]
    fn logical_n(&self) -> usize {
        self.inner.logical_n()
    }

    fn physical(&self) -> PyModel {
        PyModel {
            inner: self.inner.physical().clone(),
        }
    }

    /// Dense model recovered from the embedding's recoverable edges.
    fn logical_model(&self) -> PyResult<PyModel> {
        Ok(PyModel {
            inner: self.inner.logical_model().map_err(to_py)?,
        })
    }

    /// Physical copy indices of each logical node.
    fn chains(&self) -> Vec<Vec<usize>> {
        self.inner.copy_map().to_vec()
    }

    /// Replicate a logical state across every copy chain.
    fn embed(&self, logical: Vec<i8>) -> PyResult<Vec<i8>> {
        let embedded = self
            .inner
            .embed_state(&state_from(logical)?)
            .map_err(to_py)?;
        Ok(embedded.spins().to_vec())
    }

    fn chain_break_fraction(&self, physical: Vec<i8>) -> PyResult<f64> {
        self.inner
            .chain_break_fraction(&state_from(physical)?)
            .map_err(to_py)
    }

    /// Decode a physical state. Chains of <= 2 copies resolve conflicts by
    /// coin flip, longer chains by majority vote, both from `seed`.
    fn decode(&self, physical: Vec<i8>, seed: u64) -> PyResult<Vec<i8>> {
        let policy = pbit_core::experiments::decode_policy_for(&self.inner, seed);
        let mut decoder = Decoder::new(policy);
        let logical = decoder
            .decode(&self.inner, &state_from(physical)?)
            .map_err(to_py)?;
        Ok(logical.spins().to_vec())
    }

    fn __repr__(&self) -> String {
        format!(
            "Embedding(logical_n={}, physical_n={}, w0={})",
            self.inner.logical_n(),
            self.inner.physical().n(),
            self.inner.w0()
        )
    }
}

/// Bounded-degree sparsification with ferromagnetic copy chains.
#[pyfunction(name = "sparsify")]
fn sparsify_py(model: &PyModel, k: usize, w0: f64) -> PyResult<PyEmbedding> {
    Ok(PyEmbedding {
        inner: sparsify(&model.inner, k, w0).map_err(to_py)?,
    })
}

/// Geometric-ladder simulated anneal; returns (best_energy, best_state,
/// clamp_warnings). The best state is the tail-readout energy minimizer.
#[pyfunction]
#[pyo3(signature = (model, beta_max=1.0, beta_steps=8, sweeps_per_beta=1000,
                    readout_tail=1, seed=1, quantize=false))]
#[allow(clippy::too_many_arguments)]
fn anneal(
    model: &PyModel,
    beta_max: f64,
    beta_steps: usize,
    sweeps_per_beta: u64,
    readout_tail: u64,
    seed: u64,
    quantize: bool,
) -> PyResult<(f64, Vec<i8>, u64)> {
    let betas = (1..=beta_steps)
        .map(|i| beta_max * i as f64 / beta_steps as f64)
        .collect();
    let schedule = AnnealSchedule::new(betas, sweeps_per_beta, readout_tail).map_err(to_py)?;
    let quant = quantize.then(FixedPointSpec::default);
    let result = simulated_anneal(
        &model.inner,
        &schedule,
        SweepKind::Sequential,
        &RngSpec::new(seed),
        quant,
    )
    .map_err(to_py)?;
    Ok((
        result.best_energy,
        result.best_state.spins().to_vec(),
        result.clamp_warnings,
    ))
}

/// Empirical distribution over all 2^n states after `burn_in` + `sweeps`
/// sequential Gibbs sweeps at fixed beta.
#[pyfunction]
#[pyo3(signature = (model, beta, sweeps, burn_in=0, seed=1))]
fn gibbs_histogram(
    model: &PyModel,
    beta: f64,
    sweeps: u64,
    burn_in: u64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    if sweeps == 0 {
        return Err(PyValueError::new_err("sweeps must be >= 1"));
    }
    let n = model.inner.n();
    if n > 20 {
        return Err(PyRuntimeError::new_err(format!(
            "histogram over 2^{n} states is above the enumeration limit"
        )));
    }
    let spec = RngSpec::new(seed);
    let mut rngs = spec.update_streams(n);
    let mut state = spec.initial_state(n);
    let mut counts = vec![0u64; 1usize << n];
    for sweep in 0..burn_in + sweeps {
        gibbs_sweep_sequential(&model.inner, &mut state, beta, &mut rngs).map_err(to_py)?;
        if sweep >= burn_in {
            counts[state.to_index() as usize] += 1;
        }
    }
    Ok(counts.into_iter().map(|c| c as f64 / sweeps as f64).collect())
}

/// Exact Boltzmann probabilities over all 2^n states at inverse
/// temperature beta.
#[pyfunction]
fn boltzmann_probs(model: &PyModel, beta: f64) -> PyResult<Vec<f64>> {
    Ok(boltzmann_exact(&model.inner, beta)
        .map_err(to_py)?
        .probs()
        .to_vec())
}

/// D(p || q) in nats for two distributions over n_spins spins.
#[pyfunction]
fn kl(p: Vec<f64>, q: Vec<f64>, n_spins: usize) -> PyResult<f64> {
    let p = Distribution::new(n_spins, p).map_err(to_py)?;
    let q = Distribution::new(n_spins, q).map_err(to_py)?;
    kl_divergence(&p, &q).map_err(to_py)
}

#[pyfunction]
fn chain_capacity(copies_beyond_source: usize, k: usize) -> usize {
    pbit_core::chain_capacity(copies_beyond_source, k)
}

#[pyfunction]
fn required_copies(max_degree: usize, k: usize) -> PyResult<usize> {
    pbit_core::required_copies(max_degree, k).map_err(to_py)
}

#[pyfunction]
fn k_for_copies(max_degree: usize, copies: usize) -> PyResult<usize> {
    pbit_core::k_for_copies(max_degree, copies).map_err(to_py)
}

/// Integer gate Hamiltonian ("and" | "fa"): (couplings, biases) with
/// couplings as (i, j, weight) triples.
#[pyfunction]
fn gate_table(name: &str) -> PyResult<(Vec<(usize, usize, i64)>, Vec<i64>)> {
    let library = GateLibrary::standard().map_err(to_py)?;
    let entry = match name {
        "and" => &library.and_gate,
        "fa" => &library.full_adder,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown gate {other:?}: expected \"and\" or \"fa\""
            )))
        }
    };
    Ok((entry.couplings.clone(), entry.biases.clone()))
}

/// Multiplier network statistics for n_bits x n_bits: (spins, density,
/// and_gates, full_adders, half_adders). A half adder is a full adder
/// whose carry-in spin is clamped.
#[pyfunction]
fn multiplier_stats(n_bits: usize) -> PyResult<(usize, f64, usize, usize, usize)> {
    let library = GateLibrary::standard().map_err(to_py)?;
    let net = pbit_core::build_multiplier(n_bits, &library).map_err(to_py)?;
    let density = net.model().graph_density().map_err(to_py)?;
    let (mut ands, mut fas, mut has) = (0, 0, 0);
    for binding in net.gates() {
        match binding.gate {
            GateName::And => ands += 1,
            GateName::FullAdder if net.clamps().contains_key(&binding.spins[2]) => has += 1,
            GateName::FullAdder => fas += 1,
        }
    }
    Ok((net.spin_count(), density, ands, fas, has))
}

/// Run a TOML experiment manifest; returns (primary_csv, aux) where aux is
/// a list of (suffix, csv) pairs.
#[pyfunction]
#[pyo3(signature = (manifest, workers=1))]
fn experiment(manifest: &str, workers: usize) -> PyResult<(String, Vec<(String, String)>)> {
    let config =
        pbit_core::experiments::ExperimentConfig::from_toml(manifest).map_err(to_py)?;
    let out = run_experiment(&config, workers).map_err(to_py)?;
    Ok((
        out.primary,
        out.aux
            .into_iter()
            .map(|(suffix, csv)| (suffix.to_string(), csv))
            .collect(),
    ))
}

#[pymodule]
fn pbit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_function(wrap_pyfunction!(sparsify_py, m)?)?;
    m.add_function(wrap_pyfunction!(anneal, m)?)?;
    m.add_function(wrap_pyfunction!(gibbs_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(boltzmann_probs, m)?)?;
    m.add_function(wrap_pyfunction!(kl, m)?)?;
    m.add_function(wrap_pyfunction!(chain_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(required_copies, m)?)?;
    m.add_function(wrap_pyfunction!(k_for_copies, m)?)?;
    m.add_function(wrap_pyfunction!(gate_table, m)?)?;
    m.add_function(wrap_pyfunction!(multiplier_stats, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add("ALGORITHM", pbit_core::rng::ALGORITHM)?;
    m.add("CORE_VERSION", pbit_core::experiments::CORE_VERSION)?;
    m.add("FSS_B", FSS_B)?;
    Ok(())
}
