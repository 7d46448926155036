//! Acceptance suite: one test per shipping criterion, each ending in a
//! single `ACCEPTANCE <n> (<name>): PASS` line with the measured values.
//! Every tolerance is pinned in this file; a change here is a change to
//! what the toolkit promises.

use pbit_core::experiments::{
    run_boltzmann_fa, run_cost_model, run_experiment, run_factor, run_maxcut_grid,
    run_residual_fss, run_w0_sweep, ExperimentConfig, ExperimentKind, FssTopology,
};
use pbit_core::{
    brute_force_ground, derive_gate, generate_er_maxcut, k_for_copies, sparsify, valid_triples,
    DecodePolicy, Decoder, GateLibrary, GateName, InstanceSpec, SpinState, SweepPlan, Topology,
};

/// Emits the per-criterion PASS line on the process stdout, bypassing the
/// harness's output capture so the line is visible in a plain
/// `cargo test --workspace` log. Failures surface through assert messages,
/// which the harness prints on its own.
macro_rules! announce {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let line = format!($($arg)*);
        match std::fs::OpenOptions::new().write(true).open("/dev/stdout") {
            Ok(mut out) => {
                let _ = writeln!(out, "{line}");
            }
            Err(_) => println!("{line}"),
        }
    }};
}

/// Interpolated x positions where the piecewise-linear curve crosses
/// `level`, scanning outward from index `peak`; clamped to the grid edges
/// when a flank never crosses.
fn half_width(xs: &[f64], ys: &[f64], peak: usize, level: f64) -> (f64, f64) {
    let cross = |x0: f64, y0: f64, x1: f64, y1: f64| x0 + (level - y0) / (y1 - y0) * (x1 - x0);
    let mut lo = xs[0];
    for i in (1..=peak).rev() {
        if ys[i - 1] < level && level <= ys[i] {
            lo = cross(xs[i - 1], ys[i - 1], xs[i], ys[i]);
            break;
        }
    }
    let mut hi = xs[xs.len() - 1];
    for i in peak..xs.len() - 1 {
        if ys[i + 1] < level && level <= ys[i] {
            hi = cross(xs[i], ys[i], xs[i + 1], ys[i + 1]);
            break;
        }
    }
    (lo, hi)
}

/// Length of the longest contiguous interval with ys >= level, with
/// interpolated entry/exit crossings, clamped at the grid edges.
fn longest_interval_at_or_above(xs: &[f64], ys: &[f64], level: f64) -> f64 {
    let cross = |x0: f64, y0: f64, x1: f64, y1: f64| x0 + (level - y0) / (y1 - y0) * (x1 - x0);
    let mut best = 0.0f64;
    let mut i = 0;
    while i < ys.len() {
        if ys[i] >= level {
            let mut j = i;
            while j + 1 < ys.len() && ys[j + 1] >= level {
                j += 1;
            }
            let lo = if i == 0 {
                xs[0]
            } else {
                cross(xs[i - 1], ys[i - 1], xs[i], ys[i])
            };
            let hi = if j == ys.len() - 1 {
                xs[j]
            } else {
                cross(xs[j], ys[j], xs[j + 1], ys[j + 1])
            };
            best = best.max(hi - lo);
            i = j + 1;
        } else {
            i += 1;
        }
    }
    best
}

/// 1. Sparsified ground states decode to the exact dense optimum, and the
/// embedding shifts every state's energy by exactly W0 per copy edge.
#[test]
fn acceptance_1_sparsification_oracle_equivalence() {
    let sizes = [8usize, 9, 10, 11, 12];
    for i in 0..20u64 {
        let n = sizes[(i % sizes.len() as u64) as usize];
        let spec = InstanceSpec::new(n, 0.75, 1000 + i).unwrap();
        let dense = generate_er_maxcut(&spec).unwrap();
        let k = k_for_copies(dense.max_degree(), 2).unwrap();
        let w0 = 1.0 + dense.total_abs_coupling();
        let embedding = sparsify(&dense, k, w0).unwrap();
        assert_eq!(embedding.copies_per_node(), 2, "instance {i}");
        let copy_edges: usize = embedding.copy_map().iter().map(|c| c.len() - 1).sum();
        let offset = w0 * copy_edges as f64;

        let (e_dense, _) = brute_force_ground(&dense).unwrap();
        let (e_physical, grounds) = brute_force_ground(embedding.physical()).unwrap();
        assert_eq!(
            e_physical,
            e_dense - offset,
            "instance {i}: physical ground is not the shifted dense ground"
        );
        let mut decoder = Decoder::new(DecodePolicy::CoinFlip { seed: 7 });
        for g in &grounds {
            assert_eq!(
                embedding.chain_break_fraction(g).unwrap(),
                0.0,
                "instance {i}: ground state carries a chain break"
            );
            let logical = decoder.decode(&embedding, g).unwrap();
            assert_eq!(
                dense.energy(&logical).unwrap(),
                e_dense,
                "instance {i}: decoded ground misses the dense optimum"
            );
        }

        for index in 0..1u64 << n {
            let s = SpinState::from_index(index, n);
            let e_s = dense.energy(&s).unwrap();
            let e_embedded = embedding
                .physical()
                .energy(&embedding.embed_state(&s).unwrap())
                .unwrap();
            assert!(
                (e_embedded - (e_s - offset)).abs() <= 1e-9 * (1.0 + e_s.abs()),
                "instance {i}, state {index}: offset identity violated"
            );
        }
    }
    announce!(
        "ACCEPTANCE 1 (sparsification oracle equivalence): PASS — 20 instances, exact ground \
         match and offset identity over every state"
    );
}

/// 2. Sparsified full-adder Gibbs sampling matches the dense Boltzmann
/// distribution best at W0 = 4, and well (KL < 0.05 nats).
#[test]
fn acceptance_2_boltzmann_fidelity() {
    let mut config = ExperimentConfig::new(ExperimentKind::BoltzmannFa);
    config.sparsify.w0_grid = vec![1.0, 4.0, 7.5];
    config.sampling.beta = 1.0;
    config.sampling.sweeps = 1_000_000;
    config.sampling.burn_in = 10_000;
    let report = run_boltzmann_fa(&config, 1).unwrap();
    let kl: Vec<f64> = report.rows.iter().map(|r| r.kl).collect();
    assert!(
        kl[1] < kl[0] && kl[1] < kl[2],
        "KL is not minimized at W0 = 4: {kl:?}"
    );
    assert!(kl[1] < 0.05, "KL at W0 = 4 is {} nats (limit 0.05)", kl[1]);
    announce!(
        "ACCEPTANCE 2 (Boltzmann fidelity): PASS — KL(W0=1) = {:.3}, KL(W0=4) = {:.4}, \
         KL(W0=7.5) = {:.3} nats",
        kl[0], kl[1], kl[2]
    );
}

/// 3. Success probability vs W0 peaks strictly inside the grid, and the
/// approximation ratio holds >= 0.9 over at least 4x the peak's FWHM.
#[test]
fn acceptance_3_w0_phenomenology() {
    let mut config = ExperimentConfig::new(ExperimentKind::W0Sweep);
    config.instance.n = 16;
    config.instance.edge_probability = 0.75;
    config.instance.seed = 6;
    config.trials = 100;
    config.sparsify.copies = Some(2);
    config.sparsify.w0_grid = (1..=16).map(|i| f64::from(i) * 0.5).collect();
    config.schedule.beta_max = 5.0;
    config.schedule.beta_steps = 8;
    config.schedule.sweeps_per_beta = 1000;
    let report = run_w0_sweep(&config, 1).unwrap();

    let w0: Vec<f64> = report.rows.iter().map(|r| r.w0).collect();
    let success: Vec<f64> = report.rows.iter().map(|r| r.success_prob).collect();
    let ratio: Vec<f64> = report.rows.iter().map(|r| r.approx_ratio).collect();

    let peak = (0..success.len())
        .max_by(|&a, &b| success[a].total_cmp(&success[b]))
        .unwrap();
    assert!(
        peak > 0 && peak < success.len() - 1,
        "success peak sits at a grid endpoint: {success:?}"
    );
    let (lo, hi) = half_width(&w0, &success, peak, success[peak] / 2.0);
    let fwhm = hi - lo;
    let interval = longest_interval_at_or_above(&w0, &ratio, 0.9);
    assert!(
        interval >= 4.0 * fwhm,
        "ratio >= 0.9 over {interval:.2} but 4x FWHM is {:.2}\nsuccess: {success:?}\nratio: {ratio:?}",
        4.0 * fwhm
    );
    announce!(
        "ACCEPTANCE 3 (W0 phenomenology): PASS — peak {:.2} at W0 = {}, FWHM {fwhm:.2}, \
         ratio >= 0.9 over {interval:.2} (needs {:.2})",
        success[peak], w0[peak], 4.0 * fwhm
    );
}

/// 4. Dense annealing at the scaled schedule hits the exact optimum in at
/// least 90% of 100 trials.
#[test]
fn acceptance_4_dense_baseline() {
    let mut config = ExperimentConfig::new(ExperimentKind::MaxcutGrid);
    config.instance.n = 16;
    config.instance.edge_probability = 0.75;
    config.instance.seed = 1;
    config.instance.count = 3;
    config.trials = 100;
    config.schedule.beta_max = 4.0;
    config.schedule.beta_steps = 8;
    config.schedule.sweeps_per_beta = 1000;
    let report = run_maxcut_grid(&config, 1).unwrap();
    for row in &report.rows {
        assert!(
            row.success_prob >= 0.9,
            "instance {} reached the optimum in only {}% of trials",
            row.instance,
            100.0 * row.success_prob
        );
    }
    let rates: Vec<f64> = report.rows.iter().map(|r| r.success_prob).collect();
    announce!("ACCEPTANCE 4 (dense baseline): PASS — success rates {rates:?} over 100 trials each");
}

/// 5. The collapse machinery recovers a known exponent to 0.1, and on real
/// desk-scale data the sparse exponent exceeds the dense one by more than 1.
#[test]
fn acceptance_5_fss_collapse() {
    let mut synthetic = ExperimentConfig::new(ExperimentKind::ResidualFss);
    synthetic.fss.sizes = vec![12, 16, 20];
    synthetic.fss.synthetic_mu = Some(3.0);
    let report = run_residual_fss(&synthetic, 1).unwrap();
    let mu_synth = report.collapse.mu;
    assert!(
        (mu_synth - 3.0).abs() <= 0.1,
        "synthetic mu = {mu_synth} (want 3.0 +- 0.1)"
    );

    // Quenched average over 32 instances per size; the long-time points are
    // where the sparse slowdown shows up, so the window runs to 2048 sweeps.
    let real = |topology: FssTopology, sizes: Vec<usize>| {
        let mut config = ExperimentConfig::new(ExperimentKind::ResidualFss);
        config.master_seed = 9;
        config.fss.topology = topology;
        config.fss.sizes = sizes;
        config.fss.anneal_times = vec![8, 16, 32, 64, 128, 256, 512, 1024, 2048];
        config.trials = 64;
        config.instance.seed = 3;
        config.instance.count = 32;
        config.sparsify.copies = Some(2);
        config.sparsify.w0 = 4.0;
        config.schedule.beta_max = 4.0;
        run_residual_fss(&config, 1).unwrap().collapse.mu
    };
    let mu_dense = real(FssTopology::Dense, vec![16, 20, 24]);
    let mu_sparse = real(FssTopology::Sparse, vec![12, 16, 20]);
    assert!(
        mu_sparse - mu_dense > 1.0,
        "mu_sparse = {mu_sparse:.2} does not exceed mu_dense = {mu_dense:.2} by more than 1"
    );
    announce!(
        "ACCEPTANCE 5 (FSS collapse): PASS — synthetic mu = {mu_synth:.3}, dense mu = \
         {mu_dense:.2}, sparse mu = {mu_sparse:.2}"
    );
}

/// 6. Sweep cost: all-to-all needs N cycles and loses frequency as 1/N^2
/// exactly; the sparse coloring cost is constant across sizes at fixed k.
#[test]
fn acceptance_6_cost_model() {
    let mut config = ExperimentConfig::new(ExperimentKind::CostModel);
    config.cost.n_min = 70;
    config.cost.n_max = 130;
    let report = run_cost_model(&config).unwrap();

    let mut sparse_cycles = Vec::new();
    for row in &report.rows {
        match row.topology {
            Topology::AllToAll => assert_eq!(
                row.cycles_per_mcs, row.n as u64,
                "all-to-all cost at N = {}",
                row.n
            ),
            Topology::Sparse => sparse_cycles.push(row.cycles_per_mcs),
        }
    }
    assert_eq!(sparse_cycles.len(), 61);
    assert!(
        sparse_cycles.iter().all(|&c| c == sparse_cycles[0]),
        "sparse cycles vary across N: {sparse_cycles:?}"
    );

    // Doubling N quarters the relative all-to-all frequency, exactly.
    for n in [70usize, 100] {
        let model = pbit_core::IsingModel::new(n);
        let doubled = pbit_core::IsingModel::new(2 * n);
        let plan_a = SweepPlan::sequential(n);
        let plan_b = SweepPlan::sequential(2 * n);
        let (_, rel_n) = pbit_core::sweep_cost(&model, &plan_a, Topology::AllToAll);
        let (_, rel_2n) = pbit_core::sweep_cost(&doubled, &plan_b, Topology::AllToAll);
        assert_eq!(rel_2n, rel_n / 4.0, "frequency ratio at N = {n}");
    }
    announce!(
        "ACCEPTANCE 6 (cost model): PASS — all-to-all cycles = N over 70..=130, sparse constant \
         at {} cycles, 2N frequency ratio exactly 1/4",
        sparse_cycles[0]
    );
}

/// 7. Gate Hamiltonians ground exactly on their truth tables, the n = 2
/// multiplier grounds on all valid products, factoring 35 succeeds in more
/// than half the trials, and every net stays within 4 distinct 3-bit
/// weight magnitudes.
#[test]
fn acceptance_7_invertible_logic() {
    for (name, degenerate) in [(GateName::And, 4usize), (GateName::FullAdder, 8)] {
        let entry = derive_gate(name, 2).unwrap();
        let (_, ground) = brute_force_ground(&entry.model()).unwrap();
        assert_eq!(ground.len(), degenerate, "{name:?} ground degeneracy");
        assert_eq!(ground, entry.ground_set, "{name:?} ground set");
    }

    let library = GateLibrary::standard().unwrap();
    let net = pbit_core::build_multiplier(2, &library).unwrap();
    let reduced = net.reduced().unwrap();
    let (_, ground) = brute_force_ground(&reduced.model).unwrap();
    let mut triples: Vec<(u64, u64, u64)> = ground
        .iter()
        .map(|s| {
            (
                reduced.read_port(net.p_port(), s),
                reduced.read_port(net.q_port(), s),
                reduced.read_port(net.f_port(), s),
            )
        })
        .collect();
    triples.sort_unstable();
    assert_eq!(
        triples,
        valid_triples(2),
        "n = 2 multiplier ground set is not the multiplication table"
    );

    for n_bits in [2usize, 3, 4, 10] {
        let net = pbit_core::build_multiplier(n_bits, &library).unwrap();
        let magnitudes = net.distinct_weight_magnitudes();
        assert!(
            magnitudes.len() <= 4,
            "n = {n_bits} net uses {} distinct |weights|",
            magnitudes.len()
        );
        assert!(
            magnitudes.iter().all(|&m| m <= 7.0),
            "n = {n_bits} net weight magnitudes exceed 3 bits: {magnitudes:?}"
        );
    }

    let mut config = ExperimentConfig::new(ExperimentKind::Factor);
    config.factor.n_bits = 3;
    config.factor.semiprime = 35;
    config.trials = 20;
    config.schedule.beta_max = 4.0;
    config.schedule.beta_steps = 8;
    config.schedule.sweeps_per_beta = 2000;
    let report = run_factor(&config, 1).unwrap();
    let successes = report.rows.iter().filter(|r| r.success).count();
    for row in report.rows.iter().filter(|r| r.success) {
        assert_eq!(row.p * row.q, 35, "reported success with wrong factors");
    }
    assert!(
        successes * 2 > 20,
        "only {successes}/20 trials factored 35"
    );
    announce!(
        "ACCEPTANCE 7 (invertible logic): PASS — gate grounds 4/8, n = 2 table exact, \
         {successes}/20 trials factored 35, weight magnitudes within 4 x 3-bit"
    );
}

/// 8. Byte-identical CSV on rerun and under different worker counts.
#[test]
fn acceptance_8_determinism() {
    let mut sweep = ExperimentConfig::new(ExperimentKind::W0Sweep);
    sweep.instance.n = 10;
    sweep.trials = 8;
    sweep.sparsify.w0_grid = vec![1.0, 3.0];
    sweep.schedule.sweeps_per_beta = 50;

    let mut fss = ExperimentConfig::new(ExperimentKind::ResidualFss);
    fss.fss.sizes = vec![12, 16, 20];
    fss.fss.synthetic_mu = Some(3.0);

    let mut factor = ExperimentConfig::new(ExperimentKind::Factor);
    factor.factor.n_bits = 2;
    factor.factor.semiprime = 9;
    factor.trials = 6;
    factor.schedule.sweeps_per_beta = 100;

    for config in [sweep, fss, factor] {
        let one = run_experiment(&config, 1).unwrap();
        let again = run_experiment(&config, 1).unwrap();
        let four = run_experiment(&config, 4).unwrap();
        assert_eq!(one.primary, again.primary, "{:?} rerun", config.kind);
        assert_eq!(one.primary, four.primary, "{:?} worker count", config.kind);
        assert_eq!(one.aux, again.aux);
        assert_eq!(one.aux, four.aux);
    }
    announce!(
        "ACCEPTANCE 8 (determinism): PASS — byte-identical CSV over reruns and worker counts \
         for three experiment kinds"
    );
}
