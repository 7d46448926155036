//! Evaluation metrics: exact Boltzmann distributions, KL divergence,
//! success probability, approximation ratio, residual energy, the
//! finite-size-scaling collapse, and the expected Max-Cut of dense random
//! graphs.

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};
use crate::sparsify::{DecodePolicy, Decoder, SparseEmbedding};

/// Enumeration bound for exact distributions.
pub const BOLTZMANN_LIMIT: usize = 20;

/// Parisi constant: coefficient of the N^{3/2} correction in the expected
/// Max-Cut of dense random graphs.
pub const PARISI: f64 = 0.7632;

/// Deterministic pairwise summation; the reduction order is fixed by the
/// slice order, independent of any thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Standard error of the mean (0 for fewer than 2 samples).
pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (xs.len() as f64 - 1.0)).sqrt() / (xs.len() as f64).sqrt()
}

/// Probability distribution over all 2^n spin states, indexed by
/// [`SpinState::to_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n_spins: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(n_spins: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n_spins {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n_spins,
                got: probs.len(),
            });
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidSpec("negative or NaN probability".into()));
        }
        let total = pairwise_sum(&probs);
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Distribution { n_spins, probs })
    }

    pub fn uniform(n_spins: usize) -> Self {
        let states = 1usize << n_spins;
        Distribution {
            n_spins,
            probs: vec![1.0 / states as f64; states],
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, state_index: u64) -> f64 {
        self.probs[state_index as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Exact Boltzmann distribution p(s) = exp(-beta E(s)) / Z over all 2^n
/// states, n <= 20.
pub fn boltzmann_exact(model: &IsingModel, beta: f64) -> Result<Distribution> {
    let n = model.n();
    if n > BOLTZMANN_LIMIT {
        return Err(Error::Capacity {
            n,
            limit: BOLTZMANN_LIMIT,
        });
    }
    let energies = enumerate_energies(model)?;
    let e_min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut probs: Vec<f64> = energies
        .iter()
        .map(|&e| (-beta * (e - e_min)).exp())
        .collect();
    let z = pairwise_sum(&probs);
    for p in &mut probs {
        *p /= z;
    }
    Ok(Distribution { n_spins: n, probs })
}

/// Energy of every state, indexed by state index, via Gray-code deltas.
pub fn enumerate_energies(model: &IsingModel) -> Result<Vec<f64>> {
    let n = model.n();
    if n > BRUTE_ENUM_LIMIT {
        return Err(Error::Capacity {
            n,
            limit: BRUTE_ENUM_LIMIT,
        });
    }
    let total = 1usize << n;
    let mut energies = vec![0.0; total];
    let mut state = SpinState::from_index(0, n);
    let mut e = model.energy(&state)?;
    energies[0] = e;
    let mut fields: Vec<f64> = (0..n)
        .map(|j| model.neighbors(j).map(|(_, w)| -w).sum::<f64>() + model.bias(j))
        .collect();
    let mut gray_prev = 0u64;
    for t in 1..total as u64 {
        let gray = t ^ (t >> 1);
        let j = (gray ^ gray_prev).trailing_zeros() as usize;
        gray_prev = gray;
        let mj = f64::from(state.get(j));
        e += 2.0 * mj * fields[j];
        for (i, w) in model.neighbors(j) {
            fields[i] -= 2.0 * w * mj;
        }
        state.flip(j);
        energies[gray as usize] = e;
    }
    Ok(energies)
}

const BRUTE_ENUM_LIMIT: usize = crate::oracle::BRUTE_FORCE_LIMIT;

/// Decodes every physical sample and histograms the logical states.
///
/// A fresh conflict stream is seeded from the policy; use
/// [`reduced_empirical_with`] to continue an existing decoder stream.
pub fn reduced_empirical(
    samples: &[SpinState],
    embedding: &SparseEmbedding,
    policy: DecodePolicy,
) -> Result<Distribution> {
    let mut decoder = Decoder::new(policy);
    reduced_empirical_with(samples, embedding, &mut decoder)
}

pub fn reduced_empirical_with(
    samples: &[SpinState],
    embedding: &SparseEmbedding,
    decoder: &mut Decoder,
) -> Result<Distribution> {
    if samples.is_empty() {
        return Err(Error::Degenerate("no samples to histogram".into()));
    }
    let n = embedding.logical_n();
    if n > BOLTZMANN_LIMIT {
        return Err(Error::Capacity {
            n,
            limit: BOLTZMANN_LIMIT,
        });
    }
    let mut counts = vec![0u64; 1usize << n];
    for sample in samples {
        let logical = decoder.decode(embedding, sample)?;
        counts[logical.to_index() as usize] += 1;
    }
    let total = samples.len() as f64;
    Ok(Distribution {
        n_spins: n,
        probs: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}

/// D(p_emp || p_exact) = sum p_emp ln(p_emp / p_exact), in nats. Terms with
/// p_emp = 0 contribute 0; p_exact must be positive wherever p_emp is.
pub fn kl_divergence(p_emp: &Distribution, p_exact: &Distribution) -> Result<f64> {
    if p_emp.len() != p_exact.len() {
        return Err(Error::SupportMismatch(format!(
            "{} vs {} states",
            p_emp.len(),
            p_exact.len()
        )));
    }
    let mut terms = Vec::with_capacity(p_emp.len());
    for (idx, (&p, &q)) in p_emp.probs.iter().zip(&p_exact.probs).enumerate() {
        if p == 0.0 {
            continue;
        }
        if q == 0.0 {
            return Err(Error::SupportMismatch(format!(
                "empirical mass on state {idx} where the exact probability is 0"
            )));
        }
        terms.push(p * (p / q).ln());
    }
    Ok(pairwise_sum(&terms))
}

fn check_trials(trials: &[f64]) -> Result<()> {
    if trials.is_empty() {
        return Err(Error::Degenerate("no trials".into()));
    }
    Ok(())
}

/// Fraction of trials whose best cut equals the optimum.
pub fn success_probability(trials: &[f64], optimum: f64) -> Result<f64> {
    check_trials(trials)?;
    let tol = optimum_tolerance(optimum);
    let hits = trials.iter().filter(|&&c| (c - optimum).abs() <= tol).count();
    Ok(hits as f64 / trials.len() as f64)
}

/// Absolute tolerance under which a trial value counts as optimal.
pub fn optimum_tolerance(optimum: f64) -> f64 {
    1e-9 * (1.0 + optimum.abs())
}

/// Mean of best_cut / optimum over trials.
pub fn approximation_ratio(trials: &[f64], optimum: f64) -> Result<f64> {
    check_trials(trials)?;
    if optimum == 0.0 {
        return Err(Error::Degenerate("zero optimum".into()));
    }
    let ratios: Vec<f64> = trials.iter().map(|&c| c / optimum).collect();
    Ok(mean(&ratios))
}

/// One residual-energy sample: rho_E = (mean E - e_gs) / N over the given
/// decoded logical states, plus the standard error of that mean.
pub fn residual_energy(
    model_logical: &IsingModel,
    decoded_states: &[SpinState],
    e_gs: f64,
) -> Result<(f64, f64)> {
    if decoded_states.is_empty() {
        return Err(Error::Degenerate("no states".into()));
    }
    let energies: Vec<f64> = decoded_states
        .iter()
        .map(|s| model_logical.energy(s))
        .collect::<Result<_>>()?;
    let n = model_logical.n() as f64;
    Ok((
        (mean(&energies) - e_gs) / n,
        stderr_of_mean(&energies) / n,
    ))
}

/// One point of a residual-energy relaxation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    /// Total anneal length in sweeps.
    pub t_a: f64,
    pub rho_e: f64,
    pub stderr: f64,
}

/// Residual energy per spin as a function of anneal length, for one size.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCurve {
    pub n: usize,
    pub points: Vec<ResidualPoint>,
}

impl ResidualCurve {
    pub fn new(n: usize, points: Vec<ResidualPoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].t_a <= w[0].t_a) {
            return Err(Error::InvalidSpec("t_a must be strictly increasing".into()));
        }
        Ok(ResidualCurve { n, points })
    }

    /// Points with rho_E < 0; nonzero counts signal noise below the oracle
    /// ground energy and are reported, not fatal.
    pub fn negative_points(&self) -> usize {
        self.points.iter().filter(|p| p.rho_e < 0.0).count()
    }
}

/// Result of a finite-size-scaling collapse.
#[derive(Debug, Clone)]
pub struct CollapseResult {
    /// The fixed exponent b.
    pub b: f64,
    /// The fitted exponent mu.
    pub mu: f64,
    /// Master-curve deviation score at mu (dimensionless, >= 0).
    pub quality: f64,
    /// Sizes that entered the fit.
    pub curves_used: Vec<usize>,
    /// Rescaled points (n, x, y) with x = t_a n^-mu, y = rho_E n^b.
    pub rescaled: Vec<(usize, f64, f64)>,
}

fn rescale(curves: &[ResidualCurve], b: f64, mu: f64) -> Vec<Vec<(f64, f64)>> {
    curves
        .iter()
        .map(|c| {
            let nf = c.n as f64;
            c.points
                .iter()
                .map(|p| (p.t_a * nf.powf(-mu), p.rho_e * nf.powf(b)))
                .collect()
        })
        .collect()
}

/// Mean squared deviation of each rescaled point from the local linear
/// interpolation of every other curve, normalized by the variance of all
/// rescaled y values. Returns None when no point is bracketed by another
/// curve (no overlap).
fn collapse_quality(rescaled: &[Vec<(f64, f64)>]) -> Option<f64> {
    let all_y: Vec<f64> = rescaled.iter().flatten().map(|&(_, y)| y).collect();
    let m = mean(&all_y);
    let sq: Vec<f64> = all_y.iter().map(|&y| (y - m) * (y - m)).collect();
    let var = pairwise_sum(&sq) / all_y.len() as f64;

    let mut dev = 0.0;
    let mut count = 0usize;
    for (ci, curve) in rescaled.iter().enumerate() {
        for &(x, y) in curve {
            for (cj, other) in rescaled.iter().enumerate() {
                if ci == cj {
                    continue;
                }
                // `other` is sorted by x; find the bracketing pair.
                let pos = other.partition_point(|&(ox, _)| ox < x);
                if pos == 0 || pos == other.len() {
                    continue;
                }
                let (x1, y1) = other[pos - 1];
                let (x2, y2) = other[pos];
                let yhat = if x2 == x1 {
                    0.5 * (y1 + y2)
                } else {
                    y1 + (y2 - y1) * (x - x1) / (x2 - x1)
                };
                dev += (y - yhat) * (y - yhat);
                count += 1;
            }
        }
    }
    if count == 0 {
        return None;
    }
    if var <= f64::EPSILON {
        return Some(0.0);
    }
    Some(dev / (count as f64 * var))
}

/// Collapses residual curves onto a master curve: y = rho_E N^b against
/// x = t_a N^-mu with b fixed, fitting mu by minimizing the local
/// interpolation deviation over `bracket` (coarse grid scan followed by
/// golden-section refinement).
pub fn fss_collapse(
    curves: &[ResidualCurve],
    b_fixed: f64,
    bracket: (f64, f64),
) -> Result<CollapseResult> {
    let mut sizes: Vec<usize> = curves.iter().map(|c| c.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InvalidSpec(format!(
            "collapse needs >= 3 distinct sizes, got {}",
            sizes.len()
        )));
    }
    if curves.iter().any(|c| c.points.len() < 2) {
        return Err(Error::InvalidSpec(
            "every curve needs >= 2 points for interpolation".into(),
        ));
    }
    let (lo, hi) = bracket;
    if !(hi > lo) {
        return Err(Error::InvalidSpec(format!("bad bracket [{lo}, {hi}]")));
    }

    let quality_at = |mu: f64| -> Option<f64> { collapse_quality(&rescale(curves, b_fixed, mu)) };

    // Coarse scan guards against secondary minima before refining.
    const GRID: usize = 33;
    let mut best_mu = f64::NAN;
    let mut best_q = f64::INFINITY;
    let mut any = false;
    for g in 0..=GRID {
        let mu = lo + (hi - lo) * g as f64 / GRID as f64;
        if let Some(q) = quality_at(mu) {
            any = true;
            if q < best_q {
                best_q = q;
                best_mu = mu;
            }
        }
    }
    if !any {
        return Err(Error::NoOverlap(
            "no rescaled point is bracketed by another curve anywhere in the bracket".into(),
        ));
    }

    let step = (hi - lo) / GRID as f64;
    let mut a = (best_mu - step).max(lo);
    let mut b = (best_mu + step).min(hi);
    // Golden-section refinement; regions without overlap score +inf.
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let eval = |mu: f64| quality_at(mu).unwrap_or(f64::INFINITY);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while b - a > 1e-4 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2);
        }
    }
    let mu = 0.5 * (a + b);
    let q_refined = eval(mu);
    let (mu, quality) = if q_refined <= best_q {
        (mu, q_refined)
    } else {
        (best_mu, best_q)
    };

    let rescaled_curves = rescale(curves, b_fixed, mu);
    let mut rescaled = Vec::new();
    for (c, pts) in curves.iter().zip(&rescaled_curves) {
        for &(x, y) in pts {
            rescaled.push((c.n, x, y));
        }
    }
    Ok(CollapseResult {
        b: b_fixed,
        mu,
        quality,
        curves_used: sizes,
        rescaled,
    })
}

/// Expected Max-Cut of a dense ER(n, p) graph:
/// (p/4) n^2 + P* sqrt(p/4) n^{3/2}.
pub fn maxcut_expectation(n: usize, p: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("n must be >= 2, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidSpec(format!("p must be in (0, 1], got {p}")));
    }
    let nf = n as f64;
    Ok(p / 4.0 * nf * nf + PARISI * (p / 4.0).sqrt() * nf.powf(1.5))
}
