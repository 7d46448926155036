//! Exact brute-force oracles for small instances.
//!
//! Enumeration walks the 2^n state space in Gray-code order so each step
//! flips a single spin and updates energies incrementally in O(degree).
//! Running extrema are collected with a small tolerance band and every
//! candidate is then re-evaluated with the canonical-order [`IsingModel::energy`]
//! sum, so reported optima are bit-identical to direct evaluation of the
//! reported states. For dyadic weights (integers, multiples of 2^-3, ...)
//! the result is exact.

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};

/// Enumeration feasibility bound: 2^24 states complete in seconds.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Relative tolerance of the candidate band during the incremental sweep.
const BAND: f64 = 1e-9;

struct SweepExtremum {
    /// State indices within the tolerance band of the running extremum.
    candidates: Vec<u64>,
}

/// Walks all 2^n states; `value_delta(j, state) -> delta` is the objective
/// change caused by flipping spin j of `state` (called before the flip).
/// Collects indices minimizing the objective when `minimize`, else maximizing.
fn gray_sweep(
    model: &IsingModel,
    start_value: f64,
    minimize: bool,
    mut flip_delta: impl FnMut(usize, &SpinState) -> f64,
) -> SweepExtremum {
    let n = model.n();
    let total: u64 = 1 << n;
    let mut state = SpinState::from_index(0, n);
    let mut value = start_value;
    let mut best = value;
    let mut candidates = vec![0u64];
    let mut gray_prev = 0u64;
    for t in 1..total {
        let gray = t ^ (t >> 1);
        let j = (gray ^ gray_prev).trailing_zeros() as usize;
        gray_prev = gray;
        value += flip_delta(j, &state);
        state.flip(j);
        let tol = BAND * (1.0 + best.abs());
        let improved = if minimize { value < best - tol } else { value > best + tol };
        let within = if minimize { value <= best + tol } else { value >= best - tol };
        if improved {
            best = value;
            candidates.clear();
            candidates.push(gray);
        } else if within {
            candidates.push(gray);
        }
    }
    SweepExtremum { candidates }
}

fn check_capacity(model: &IsingModel) -> Result<()> {
    if model.n() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            n: model.n(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if model.n() == 0 {
        return Err(Error::Degenerate("empty model".into()));
    }
    Ok(())
}

/// Exact minimum of the Hamiltonian and every state achieving it.
///
/// States are returned in ascending index order ([`SpinState::to_index`]).
pub fn brute_force_ground(model: &IsingModel) -> Result<(f64, Vec<SpinState>)> {
    check_capacity(model)?;
    let n = model.n();
    let start = SpinState::from_index(0, n);
    let e0 = model.energy(&start)?;

    // Local fields L_j = sum_i J_ij m_i + h_j for the all-(-1) start state.
    let mut fields: Vec<f64> = (0..n)
        .map(|j| model.neighbors(j).map(|(_, w)| -w).sum::<f64>() + model.bias(j))
        .collect();

    let sweep = gray_sweep(model, e0, true, |j, state| {
        let mj = f64::from(state.get(j));
        let delta = 2.0 * mj * fields[j];
        for (i, w) in model.neighbors(j) {
            fields[i] -= 2.0 * w * mj;
        }
        delta
    });

    finalize(model, sweep, true, |m, s| m.energy(s))
}

/// Exact maximum of the cut value and every state achieving it.
pub fn brute_force_max_cut(model: &IsingModel) -> Result<(f64, Vec<SpinState>)> {
    check_capacity(model)?;
    let n = model.n();
    let start = SpinState::from_index(0, n);
    let c0 = model.cut_value(&start)?;

    // Bias-free fields: flipping j changes the cut by -m_j * sum_i J_ij m_i.
    let mut fields: Vec<f64> = (0..n)
        .map(|j| model.neighbors(j).map(|(_, w)| -w).sum::<f64>())
        .collect();

    let sweep = gray_sweep(model, c0, false, |j, state| {
        let mj = f64::from(state.get(j));
        let delta = -mj * fields[j];
        for (i, w) in model.neighbors(j) {
            fields[i] -= 2.0 * w * mj;
        }
        delta
    });

    finalize(model, sweep, false, |m, s| m.cut_value(s))
}

/// Re-evaluates band candidates exactly and keeps the true optimum set.
fn finalize(
    model: &IsingModel,
    sweep: SweepExtremum,
    minimize: bool,
    eval: impl Fn(&IsingModel, &SpinState) -> Result<f64>,
) -> Result<(f64, Vec<SpinState>)> {
    let n = model.n();
    let mut exact: Vec<(u64, f64)> = Vec::with_capacity(sweep.candidates.len());
    for &idx in &sweep.candidates {
        let s = SpinState::from_index(idx, n);
        exact.push((idx, eval(model, &s)?));
    }
    let best = exact
        .iter()
        .map(|&(_, v)| v)
        .fold(if minimize { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| {
            if minimize { a.min(b) } else { a.max(b) }
        });
    let mut indices: Vec<u64> = exact
        .into_iter()
        .filter(|&(_, v)| v == best)
        .map(|(idx, _)| idx)
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let states = indices
        .into_iter()
        .map(|idx| SpinState::from_index(idx, n))
        .collect();
    Ok((best, states))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_er_maxcut, InstanceSpec};

    /// Direct enumeration without Gray-code deltas, as an independent check.
    fn naive_ground(model: &IsingModel) -> (f64, Vec<SpinState>) {
        let n = model.n();
        let mut best = f64::INFINITY;
        let mut states = Vec::new();
        for idx in 0..(1u64 << n) {
            let s = SpinState::from_index(idx, n);
            let e = model.energy(&s).unwrap();
            if e < best {
                best = e;
                states = vec![s];
            } else if e == best {
                states.push(s);
            }
        }
        (best, states)
    }

    #[test]
    fn single_bias_ground() {
        let mut m = IsingModel::new(1);
        m.set_bias(0, 1.0).unwrap();
        let (e, states) = brute_force_ground(&m).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states, vec![SpinState::new(vec![1]).unwrap()]);
    }

    #[test]
    fn ferromagnetic_pair_degenerate() {
        let mut m = IsingModel::new(2);
        m.set_coupling(0, 1, 1.0).unwrap();
        let (e, states) = brute_force_ground(&m).unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states.len(), 2);
        assert_eq!(states[0].spins(), &[-1, -1]);
        assert_eq!(states[1].spins(), &[1, 1]);
    }

    #[test]
    fn matches_naive_enumeration() {
        for seed in [1, 2, 3] {
            let m = generate_er_maxcut(&InstanceSpec::new(12, 0.75, seed).unwrap()).unwrap();
            let (e, states) = brute_force_ground(&m).unwrap();
            let (e_ref, states_ref) = naive_ground(&m);
            assert_eq!(e, e_ref);
            assert_eq!(states, states_ref);
        }
    }

    #[test]
    fn matches_naive_with_biases() {
        let mut m = generate_er_maxcut(&InstanceSpec::new(8, 0.6, 9).unwrap()).unwrap();
        for i in 0..8 {
            m.set_bias(i, 0.25 * (i as f64) - 1.0).unwrap();
        }
        let (e, states) = brute_force_ground(&m).unwrap();
        let (e_ref, states_ref) = naive_ground(&m);
        assert_eq!(e, e_ref);
        assert_eq!(states, states_ref);
    }

    #[test]
    fn max_cut_triangle_and_bipartite() {
        let mut tri = IsingModel::new(3);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            tri.set_coupling(i, j, -1.0).unwrap();
        }
        let (cut, states) = brute_force_max_cut(&tri).unwrap();
        assert_eq!(cut, 2.0);
        assert_eq!(states.len(), 6);

        let mut kb = IsingModel::new(6);
        for i in 0..3 {
            for j in 3..6 {
                kb.set_coupling(i, j, -1.0).unwrap();
            }
        }
        let (cut, states) = brute_force_max_cut(&kb).unwrap();
        assert_eq!(cut, 9.0);
        assert_eq!(states.len(), 2);
    }

    // For h = 0 the cut and energy orderings are affinely related, so the
    // max-cut states must be exactly the ground states.
    #[test]
    fn cross_oracle_identity() {
        let m = generate_er_maxcut(&InstanceSpec::new(10, 0.75, 4).unwrap()).unwrap();
        let (cut, cut_states) = brute_force_max_cut(&m).unwrap();
        let (e, ground_states) = brute_force_ground(&m).unwrap();
        assert_eq!(cut_states, ground_states);
        let s = &cut_states[0];
        assert_eq!(m.cut_value(s).unwrap(), cut);
        assert_eq!(m.energy(s).unwrap(), e);
    }

    #[test]
    fn capacity_error() {
        let m = IsingModel::new(25);
        assert!(matches!(
            brute_force_ground(&m),
            Err(Error::Capacity { n: 25, limit: 24 })
        ));
        assert!(matches!(
            brute_force_max_cut(&m),
            Err(Error::Capacity { .. })
        ));
    }
}
