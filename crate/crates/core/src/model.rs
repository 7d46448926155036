//! Ising models, spin states, and random Max-Cut instance generation.
//!
//! The Hamiltonian is
//!
//! ```text
//! E = - sum_{i<j} J_ij m_i m_j - sum_i h_i m_i,      m_i in {-1, +1}
//! ```
//!
//! and the cut value of a state is `sum_{i<j} J_ij (m_i m_j - 1) / 2`, which
//! with the Max-Cut convention `W_ij = -J_ij = +1` counts cut edges.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Symmetric coupling matrix plus per-node biases.
///
/// Couplings are stored once per unordered pair in per-node neighbor maps;
/// zero couplings are never stored (zero means no edge).
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n: usize,
    adj: Vec<BTreeMap<usize, f64>>,
    biases: Vec<f64>,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        IsingModel {
            n,
            adj: vec![BTreeMap::new(); n],
            biases: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidModel(format!(
                "node index {i} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Sets J_ij = J_ji = w. Setting w = 0 removes the edge.
    pub fn set_coupling(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::InvalidModel(format!("self-coupling at node {i}")));
        }
        if w == 0.0 {
            self.adj[i].remove(&j);
            self.adj[j].remove(&i);
        } else {
            self.adj[i].insert(j, w);
            self.adj[j].insert(i, w);
        }
        Ok(())
    }

    /// Adds w to J_ij, removing the edge if the sum cancels to zero.
    pub fn add_coupling(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        let cur = self.coupling(i, j);
        self.set_coupling(i, j, cur + w)
    }

    /// J_ij, or 0 when no edge is present. Symmetric in (i, j).
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.adj
            .get(i)
            .and_then(|m| m.get(&j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set_bias(&mut self, i: usize, h: f64) -> Result<()> {
        self.check_node(i)?;
        self.biases[i] = h;
        Ok(())
    }

    pub fn add_bias(&mut self, i: usize, h: f64) -> Result<()> {
        self.check_node(i)?;
        self.biases[i] += h;
        Ok(())
    }

    pub fn bias(&self, i: usize) -> f64 {
        self.biases[i]
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Neighbors of node i with coupling weights, ascending by index.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[i].iter().map(|(&j, &w)| (j, w))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    /// Edges in canonical (i < j) order with weights.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.range(i + 1..).map(move |(&j, &w)| (i, j, w)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.len()).sum::<usize>() / 2
    }

    /// Sum of |J_ij| over all edges.
    pub fn total_abs_coupling(&self) -> f64 {
        self.edges().map(|(_, _, w)| w.abs()).sum()
    }

    fn check_state(&self, state: &SpinState) -> Result<()> {
        if state.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: state.len(),
            });
        }
        Ok(())
    }

    /// Hamiltonian energy, summed once over canonical i < j pairs.
    pub fn energy(&self, state: &SpinState) -> Result<f64> {
        self.check_state(state)?;
        let m = state.spins();
        let mut e = 0.0;
        for (i, adj) in self.adj.iter().enumerate() {
            let mi = f64::from(m[i]);
            for (&j, &w) in adj.range(i + 1..) {
                e -= w * mi * f64::from(m[j]);
            }
            e -= self.biases[i] * mi;
        }
        Ok(e)
    }

    /// Cut value sum_{i<j} J_ij (m_i m_j - 1) / 2; biases are ignored.
    pub fn cut_value(&self, state: &SpinState) -> Result<f64> {
        self.check_state(state)?;
        let m = state.spins();
        let mut c = 0.0;
        for (i, adj) in self.adj.iter().enumerate() {
            let mi = f64::from(m[i]);
            for (&j, &w) in adj.range(i + 1..) {
                c += w * (mi * f64::from(m[j]) - 1.0) / 2.0;
            }
        }
        Ok(c)
    }

    /// Edge density 2E / (V(V-1)).
    pub fn graph_density(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Degenerate(format!(
                "density undefined for n = {}",
                self.n
            )));
        }
        let e = self.edge_count() as f64;
        let v = self.n as f64;
        Ok(2.0 * e / (v * (v - 1.0)))
    }
}

/// Vector of spins in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinState {
    spins: Vec<i8>,
}

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidModel(format!(
                "spin value {bad} is not +1 or -1"
            )));
        }
        Ok(SpinState { spins })
    }

    pub fn uniform(value: i8, n: usize) -> Result<Self> {
        SpinState::new(vec![value; n])
    }

    /// State whose spin i is +1 iff bit i of `index` is set.
    pub fn from_index(index: u64, n: usize) -> Self {
        let spins = (0..n)
            .map(|i| if (index >> i) & 1 == 1 { 1 } else { -1 })
            .collect();
        SpinState { spins }
    }

    /// Inverse of [`SpinState::from_index`]; spin i = +1 sets bit i.
    pub fn to_index(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &s)| acc | (u64::from(s == 1) << i))
    }

    /// Random state, each spin +1 with probability 1/2.
    pub fn random(n: usize, rng: &mut SplitMix64) -> Self {
        SpinState {
            spins: (0..n).map(|_| rng.next_spin()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, i: usize) -> i8 {
        self.spins[i]
    }

    pub fn set(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.spins[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.spins[i] = -self.spins[i];
    }

    /// Globally flipped copy.
    pub fn negated(&self) -> Self {
        SpinState {
            spins: self.spins.iter().map(|&s| -s).collect(),
        }
    }
}

/// Parameters of a random Erdos-Renyi Max-Cut instance.
///
/// The weight convention is pinned: every generated edge carries
/// `W_ij = -J_ij = +1`, i.e. J_ij = -1, and all biases are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    pub edge_probability: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(n: usize, edge_probability: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("instance needs n >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&edge_probability) {
            return Err(Error::InvalidSpec(format!(
                "edge probability {edge_probability} not in [0, 1]"
            )));
        }
        Ok(InstanceSpec {
            n,
            edge_probability,
            seed,
        })
    }
}

/// Random ER(n, p) Max-Cut instance with J_ij = -1 on edges and h = 0.
///
/// Pairs are visited in canonical row-major order ((0,1), (0,2), ... (1,2),
/// ...) drawing one uniform per pair from `SplitMix64::new(spec.seed)`; the
/// pair is an edge when u < p. Fixed seed gives an identical model.
pub fn generate_er_maxcut(spec: &InstanceSpec) -> Result<IsingModel> {
    InstanceSpec::new(spec.n, spec.edge_probability, spec.seed)?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut model = IsingModel::new(spec.n);
    for i in 0..spec.n {
        for j in (i + 1)..spec.n {
            if rng.next_f64() < spec.edge_probability {
                model.set_coupling(i, j, -1.0)?;
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(spins: &[i8]) -> SpinState {
        SpinState::new(spins.to_vec()).unwrap()
    }

    #[test]
    fn energy_single_bias() {
        let mut m = IsingModel::new(1);
        m.set_bias(0, 2.0).unwrap();
        assert_eq!(m.energy(&state(&[1])).unwrap(), -2.0);
    }

    #[test]
    fn energy_ferromagnetic_pair() {
        let mut m = IsingModel::new(2);
        m.set_coupling(0, 1, 1.0).unwrap();
        assert_eq!(m.energy(&state(&[1, 1])).unwrap(), -1.0);
        assert_eq!(m.energy(&state(&[1, -1])).unwrap(), 1.0);
    }

    #[test]
    fn energy_dimension_mismatch() {
        let m = IsingModel::new(3);
        let err = m.energy(&state(&[1, 1])).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch { expected: 3, got: 2 }
        ));
    }

    #[test]
    fn cut_triangle_one_node_separated() {
        let mut m = IsingModel::new(3);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            m.set_coupling(i, j, -1.0).unwrap();
        }
        assert_eq!(m.cut_value(&state(&[1, 1, -1])).unwrap(), 2.0);
    }

    #[test]
    fn cut_complete_bipartite_3_3() {
        let mut m = IsingModel::new(6);
        for i in 0..3 {
            for j in 3..6 {
                m.set_coupling(i, j, -1.0).unwrap();
            }
        }
        let s = state(&[1, 1, 1, -1, -1, -1]);
        assert_eq!(m.cut_value(&s).unwrap(), 9.0);
    }

    #[test]
    fn density_complete_and_path() {
        let mut complete = IsingModel::new(5);
        for i in 0..5 {
            for j in (i + 1)..5 {
                complete.set_coupling(i, j, -1.0).unwrap();
            }
        }
        assert_eq!(complete.graph_density().unwrap(), 1.0);

        let mut path = IsingModel::new(4);
        for i in 0..3 {
            path.set_coupling(i, i + 1, -1.0).unwrap();
        }
        assert_eq!(path.graph_density().unwrap(), 0.5);

        let edgeless = IsingModel::new(4);
        assert_eq!(edgeless.graph_density().unwrap(), 0.0);

        assert!(matches!(
            IsingModel::new(1).graph_density(),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn coupling_is_symmetric_and_zero_removes() {
        let mut m = IsingModel::new(4);
        m.set_coupling(2, 0, 1.5).unwrap();
        assert_eq!(m.coupling(0, 2), 1.5);
        assert_eq!(m.coupling(2, 0), 1.5);
        assert_eq!(m.edge_count(), 1);
        m.set_coupling(0, 2, 0.0).unwrap();
        assert_eq!(m.edge_count(), 0);
        assert!(m.set_coupling(1, 1, 1.0).is_err());
    }

    #[test]
    fn global_flip_symmetry_without_bias() {
        let spec = InstanceSpec::new(8, 0.75, 5).unwrap();
        let m = generate_er_maxcut(&spec).unwrap();
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let s = SpinState::random(8, &mut rng);
            assert_eq!(
                m.energy(&s).unwrap(),
                m.energy(&s.negated()).unwrap()
            );
        }
    }

    // cut(s) - cut(s') = -(E(s) - E(s'))/2 for h = 0.
    #[test]
    fn cut_energy_affine_relation() {
        let spec = InstanceSpec::new(9, 0.75, 3).unwrap();
        let m = generate_er_maxcut(&spec).unwrap();
        let mut rng = SplitMix64::new(21);
        for _ in 0..50 {
            let s = SpinState::random(9, &mut rng);
            let t = SpinState::random(9, &mut rng);
            let lhs = m.cut_value(&s).unwrap() - m.cut_value(&t).unwrap();
            let rhs = -(m.energy(&s).unwrap() - m.energy(&t).unwrap()) / 2.0;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    // Golden edge lists frozen from an independent generator implementation.
    #[test]
    fn er_generator_golden_edges() {
        let m = generate_er_maxcut(&InstanceSpec::new(6, 0.75, 42).unwrap()).unwrap();
        let edges: Vec<(usize, usize)> = m.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(
            edges,
            vec![
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 3),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 4),
                (3, 5),
                (4, 5),
            ]
        );
        assert!(m.edges().all(|(_, _, w)| w == -1.0));

        let m7 = generate_er_maxcut(&InstanceSpec::new(6, 0.75, 7).unwrap()).unwrap();
        let edges7: Vec<(usize, usize)> = m7.edges().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(
            edges7,
            vec![
                (0, 1),
                (0, 2),
                (0, 4),
                (0, 5),
                (1, 2),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
            ]
        );
    }

    #[test]
    fn er_generator_determinism_and_p1_limit() {
        let spec = InstanceSpec::new(20, 0.75, 123).unwrap();
        let a = generate_er_maxcut(&spec).unwrap();
        let b = generate_er_maxcut(&spec).unwrap();
        assert_eq!(a, b);

        let full = generate_er_maxcut(&InstanceSpec::new(100, 1.0, 0).unwrap()).unwrap();
        assert_eq!(full.graph_density().unwrap(), 1.0);
    }

    #[test]
    fn er_generator_mean_degree() {
        // ER(50, 0.75): mean degree over seeds approaches 0.75 * 49 = 36.75.
        let mut total = 0.0;
        let seeds = 30;
        for seed in 0..seeds {
            let m = generate_er_maxcut(&InstanceSpec::new(50, 0.75, seed).unwrap()).unwrap();
            total += 2.0 * m.edge_count() as f64 / 50.0;
        }
        let mean = total / seeds as f64;
        assert!((mean - 36.75).abs() < 1.5, "mean degree {mean}");
    }

    #[test]
    fn er_density_statistical() {
        for seed in 0..20 {
            let m = generate_er_maxcut(&InstanceSpec::new(100, 0.75, seed).unwrap()).unwrap();
            let d = m.graph_density().unwrap();
            assert!((d - 0.75).abs() < 0.05, "density {d} at seed {seed}");
        }
    }

    #[test]
    fn state_index_roundtrip() {
        for idx in 0..32u64 {
            let s = SpinState::from_index(idx, 5);
            assert_eq!(s.to_index(), idx);
        }
        let s = SpinState::from_index(0b10110, 5);
        assert_eq!(s.spins(), &[-1, 1, 1, -1, 1]);
    }

    #[test]
    fn spin_state_rejects_bad_values() {
        assert!(SpinState::new(vec![1, 0, -1]).is_err());
        assert!(SpinState::new(vec![1, -1]).is_ok());
    }
}
