//! Bounded-degree sparsification via ferromagnetic copy chains, and
//! decoding of physical states back to logical states.
//!
//! Each logical node is replaced by a chain of physical nodes (the source
//! followed by its copies) joined by edges of strength `w0 > 0`; problem
//! edges are redistributed along the chain so that no physical node exceeds
//! the degree bound `k`. For every logical state `s`,
//!
//! ```text
//! energy(physical, embed_state(s)) = energy(dense, s) - w0 * copy_edge_count
//! ```
//!
//! so an agreeing physical ground state decodes to a dense ground state once
//! `w0` exceeds the per-chain frustration bound.

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};
use crate::rng::{derive_stream, Purpose, SplitMix64};

/// A sparsified model plus the logical-to-physical copy map.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEmbedding {
    physical: IsingModel,
    logical_n: usize,
    /// copy_map[i] = physical indices of logical node i, source first.
    copy_map: Vec<Vec<usize>>,
    w0: f64,
    k: usize,
}

impl SparseEmbedding {
    pub fn physical(&self) -> &IsingModel {
        &self.physical
    }

    pub fn logical_n(&self) -> usize {
        self.logical_n
    }

    pub fn copy_map(&self) -> &[Vec<usize>] {
        &self.copy_map
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Copies per logical node, counting the source ("2 copies" = chain of 2).
    pub fn copies_per_node(&self) -> usize {
        self.copy_map[0].len()
    }

    /// Total number of chain edges: logical_n * (copies_per_node - 1).
    pub fn copy_edge_count(&self) -> usize {
        self.copy_map.iter().map(|c| c.len() - 1).sum()
    }

    /// Builds an embedding from parts, checking every invariant.
    pub fn from_parts(
        physical: IsingModel,
        copy_map: Vec<Vec<usize>>,
        w0: f64,
        k: usize,
    ) -> Result<Self> {
        let logical_n = copy_map.len();
        let mut owner = vec![usize::MAX; physical.n()];
        for (logical, chain) in copy_map.iter().enumerate() {
            if chain.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "logical node {logical} has an empty copy list"
                )));
            }
            for &p in chain {
                if p >= physical.n() {
                    return Err(Error::InvalidModel(format!(
                        "physical index {p} out of range"
                    )));
                }
                if owner[p] != usize::MAX {
                    return Err(Error::InvalidModel(format!(
                        "physical node {p} appears in two copy lists"
                    )));
                }
                owner[p] = logical;
            }
            for pair in chain.windows(2) {
                if physical.coupling(pair[0], pair[1]) != w0 {
                    return Err(Error::InvalidModel(format!(
                        "chain edge ({}, {}) missing or not w0",
                        pair[0], pair[1]
                    )));
                }
            }
        }
        if owner.iter().any(|&o| o == usize::MAX) {
            return Err(Error::InvalidModel(
                "some physical node belongs to no copy list".into(),
            ));
        }
        if (0..physical.n()).any(|p| physical.degree(p) > k) {
            return Err(Error::InvalidModel("physical degree exceeds k".into()));
        }
        Ok(SparseEmbedding {
            physical,
            logical_n,
            copy_map,
            w0,
            k,
        })
    }

    /// Physical state in which every copy of logical node i carries m_i.
    pub fn embed_state(&self, logical: &SpinState) -> Result<SpinState> {
        if logical.len() != self.logical_n {
            return Err(Error::DimensionMismatch {
                expected: self.logical_n,
                got: logical.len(),
            });
        }
        let mut spins = vec![1i8; self.physical.n()];
        for (i, chain) in self.copy_map.iter().enumerate() {
            for &p in chain {
                spins[p] = logical.get(i);
            }
        }
        SpinState::new(spins)
    }

    /// Fraction of logical nodes whose copies are not unanimous.
    pub fn chain_break_fraction(&self, physical: &SpinState) -> Result<f64> {
        if physical.len() != self.physical.n() {
            return Err(Error::DimensionMismatch {
                expected: self.physical.n(),
                got: physical.len(),
            });
        }
        let broken = self
            .copy_map
            .iter()
            .filter(|chain| {
                let first = physical.get(chain[0]);
                chain[1..].iter().any(|&p| physical.get(p) != first)
            })
            .count();
        Ok(broken as f64 / self.logical_n as f64)
    }

    /// The logical edge multiset recovered by mapping non-copy edges of the
    /// physical model back through the copy map. Used by invariant checks.
    pub fn recovered_logical_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut owner = vec![0usize; self.physical.n()];
        for (i, chain) in self.copy_map.iter().enumerate() {
            for &p in chain {
                owner[p] = i;
            }
        }
        let mut edges: Vec<(usize, usize, f64)> = self
            .physical
            .edges()
            .filter(|&(a, b, _)| owner[a] != owner[b])
            .map(|(a, b, w)| {
                let (i, j) = (owner[a].min(owner[b]), owner[a].max(owner[b]));
                (i, j, w)
            })
            .collect();
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        edges
    }

    /// The dense model this embedding represents: recovered logical edges
    /// (weights of parallel strands summed) plus per-chain bias totals
    /// (copies agree in any unbroken state, so chain biases add).
    pub fn logical_model(&self) -> Result<IsingModel> {
        let mut model = IsingModel::new(self.logical_n);
        for (i, j, w) in self.recovered_logical_edges() {
            model.add_coupling(i, j, w)?;
        }
        for (i, chain) in self.copy_map.iter().enumerate() {
            let total: f64 = chain.iter().map(|&p| self.physical.bias(p)).sum();
            model.set_bias(i, total)?;
        }
        Ok(model)
    }
}

/// How disagreeing copy chains are resolved during decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodePolicy {
    /// Unbiased coin flip per broken chain, from a stream seeded here.
    CoinFlip { seed: u64 },
    /// Sign of the copy-value sum; an even-count tie falls back to a coin
    /// flip from the same stream.
    MajorityVote { seed: u64 },
}

impl DecodePolicy {
    fn seed(&self) -> u64 {
        match *self {
            DecodePolicy::CoinFlip { seed } | DecodePolicy::MajorityVote { seed } => seed,
        }
    }
}

/// Stateful decoder: the conflict stream advances across calls, so repeated
/// decodes of broken chains draw fresh coins.
#[derive(Debug, Clone)]
pub struct Decoder {
    policy: DecodePolicy,
    stream: SplitMix64,
}

impl Decoder {
    pub fn new(policy: DecodePolicy) -> Self {
        Decoder {
            policy,
            stream: derive_stream(policy.seed(), Purpose::Decode, 0),
        }
    }

    /// Logical state for a physical sample. Chains are visited in logical
    /// node order; only non-unanimous chains consume coin flips.
    pub fn decode(
        &mut self,
        embedding: &SparseEmbedding,
        physical: &SpinState,
    ) -> Result<SpinState> {
        if physical.len() != embedding.physical.n() {
            return Err(Error::DimensionMismatch {
                expected: embedding.physical.n(),
                got: physical.len(),
            });
        }
        let mut spins = Vec::with_capacity(embedding.logical_n);
        for chain in &embedding.copy_map {
            let first = physical.get(chain[0]);
            let unanimous = chain[1..].iter().all(|&p| physical.get(p) == first);
            let value = if unanimous {
                first
            } else {
                match self.policy {
                    DecodePolicy::CoinFlip { .. } => self.stream.next_spin(),
                    DecodePolicy::MajorityVote { .. } => {
                        let sum: i32 = chain.iter().map(|&p| i32::from(physical.get(p))).sum();
                        match sum.cmp(&0) {
                            std::cmp::Ordering::Greater => 1,
                            std::cmp::Ordering::Less => -1,
                            std::cmp::Ordering::Equal => self.stream.next_spin(),
                        }
                    }
                }
            };
            spins.push(value);
        }
        SpinState::new(spins)
    }
}

/// Chain problem-edge capacity: a chain of C+1 nodes with degree bound k can
/// host k edges when C = 0 (no chain edges), else the two ends host k-1 each
/// and each interior node k-2.
pub fn chain_capacity(copies_beyond_source: usize, k: usize) -> usize {
    let c = copies_beyond_source;
    if c == 0 {
        k
    } else {
        2 * (k - 1) + (c - 1) * (k - 2)
    }
}

/// Smallest C >= 0 such that a chain of C+1 physical nodes hosts
/// `max_degree` problem edges under degree bound k.
pub fn required_copies(max_degree: usize, k: usize) -> Result<usize> {
    if k < 3 {
        return Err(Error::InvalidBound { k });
    }
    let mut c = 0;
    while chain_capacity(c, k) < max_degree {
        c += 1;
    }
    Ok(c)
}

/// Smallest degree bound k >= 3 whose chains have exactly `copies` nodes
/// (source included) at the given max degree. Used to target a copy count.
pub fn k_for_copies(max_degree: usize, copies: usize) -> Result<usize> {
    if copies == 0 {
        return Err(Error::InvalidSpec("copy count must be >= 1".into()));
    }
    for k in 3..=(max_degree.max(3) + 1) {
        if required_copies(max_degree, k)? + 1 == copies {
            return Ok(k);
        }
    }
    Err(Error::InvalidSpec(format!(
        "no degree bound yields {copies} copies at max degree {max_degree}"
    )))
}

/// Per-chain problem-edge quota of chain position `pos` (0 = source) in a
/// chain with C copies beyond the source.
fn position_quota(pos: usize, c: usize, k: usize) -> usize {
    if c == 0 {
        k
    } else if pos == 0 || pos == c {
        k - 1
    } else {
        k - 2
    }
}

/// Sparsifies a dense model into a bounded-degree model with uniform copy
/// chains of strength `w0`.
///
/// Chain layout: the source of logical node i keeps physical index i; the
/// c-th extra copy (c = 1..=C) sits at `n + i*C + (c-1)`. Each endpoint of a
/// problem edge independently picks its hosting chain position by filling
/// the source first, then each copy in order, taking its incident edges in
/// ascending neighbor-index order. Biases stay on the source node.
pub fn sparsify(dense: &IsingModel, k: usize, w0: f64) -> Result<SparseEmbedding> {
    if k < 3 {
        return Err(Error::InvalidBound { k });
    }
    if !(w0 > 0.0) {
        return Err(Error::InvalidSpec(format!("w0 must be > 0, got {w0}")));
    }
    let n = dense.n();
    let c = required_copies(dense.max_degree(), k)?;
    let physical_n = n * (c + 1);

    let copy_map: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut chain = vec![i];
            chain.extend((0..c).map(|copy| n + i * c + copy));
            chain
        })
        .collect();

    let mut physical = IsingModel::new(physical_n);

    // Chain position hosting a node's edge to its rank-th neighbor
    // (ascending neighbor order), filling source then copies in sequence.
    let host_position = |neighbor_rank: usize| -> usize {
        let mut remaining = neighbor_rank;
        let mut pos = 0;
        loop {
            let quota = position_quota(pos, c, k);
            if remaining < quota {
                return pos;
            }
            remaining -= quota;
            pos += 1;
        }
    };

    let rank_of = |i: usize, j: usize| -> usize {
        dense
            .neighbors(i)
            .position(|(nb, _)| nb == j)
            .expect("edge endpoint must be a neighbor")
    };

    for (i, j, w) in dense.edges() {
        let pi = host_position(rank_of(i, j));
        let pj = host_position(rank_of(j, i));
        physical.set_coupling(copy_map[i][pi], copy_map[j][pj], w)?;
    }
    for chain in &copy_map {
        for pair in chain.windows(2) {
            physical.set_coupling(pair[0], pair[1], w0)?;
        }
    }
    for i in 0..n {
        if dense.bias(i) != 0.0 {
            physical.set_bias(copy_map[i][0], dense.bias(i))?;
        }
    }

    SparseEmbedding::from_parts(physical, copy_map, w0, k)
}
