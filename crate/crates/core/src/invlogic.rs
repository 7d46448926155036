//! Invertible logic: gate Hamiltonians whose degenerate ground states are
//! exactly a truth table, composed into a sparse multiplier network whose
//! output can be clamped to factor integers.
//!
//! Logic encoding: logical 0 is m = -1, logical 1 is m = +1. Gate tables
//! are derived by exhaustive integer search rather than transcribed, and
//! verified against brute-force enumeration.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{IsingModel, SpinState};
use crate::oracle::brute_force_ground;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateName {
    And,
    FullAdder,
}

impl GateName {
    pub fn n_spins(self) -> usize {
        match self {
            GateName::And => 3,
            GateName::FullAdder => 5,
        }
    }

    /// Truth-table states as state indices (bit i = spin i = +1).
    /// AND binds spins (a, b, out); FULL_ADDER binds (a, b, cin, sum, cout).
    fn truth_indices(self) -> Vec<u64> {
        let mut states = Vec::new();
        match self {
            GateName::And => {
                for a in 0..2u64 {
                    for b in 0..2u64 {
                        states.push(a | b << 1 | (a & b) << 2);
                    }
                }
            }
            GateName::FullAdder => {
                for a in 0..2u64 {
                    for b in 0..2u64 {
                        for c in 0..2u64 {
                            let sum = a ^ b ^ c;
                            let cout = (a & b) | (a & c) | (b & c);
                            states.push(a | b << 1 | c << 2 | sum << 3 | cout << 4);
                        }
                    }
                }
            }
        }
        states.sort_unstable();
        states
    }
}

/// A gate Hamiltonian with integer weights and its verified ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct GateLibraryEntry {
    pub name: GateName,
    pub n_spins: usize,
    /// Nonzero couplings in canonical (i, j) order.
    pub couplings: Vec<(usize, usize, i64)>,
    pub biases: Vec<i64>,
    /// The gate truth table, equal to the brute-force ground states.
    pub ground_set: Vec<SpinState>,
}

impl GateLibraryEntry {
    pub fn model(&self) -> IsingModel {
        let mut m = IsingModel::new(self.n_spins);
        for &(i, j, w) in &self.couplings {
            m.set_coupling(i, j, w as f64).expect("entry indices are valid");
        }
        for (i, &h) in self.biases.iter().enumerate() {
            if h != 0 {
                m.set_bias(i, h as f64).expect("entry indices are valid");
            }
        }
        m
    }
}

/// Finds integer couplings/biases with |w| <= max_weight whose degenerate
/// ground states are exactly the gate truth table. Depth-first search over
/// the variable vector (pair couplings in lexicographic order, then biases)
/// with values ascending from -max_weight, pruned by interval bounds on the
/// remaining suffix; the first solution found is the lexicographically
/// smallest. Integer-weight energy differences are even, so "strictly
/// higher" is enforced as a margin of 2.
pub fn derive_gate(name: GateName, max_weight: i64) -> Result<GateLibraryEntry> {
    if max_weight < 0 {
        return Err(Error::InvalidSpec("max_weight must be >= 0".into()));
    }
    let s = name.n_spins();
    let n_states = 1usize << s;
    let truth = name.truth_indices();
    let mut is_truth = vec![false; n_states];
    for &t in &truth {
        is_truth[t as usize] = true;
    }
    let reference = truth[0] as usize;

    // Variables: pairs (i, j) with i < j in lex order, then biases.
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for i in 0..s {
        for j in (i + 1)..s {
            vars.push((i, j));
        }
    }
    let n_pairs = vars.len();
    let n_vars = n_pairs + s;

    let spin = |state: usize, i: usize| -> i64 {
        if (state >> i) & 1 == 1 {
            1
        } else {
            -1
        }
    };
    // coeff[v][state]: energy contribution of a unit weight on variable v.
    let coeff = |v: usize, state: usize| -> i64 {
        if v < n_pairs {
            let (i, j) = vars[v];
            -spin(state, i) * spin(state, j)
        } else {
            -spin(state, v - n_pairs)
        }
    };

    // diff[v][state] = coeff difference against the reference truth state,
    // so the constraint set is D(state) = 0 on truth, D(state) >= 2 off it.
    let diff: Vec<Vec<i64>> = (0..n_vars)
        .map(|v| {
            (0..n_states)
                .map(|st| coeff(v, st) - coeff(v, reference))
                .collect()
        })
        .collect();
    // suffix[v][state] = sum_{u >= v} |diff[u][state]|.
    let mut suffix = vec![vec![0i64; n_states]; n_vars + 1];
    for v in (0..n_vars).rev() {
        for st in 0..n_states {
            suffix[v][st] = suffix[v + 1][st] + diff[v][st].abs();
        }
    }

    struct Search<'a> {
        max_weight: i64,
        n_vars: usize,
        n_states: usize,
        is_truth: &'a [bool],
        diff: &'a [Vec<i64>],
        suffix: &'a [Vec<i64>],
    }

    impl Search<'_> {
        fn feasible(&self, next_var: usize, d: &[i64]) -> bool {
            for st in 0..self.n_states {
                let reach = self.max_weight * self.suffix[next_var][st];
                if self.is_truth[st] {
                    if d[st].abs() > reach {
                        return false;
                    }
                } else if d[st] + reach < 2 {
                    return false;
                }
            }
            true
        }

        fn dfs(&self, var: usize, d: &mut [i64], assign: &mut Vec<i64>) -> bool {
            if var == self.n_vars {
                return true;
            }
            for w in -self.max_weight..=self.max_weight {
                for st in 0..self.n_states {
                    d[st] += self.diff[var][st] * w;
                }
                if self.feasible(var + 1, d) {
                    assign.push(w);
                    if self.dfs(var + 1, d, assign) {
                        return true;
                    }
                    assign.pop();
                }
                for st in 0..self.n_states {
                    d[st] -= self.diff[var][st] * w;
                }
            }
            false
        }
    }

    let search = Search {
        max_weight,
        n_vars,
        n_states,
        is_truth: &is_truth,
        diff: &diff,
        suffix: &suffix,
    };
    let mut d = vec![0i64; n_states];
    let mut assign = Vec::with_capacity(n_vars);
    if !search.feasible(0, &d) || !search.dfs(0, &mut d, &mut assign) {
        return Err(Error::Infeasible(format!(
            "no {name:?} Hamiltonian with integer weights of magnitude <= {max_weight}"
        )));
    }

    let couplings: Vec<(usize, usize, i64)> = vars
        .iter()
        .zip(&assign)
        .filter(|&(_, &w)| w != 0)
        .map(|(&(i, j), &w)| (i, j, w))
        .collect();
    let biases: Vec<i64> = assign[n_pairs..].to_vec();
    let entry = GateLibraryEntry {
        name,
        n_spins: s,
        couplings,
        biases,
        ground_set: truth.iter().map(|&t| SpinState::from_index(t, s)).collect(),
    };

    // Defense in depth: the search constraints already encode this.
    let (_, ground) = brute_force_ground(&entry.model())?;
    if ground != entry.ground_set {
        return Err(Error::Infeasible(
            "search produced a table whose ground set is not the truth table".into(),
        ));
    }
    Ok(entry)
}

/// The two entries the multiplier needs.
#[derive(Debug, Clone, PartialEq)]
pub struct GateLibrary {
    pub and_gate: GateLibraryEntry,
    pub full_adder: GateLibraryEntry,
}

impl GateLibrary {
    pub fn derive(max_weight: i64) -> Result<Self> {
        Ok(GateLibrary {
            and_gate: derive_gate(GateName::And, max_weight)?,
            full_adder: derive_gate(GateName::FullAdder, max_weight)?,
        })
    }

    /// Library at the minimal weight bound 2.
    pub fn standard() -> Result<Self> {
        Self::derive(2)
    }
}

/// One gate instance: which entry, bound to which global spins (entry port
/// order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateBinding {
    pub gate: GateName,
    pub spins: Vec<usize>,
}

/// A composed gate network: the merged Ising model, the gate bindings, the
/// factor/output ports, and the clamped spins (excluded from updates, their
/// fields absorbed by [`CircuitNet::reduced`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitNet {
    model: IsingModel,
    gates: Vec<GateBinding>,
    p_port: Vec<usize>,
    q_port: Vec<usize>,
    f_port: Vec<usize>,
    clamps: BTreeMap<usize, i8>,
    n_bits: usize,
}

impl CircuitNet {
    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    pub fn gates(&self) -> &[GateBinding] {
        &self.gates
    }

    /// Factor port p, LSB first (LSB structurally clamped to 1).
    pub fn p_port(&self) -> &[usize] {
        &self.p_port
    }

    pub fn q_port(&self) -> &[usize] {
        &self.q_port
    }

    /// Product port, LSB first, 2 * n_bits wide.
    pub fn f_port(&self) -> &[usize] {
        &self.f_port
    }

    pub fn clamps(&self) -> &BTreeMap<usize, i8> {
        &self.clamps
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn spin_count(&self) -> usize {
        self.model.n()
    }

    /// Sorted distinct |J| magnitudes over all couplings.
    pub fn distinct_weight_magnitudes(&self) -> Vec<f64> {
        let mut mags: Vec<f64> = self.model.edges().map(|(_, _, w)| w.abs()).collect();
        mags.sort_by(f64::total_cmp);
        mags.dedup();
        mags
    }

    /// From-parts constructor for netlist deserialization; gate bindings are
    /// not part of the netlist format and stay empty.
    pub fn from_parts(
        model: IsingModel,
        p_port: Vec<usize>,
        q_port: Vec<usize>,
        f_port: Vec<usize>,
        clamps: BTreeMap<usize, i8>,
    ) -> Result<Self> {
        let n = model.n();
        for &i in p_port.iter().chain(&q_port).chain(&f_port) {
            if i >= n {
                return Err(Error::InvalidModel(format!("port index {i} out of range")));
            }
        }
        for (&i, &v) in &clamps {
            if i >= n {
                return Err(Error::InvalidModel(format!("clamp index {i} out of range")));
            }
            if v != 1 && v != -1 {
                return Err(Error::InvalidModel(format!("clamp value {v} at spin {i}")));
            }
        }
        if p_port.len() != q_port.len() || f_port.len() != 2 * p_port.len() {
            return Err(Error::InvalidModel("inconsistent port widths".into()));
        }
        let n_bits = p_port.len();
        Ok(CircuitNet {
            model,
            gates: Vec::new(),
            p_port,
            q_port,
            f_port,
            clamps,
            n_bits,
        })
    }

    /// Model over the unclamped spins with every clamped spin absorbed: its
    /// couplings become constant fields on live neighbors and its bias and
    /// clamped-clamped couplings a constant energy offset, so that
    /// `full.energy(expand(s)) = reduced.energy(s) + offset`.
    pub fn reduced(&self) -> Result<ReducedNet> {
        let n = self.model.n();
        let mut index_of = vec![None; n];
        let live: Vec<usize> = (0..n).filter(|i| !self.clamps.contains_key(i)).collect();
        for (ri, &fi) in live.iter().enumerate() {
            index_of[fi] = Some(ri);
        }
        let mut reduced = IsingModel::new(live.len());
        let mut offset = 0.0;
        for (i, j, w) in self.model.edges() {
            match (index_of[i], index_of[j]) {
                (Some(ri), Some(rj)) => reduced.set_coupling(ri, rj, w)?,
                (Some(ri), None) => {
                    reduced.add_bias(ri, w * f64::from(self.clamps[&j]))?;
                }
                (None, Some(rj)) => {
                    reduced.add_bias(rj, w * f64::from(self.clamps[&i]))?;
                }
                (None, None) => {
                    offset -= w * f64::from(self.clamps[&i]) * f64::from(self.clamps[&j]);
                }
            }
        }
        for (ri, &fi) in live.iter().enumerate() {
            reduced.add_bias(ri, self.model.bias(fi))?;
        }
        for (&c, &v) in &self.clamps {
            offset -= self.model.bias(c) * f64::from(v);
        }
        Ok(ReducedNet {
            model: reduced,
            live,
            index_of,
            offset,
            clamps: self.clamps.clone(),
            full_n: n,
        })
    }
}

/// A [`CircuitNet`] with clamps absorbed; states live on the reduced index
/// space.
#[derive(Debug, Clone)]
pub struct ReducedNet {
    pub model: IsingModel,
    /// live[reduced index] = full index.
    pub live: Vec<usize>,
    /// index_of[full index] = reduced index for live spins.
    pub index_of: Vec<Option<usize>>,
    /// full energy = reduced energy + offset on corresponding states.
    pub offset: f64,
    clamps: BTreeMap<usize, i8>,
    full_n: usize,
}

impl ReducedNet {
    /// Full-space state: live spins from `state`, clamped spins from clamps.
    pub fn expand(&self, state: &SpinState) -> Result<SpinState> {
        if state.len() != self.live.len() {
            return Err(Error::DimensionMismatch {
                expected: self.live.len(),
                got: state.len(),
            });
        }
        let mut spins = vec![0i8; self.full_n];
        for (ri, &fi) in self.live.iter().enumerate() {
            spins[fi] = state.get(ri);
        }
        for (&c, &v) in &self.clamps {
            spins[c] = v;
        }
        SpinState::new(spins)
    }

    /// Integer read of a port (full-space indices, LSB first) from a
    /// reduced-space state; clamped bits come from the clamps.
    pub fn read_port(&self, port: &[usize], state: &SpinState) -> u64 {
        port.iter()
            .enumerate()
            .map(|(bit, &fi)| {
                let m = match self.index_of[fi] {
                    Some(ri) => state.get(ri),
                    None => self.clamps[&fi],
                };
                u64::from(m == 1) << bit
            })
            .fold(0, |acc, b| acc | b)
    }
}

/// Binds an entry instance over global spins, merging its weights into the
/// model. Every coupling pair must be fresh; biases accumulate.
fn apply_gate(model: &mut IsingModel, entry: &GateLibraryEntry, spins: &[usize]) -> Result<()> {
    debug_assert_eq!(spins.len(), entry.n_spins);
    for &(i, j, w) in &entry.couplings {
        let (a, b) = (spins[i], spins[j]);
        if model.coupling(a, b) != 0.0 {
            return Err(Error::InvalidModel(format!(
                "coupling ({a}, {b}) bound by two gates"
            )));
        }
        model.set_coupling(a, b, w as f64)?;
    }
    for (i, &h) in entry.biases.iter().enumerate() {
        if h != 0 {
            model.add_bias(spins[i], h as f64)?;
        }
    }
    Ok(())
}

/// Builds an n x n invertible multiplier: an AND array producing partial
/// products, compressed column by column with full adders (three entries)
/// and half adders (full adders with cin clamped to logical 0), computing
/// F = p * q. The LSBs of p and q are clamped to 1.
pub fn build_multiplier(n_bits: usize, library: &GateLibrary) -> Result<CircuitNet> {
    if n_bits < 2 {
        return Err(Error::InvalidSpec(format!(
            "multiplier needs n_bits >= 2, got {n_bits}"
        )));
    }
    let n = n_bits;
    let out_width = 2 * n;

    // Pass 1: lay out spins and gate bindings.
    let mut next = 0usize;
    let fresh = |k: usize, next: &mut usize| -> usize {
        let id = *next;
        *next += k;
        id
    };
    let p_port: Vec<usize> = (0..n).map(|_| fresh(1, &mut next)).collect();
    let q_port: Vec<usize> = (0..n).map(|_| fresh(1, &mut next)).collect();
    let mut clamps = BTreeMap::new();
    clamps.insert(p_port[0], 1i8);
    clamps.insert(q_port[0], 1i8);

    let mut gates: Vec<GateBinding> = Vec::new();
    let mut columns: Vec<VecDeque<usize>> = vec![VecDeque::new(); out_width + 1];
    for i in 0..n {
        for j in 0..n {
            let out = fresh(1, &mut next);
            gates.push(GateBinding {
                gate: GateName::And,
                spins: vec![p_port[i], q_port[j], out],
            });
            columns[i + j].push_back(out);
        }
    }

    let mut f_port = Vec::with_capacity(out_width);
    for s in 0..out_width {
        loop {
            let len = columns[s].len();
            if len >= 3 {
                let a = columns[s].pop_front().unwrap();
                let b = columns[s].pop_front().unwrap();
                let c = columns[s].pop_front().unwrap();
                let sum = fresh(1, &mut next);
                let cout = fresh(1, &mut next);
                gates.push(GateBinding {
                    gate: GateName::FullAdder,
                    spins: vec![a, b, c, sum, cout],
                });
                columns[s].push_back(sum);
                columns[s + 1].push_back(cout);
            } else if len == 2 {
                let a = columns[s].pop_front().unwrap();
                let b = columns[s].pop_front().unwrap();
                let cin = fresh(1, &mut next);
                let sum = fresh(1, &mut next);
                let cout = fresh(1, &mut next);
                clamps.insert(cin, -1);
                gates.push(GateBinding {
                    gate: GateName::FullAdder,
                    spins: vec![a, b, cin, sum, cout],
                });
                columns[s].push_back(sum);
                columns[s + 1].push_back(cout);
            } else {
                break;
            }
        }
        match columns[s].pop_front() {
            Some(spin) => f_port.push(spin),
            None => {
                return Err(Error::InvalidModel(format!(
                    "output column {s} ended empty"
                )))
            }
        }
    }
    if !columns[out_width].is_empty() {
        return Err(Error::InvalidModel(
            "carry escaped beyond the output width".into(),
        ));
    }

    // Pass 2: merge the gate Hamiltonians.
    let mut model = IsingModel::new(next);
    for binding in &gates {
        let entry = match binding.gate {
            GateName::And => &library.and_gate,
            GateName::FullAdder => &library.full_adder,
        };
        apply_gate(&mut model, entry, &binding.spins)?;
    }

    Ok(CircuitNet {
        model,
        gates,
        p_port,
        q_port,
        f_port,
        clamps,
        n_bits,
    })
}

/// Net with the F port clamped to the binary representation of `semiprime`.
pub fn clamp_output(net: &CircuitNet, semiprime: u64) -> Result<CircuitNet> {
    let width = net.f_port.len();
    if width < 64 && semiprime >> width != 0 {
        return Err(Error::Overflow(format!(
            "{semiprime} does not fit the {width}-bit output port"
        )));
    }
    let mut out = net.clone();
    for (bit, &spin) in net.f_port.iter().enumerate() {
        let v = if (semiprime >> bit) & 1 == 1 { 1i8 } else { -1i8 };
        out.clamps.insert(spin, v);
    }
    Ok(out)
}

/// Removes F-port clamps, undoing [`clamp_output`]. Structural clamps
/// (factor LSBs, half-adder carry inputs) are preserved.
pub fn unclamp_output(net: &CircuitNet) -> CircuitNet {
    let mut out = net.clone();
    for &spin in &net.f_port {
        out.clamps.remove(&spin);
    }
    out
}

/// Problem formulation whose p-bit count is being compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// All-to-all quadratized factorization: the 2(n-1) free factor bits.
    Dense,
    /// The invertible multiplier net built here.
    Invertible,
}

/// p-bits required to factor a 2n-bit semiprime under each formulation.
pub fn pbit_count(n_bits: usize, formulation: Formulation, library: &GateLibrary) -> Result<usize> {
    if n_bits < 2 {
        return Err(Error::InvalidSpec(format!(
            "n_bits must be >= 2, got {n_bits}"
        )));
    }
    match formulation {
        Formulation::Dense => Ok(2 * (n_bits - 1)),
        Formulation::Invertible => Ok(build_multiplier(n_bits, library)?.spin_count()),
    }
}

/// All (p, q, p*q) triples representable by the net: factors odd (LSBs are
/// clamped to 1), each n_bits wide.
pub fn valid_triples(n_bits: usize) -> Vec<(u64, u64, u64)> {
    let max = 1u64 << n_bits;
    let mut triples = Vec::new();
    for p in (1..max).step_by(2) {
        for q in (1..max).step_by(2) {
            triples.push((p, q, p * q));
        }
    }
    triples
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_gate_is_sound() {
        let entry = derive_gate(GateName::And, 2).unwrap();
        assert_eq!(entry.n_spins, 3);
        assert_eq!(entry.ground_set.len(), 4);
        let (e0, ground) = brute_force_ground(&entry.model()).unwrap();
        assert_eq!(ground, entry.ground_set);
        // Every non-truth state sits strictly above the degenerate level.
        for idx in 0..8u64 {
            let s = SpinState::from_index(idx, 3);
            let e = entry.model().energy(&s).unwrap();
            if ground.contains(&s) {
                assert_eq!(e, e0);
            } else {
                assert!(e >= e0 + 2.0);
            }
        }
    }

    #[test]
    fn full_adder_is_sound() {
        let entry = derive_gate(GateName::FullAdder, 2).unwrap();
        assert_eq!(entry.n_spins, 5);
        assert_eq!(entry.ground_set.len(), 8);
        let (e0, ground) = brute_force_ground(&entry.model()).unwrap();
        assert_eq!(ground, entry.ground_set);
        for idx in 0..32u64 {
            let s = SpinState::from_index(idx, 5);
            let e = entry.model().energy(&s).unwrap();
            if ground.contains(&s) {
                assert_eq!(e, e0);
            } else {
                assert!(e >= e0 + 2.0);
            }
        }
    }

    // First-solution determinism: the lexicographic search lands on these
    // tables (regression freeze, re-verified by the soundness tests above).
    #[test]
    fn derived_tables_are_stable() {
        let and = derive_gate(GateName::And, 2).unwrap();
        assert_eq!(and.couplings, vec![(0, 1, -1), (0, 2, 2), (1, 2, 2)]);
        assert_eq!(and.biases, vec![1, 1, -2]);

        let fa = derive_gate(GateName::FullAdder, 2).unwrap();
        assert_eq!(
            fa.couplings,
            vec![
                (0, 1, -1),
                (0, 2, -1),
                (0, 3, 1),
                (0, 4, 2),
                (1, 2, -1),
                (1, 3, 1),
                (1, 4, 2),
                (2, 3, 1),
                (2, 4, 2),
                (3, 4, -2),
            ]
        );
        assert_eq!(fa.biases, vec![0, 0, 0, 0, 0]);
    }

    #[test]
    fn zero_weight_bound_is_infeasible() {
        assert!(matches!(
            derive_gate(GateName::And, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn multiplier_n2_ground_set_is_the_truth_table() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(2, &lib).unwrap();
        assert_eq!(net.spin_count(), 14);
        assert_eq!(net.f_port().len(), 4);

        let reduced = net.reduced().unwrap();
        assert_eq!(reduced.model.n(), 10);
        let (_, ground) = brute_force_ground(&reduced.model).unwrap();
        let mut found: Vec<(u64, u64, u64)> = ground
            .iter()
            .map(|s| {
                (
                    reduced.read_port(net.p_port(), s),
                    reduced.read_port(net.q_port(), s),
                    reduced.read_port(net.f_port(), s),
                )
            })
            .collect();
        found.sort_unstable();
        assert_eq!(found, valid_triples(2));
        for &(p, q, f) in &found {
            assert_eq!(p * q, f);
        }
    }

    #[test]
    fn clamped_n2_net_grounds_on_the_factors() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(2, &lib).unwrap();
        let clamped = clamp_output(&net, 9).unwrap();
        let reduced = clamped.reduced().unwrap();
        assert_eq!(reduced.model.n(), 6);
        let (_, ground) = brute_force_ground(&reduced.model).unwrap();
        assert_eq!(ground.len(), 1);
        assert_eq!(reduced.read_port(net.p_port(), &ground[0]), 3);
        assert_eq!(reduced.read_port(net.q_port(), &ground[0]), 3);
    }

    #[test]
    fn clamp_unclamp_roundtrip() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(3, &lib).unwrap();
        let clamped = clamp_output(&net, 35).unwrap();
        assert_ne!(&clamped, &net);
        assert_eq!(unclamp_output(&clamped), net);
    }

    #[test]
    fn clamp_overflow() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(2, &lib).unwrap();
        assert!(clamp_output(&net, 15).is_ok());
        assert!(matches!(
            clamp_output(&net, 16),
            Err(Error::Overflow(_))
        ));
    }

    // Reduced and full energies agree up to the constant offset.
    #[test]
    fn reduction_energy_identity() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(2, &lib).unwrap();
        let clamped = clamp_output(&net, 9).unwrap();
        let reduced = clamped.reduced().unwrap();
        let mut rng = crate::rng::SplitMix64::new(77);
        for _ in 0..50 {
            let s = SpinState::random(reduced.model.n(), &mut rng);
            let full = reduced.expand(&s).unwrap();
            let lhs = clamped.model().energy(&full).unwrap();
            let rhs = reduced.model.energy(&s).unwrap() + reduced.offset;
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn n10_net_matches_published_statistics() {
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(10, &lib).unwrap();
        assert_eq!(net.spin_count(), 310);
        let density = net.model().graph_density().unwrap();
        assert!(density <= 0.05, "density {density}");
        assert!((density - 0.025).abs() < 0.005, "density {density}");
        let mags = net.distinct_weight_magnitudes();
        assert!(mags.len() <= 4, "distinct magnitudes {mags:?}");
        assert!(mags.iter().all(|&m| m <= 7.0));
    }

    #[test]
    fn density_nonincreasing_in_n() {
        let lib = GateLibrary::standard().unwrap();
        let mut last = f64::INFINITY;
        for n in [2, 3, 4, 6, 8, 10] {
            let d = build_multiplier(n, &lib)
                .unwrap()
                .model()
                .graph_density()
                .unwrap();
            assert!(d <= last + 1e-12, "density rose at n = {n}");
            last = d;
        }
    }

    #[test]
    fn pbit_counts() {
        let lib = GateLibrary::standard().unwrap();
        assert_eq!(pbit_count(10, Formulation::Dense, &lib).unwrap(), 18);
        assert_eq!(pbit_count(10, Formulation::Invertible, &lib).unwrap(), 310);
        for n in 2..=8 {
            let dense = pbit_count(n, Formulation::Dense, &lib).unwrap();
            let inv = pbit_count(n, Formulation::Invertible, &lib).unwrap();
            assert!(inv > dense, "n = {n}: {inv} <= {dense}");
        }
        assert!(pbit_count(1, Formulation::Dense, &lib).is_err());
    }

    #[test]
    fn every_coupling_pair_is_bound_once() {
        // apply_gate would error otherwise; assert the invariant directly
        // for a mid-sized net by recounting.
        let lib = GateLibrary::standard().unwrap();
        let net = build_multiplier(4, &lib).unwrap();
        let mut expected = 0;
        for b in net.gates() {
            expected += match b.gate {
                GateName::And => lib.and_gate.couplings.len(),
                GateName::FullAdder => lib.full_adder.couplings.len(),
            };
        }
        assert_eq!(net.model().edge_count(), expected);
    }
}
