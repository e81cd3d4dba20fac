//! Arbitrary-connectivity single-excitation Hamiltonians: grids built as
//! Kronecker sums, loop phases and gauge fixing, detuning consistency, and
//! the layer reduction of rooted distance-regular graphs.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral::TridiagonalHamiltonian;

/// Tolerance on loop phases, loop detunings and layer uniformity.
pub const LOOP_TOL: f64 = 1e-10;

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI { r - 2.0 * PI } else { r }
}

/// Coupling between `i < j`; the phase is oriented `i -> j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub amplitude: f64,
    pub phase: f64,
}

impl Edge {
    /// Canonical edge from an oriented pair; swapping the ends negates the phase.
    pub fn oriented(a: usize, b: usize, amplitude: f64, phase: f64) -> Self {
        if a < b {
            Edge { i: a, j: b, amplitude, phase }
        } else {
            Edge { i: b, j: a, amplitude, phase: -phase }
        }
    }

    /// Phase seen when hopping `from -> to` along this edge.
    pub fn phase_from(&self, from: usize) -> f64 {
        if from == self.i { self.phase } else { -self.phase }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.i { self.j } else { self.i }
    }
}

/// Simple graph with on-site energies and complex couplings (rad/ns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeGraph {
    onsite: Vec<f64>,
    edges: Vec<Edge>,
}

impl LatticeGraph {
    pub fn new(onsite: Vec<f64>, edges: Vec<Edge>) -> Result<Self> {
        let n = onsite.len();
        let mut map: BTreeMap<(usize, usize), Edge> = BTreeMap::new();
        for e in edges {
            let e = Edge::oriented(e.i, e.j, e.amplitude, e.phase);
            if e.i == e.j {
                return Err(Error::InvalidInput(format!("self-loop on vertex {}", e.i)));
            }
            if e.j >= n {
                return Err(Error::InvalidInput(format!("edge ({}, {}) references a vertex beyond {n}", e.i, e.j)));
            }
            if !e.amplitude.is_finite() || !e.phase.is_finite() {
                return Err(Error::InvalidInput(format!("edge ({}, {}) has a non-finite coupling", e.i, e.j)));
            }
            if map.insert((e.i, e.j), e).is_some() {
                return Err(Error::InvalidInput(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(LatticeGraph { onsite, edges: map.into_values().collect() })
    }

    /// Vertices with zero energy and no edges.
    pub fn empty(n: usize) -> Self {
        LatticeGraph { onsite: vec![0.0; n], edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    /// Edges sorted by `(i, j)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn with_onsite(mut self, onsite: Vec<f64>) -> Result<Self> {
        if onsite.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: onsite.len() });
        }
        self.onsite = onsite;
        Ok(self)
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search_by(|e| (e.i, e.j).cmp(&key)).ok().map(|k| &self.edges[k])
    }

    fn find_edge_mut(&mut self, a: usize, b: usize) -> Option<&mut Edge> {
        let key = (a.min(b), a.max(b));
        match self.edges.binary_search_by(|e| (e.i, e.j).cmp(&key)) {
            Ok(k) => Some(&mut self.edges[k]),
            Err(_) => None,
        }
    }

    /// Sets the phase of edge `a -> b` (oriented).
    pub fn set_phase(&mut self, a: usize, b: usize, phase: f64) -> Result<()> {
        let e = self
            .find_edge_mut(a, b)
            .ok_or_else(|| Error::InvalidInput(format!("edge ({a}, {b}) not found")))?;
        e.phase = if a < b { phase } else { -phase };
        Ok(())
    }

    /// Replaces every coupling amplitude.
    pub fn with_uniform_coupling(mut self, amplitude: f64) -> Self {
        for e in &mut self.edges {
            e.amplitude = amplitude;
        }
        self
    }

    /// Neighbours of every vertex in ascending order, with the edge index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.i].push((e.j, k));
            adj[e.j].push((e.i, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Unitary-equivalent graph under the frame change `U = diag(exp(i theta))`.
    pub fn gauge_transform(&self, theta: &[f64]) -> Result<Self> {
        if theta.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: theta.len() });
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { phase: wrap_phase(e.phase - (theta[e.j] - theta[e.i])), ..*e })
            .collect();
        Ok(LatticeGraph { onsite: self.onsite.clone(), edges })
    }
}

/// Matrix over `|q_i>` with `H[j][i] = |J_ij| exp(i phi_ij)` for the oriented
/// edge `i -> j`.
pub fn graph_hamiltonian(g: &LatticeGraph) -> DMatrix<C64> {
    let n = g.len();
    let mut h = DMatrix::from_diagonal(&DVector::from_iterator(n, g.onsite.iter().map(|d| C64::from(*d))));
    for e in &g.edges {
        let z = C64::from_polar(e.amplitude, e.phase);
        h[(e.j, e.i)] = z;
        h[(e.i, e.j)] = z.conj();
    }
    h
}

/// `HL (x) I + I (x) HM`, row-major (`l` outer, `m` inner).
pub fn kron_sum(hl: &DMatrix<C64>, hm: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    linalg::check_hermitian(hl)?;
    linalg::check_hermitian(hm)?;
    let il = DMatrix::identity(hl.nrows(), hl.nrows());
    let im = DMatrix::identity(hm.nrows(), hm.nrows());
    Ok(linalg::kron(hl, &im) + linalg::kron(&il, hm))
}

/// `L x M` grid with unit couplings, vertex `l * M + m`.
pub fn grid_graph(rows: usize, cols: usize) -> Result<LatticeGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("grid dimensions must be at least 1".into()));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for l in 0..rows {
        for m in 0..cols {
            let v = l * cols + m;
            if m + 1 < cols {
                edges.push(Edge { i: v, j: v + 1, amplitude: 1.0, phase: 0.0 });
            }
            if l + 1 < rows {
                edges.push(Edge { i: v, j: v + cols, amplitude: 1.0, phase: 0.0 });
            }
        }
    }
    LatticeGraph::new(vec![0.0; rows * cols], edges)
}

/// Grid whose columns follow `column_chain` (length `L`) and whose rows
/// follow `row_chain` (length `M`); its Hamiltonian is their Kronecker sum.
pub fn grid_from_chains(column_chain: &TridiagonalHamiltonian, row_chain: &TridiagonalHamiltonian) -> Result<LatticeGraph> {
    let (rows, cols) = (column_chain.len(), row_chain.len());
    let mut g = grid_graph(rows, cols)?;
    let mut onsite = Vec::with_capacity(rows * cols);
    for l in 0..rows {
        for m in 0..cols {
            onsite.push(column_chain.onsite()[l] + row_chain.onsite()[m]);
        }
    }
    g.onsite = onsite;
    for e in &mut g.edges {
        let (l, m) = (e.i / cols, e.i % cols);
        e.amplitude = if e.j == e.i + 1 && e.j / cols == l {
            row_chain.couplings()[m]
        } else {
            column_chain.couplings()[l]
        };
    }
    Ok(g)
}

/// Chain `0 - 1 - ... - n-1` as a graph.
pub fn chain_graph(h: &TridiagonalHamiltonian) -> LatticeGraph {
    let edges = h
        .couplings()
        .iter()
        .enumerate()
        .map(|(k, j)| Edge { i: k, j: k + 1, amplitude: *j, phase: 0.0 })
        .collect();
    LatticeGraph { onsite: h.onsite().to_vec(), edges }
}

/// Independent cycle closed by a chord of the BFS spanning forest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    /// Closed walk `v_0 -> v_1 -> ... -> v_k -> v_0`.
    pub vertices: Vec<usize>,
    /// Oriented sum along the walk, wrapped to `(-pi, pi]`.
    pub sum: f64,
}

struct SpanningForest {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    chords: Vec<usize>,
}

/// BFS from the lowest-id vertex of each component, neighbours ascending.
fn spanning_forest(g: &LatticeGraph) -> SpanningForest {
    let n = g.len();
    let adj = g.adjacency();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree_edge = vec![false; g.edges.len()];
    for start in 0..n {
        if depth[start] != usize::MAX {
            continue;
        }
        depth[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(u, k) in &adj[v] {
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    parent[u] = Some((v, k));
                    tree_edge[k] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    // edges are stored sorted by (min, max), so chords come out in that order
    let chords = (0..g.edges.len()).filter(|k| !tree_edge[*k]).collect();
    SpanningForest { parent, depth, chords }
}

impl SpanningForest {
    /// Tree path `a -> ... -> b` as vertex list.
    fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut up = vec![x];
        let mut down = vec![y];
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].unwrap().0;
            up.push(x);
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].unwrap().0;
            down.push(y);
        }
        while x != y {
            x = self.parent[x].unwrap().0;
            y = self.parent[y].unwrap().0;
            up.push(x);
            down.push(y);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        up
    }

    /// Cycle closed by `chord`, walked as tree path `i -> j` then chord `j -> i`.
    fn cycle(&self, g: &LatticeGraph, chord: usize) -> Vec<usize> {
        let e = g.edges[chord];
        self.path(e.i, e.j)
    }
}

fn walk_sum(g: &LatticeGraph, walk: &[usize], value: impl Fn(&Edge, usize) -> f64) -> f64 {
    let mut total = 0.0;
    for k in 0..walk.len() {
        let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
        let e = g.find_edge(a, b).expect("walk follows graph edges");
        total += value(e, a);
    }
    total
}

/// Gauge-invariant phase sums around a deterministic cycle basis.
pub fn cycle_phase_sums(g: &LatticeGraph) -> Vec<Cycle> {
    let forest = spanning_forest(g);
    forest
        .chords
        .iter()
        .map(|&k| {
            let vertices = forest.cycle(g, k);
            let sum = wrap_phase(walk_sum(g, &vertices, |e, from| e.phase_from(from)));
            Cycle { vertices, sum }
        })
        .collect()
}

/// Removes every edge phase by a diagonal frame change. Fails when some loop
/// carries a nonzero flux.
pub fn gauge_fix(g: &LatticeGraph) -> Result<(LatticeGraph, Vec<f64>)> {
    for c in cycle_phase_sums(g) {
        if c.sum.abs() > LOOP_TOL {
            return Err(Error::GaugeFlux { cycle: c.vertices, flux: c.sum });
        }
    }
    let forest = spanning_forest(g);
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (forest.depth[v], v));
    let mut theta = vec![0.0; g.len()];
    for v in order {
        if let Some((p, k)) = forest.parent[v] {
            theta[v] = theta[p] + g.edges[k].phase_from(p);
        }
    }
    let mut fixed = g.gauge_transform(&theta)?;
    for e in &mut fixed.edges {
        e.phase = 0.0;
    }
    Ok((fixed, theta))
}

/// Oriented drive detunings `delta_ij` with `Delta_i - Delta_j = delta_ij`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningAssignment {
    values: BTreeMap<(usize, usize), f64>,
}

impl DetuningAssignment {
    pub fn new() -> Self {
        DetuningAssignment { values: BTreeMap::new() }
    }

    /// Records `delta_{from, to}`; the reverse orientation reads `-delta`.
    pub fn set(&mut self, from: usize, to: usize, delta: f64) {
        if from < to {
            self.values.insert((from, to), delta);
        } else {
            self.values.insert((to, from), -delta);
        }
    }

    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        if from < to {
            self.values.get(&(from, to)).copied()
        } else {
            self.values.get(&(to, from)).map(|d| -d)
        }
    }
}

impl Default for DetuningAssignment {
    fn default() -> Self {
        Self::new()
    }
}

/// On-site energies consistent with the edge detunings, zero at `reference`.
/// Missing detunings count as zero.
pub fn onsite_from_detunings(g: &LatticeGraph, delta: &DetuningAssignment, reference: usize) -> Result<Vec<f64>> {
    let n = g.len();
    if reference >= n {
        return Err(Error::InvalidInput(format!("reference vertex {reference} out of range")));
    }
    let adj = g.adjacency();
    let mut onsite = vec![f64::NAN; n];
    onsite[reference] = 0.0;
    let mut queue = VecDeque::from([reference]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in &adj[v] {
            if onsite[u].is_nan() {
                onsite[u] = onsite[v] - delta.get(v, u).unwrap_or(0.0);
                queue.push_back(u);
            }
        }
    }
    if let Some(vertex) = onsite.iter().position(|x| x.is_nan()) {
        return Err(Error::Disconnected { vertex });
    }
    let forest = spanning_forest(g);
    for &k in &forest.chords {
        let walk = forest.cycle(g, k);
        let residual = walk_sum(g, &walk, |e, from| delta.get(from, e.other(from)).unwrap_or(0.0));
        if residual.abs() > LOOP_TOL {
            return Err(Error::InconsistentLoop { cycle: walk, residual });
        }
    }
    Ok(onsite)
}

/// Distance layers of a rooted graph with the uniform degrees and parameters
/// that make its symmetric layer states close under the Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerPartition {
    pub root: usize,
    /// Vertices of each layer, ascending.
    pub layers: Vec<Vec<usize>>,
    /// Neighbours of each layer vertex in the next layer (`L_d`).
    pub forward_degree: Vec<usize>,
    /// Neighbours within the layer (`L'_d`).
    pub intra_degree: Vec<usize>,
    /// Neighbours in the previous layer.
    pub back_degree: Vec<usize>,
    /// Inter-layer coupling `J_d`, one per consecutive pair.
    pub coupling: Vec<f64>,
    /// Intra-layer coupling `J'_d` (zero when the layer has no internal edges).
    pub intra_coupling: Vec<f64>,
    /// Layer energy `Delta_d`.
    pub onsite: Vec<f64>,
}

impl LayerPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Effective chain `Delta_d + J'_d L'_d`, `J_d L_d sqrt(K_d / K_{d+1})`.
    pub fn effective_chain(&self) -> Result<TridiagonalHamiltonian> {
        let k = self.sizes();
        let onsite = (0..k.len()).map(|d| self.onsite[d] + self.intra_coupling[d] * self.intra_degree[d] as f64).collect();
        let couplings = (0..k.len() - 1)
            .map(|d| self.coupling[d] * self.forward_degree[d] as f64 * (k[d] as f64 / k[d + 1] as f64).sqrt())
            .collect();
        TridiagonalHamiltonian::new(onsite, couplings)
    }

    /// Maps effective-chain amplitudes to the full graph: `c_d / sqrt(K_d)`
    /// on every vertex of layer `d`.
    pub fn lift(&self, chain: &DVector<C64>) -> Result<DVector<C64>> {
        if chain.len() != self.layers.len() {
            return Err(Error::LengthMismatch { expected: self.layers.len(), found: chain.len() });
        }
        let mut out = DVector::zeros(self.vertex_count());
        for (d, layer) in self.layers.iter().enumerate() {
            let a = chain[d] / (layer.len() as f64).sqrt();
            for &v in layer {
                out[v] = a;
            }
        }
        Ok(out)
    }

    /// Per-layer sums of vertex populations.
    pub fn layer_populations(&self, populations: &[f64]) -> Vec<f64> {
        self.layers.iter().map(|l| l.iter().map(|&v| populations[v]).sum()).collect()
    }

    /// Graph with this layer structure whose reduction is `chain`: the
    /// inverse of [`layer_reduce`] for graphs without intra-layer edges.
    pub fn realize(&self, template: &LatticeGraph, chain: &TridiagonalHamiltonian) -> Result<LatticeGraph> {
        if chain.len() != self.layers.len() {
            return Err(Error::LengthMismatch { expected: self.layers.len(), found: chain.len() });
        }
        if self.intra_degree.iter().any(|&l| l > 0) {
            return Err(Error::InvalidInput("realization needs layers without internal edges".into()));
        }
        let k = self.sizes();
        let mut layer_of = vec![0; template.len()];
        for (d, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                layer_of[v] = d;
            }
        }
        let onsite = (0..template.len()).map(|v| chain.onsite()[layer_of[v]]).collect();
        let edges = template
            .edges
            .iter()
            .map(|e| {
                let d = layer_of[e.i].min(layer_of[e.j]);
                let scale = self.forward_degree[d] as f64 * (k[d] as f64 / k[d + 1] as f64).sqrt();
                Edge { amplitude: chain.couplings()[d] / scale, phase: 0.0, ..*e }
            })
            .collect();
        LatticeGraph::new(onsite, edges)
    }
}

fn uniform_value(values: &[f64], layer: usize, what: &str) -> Result<f64> {
    let Some(&first) = values.first() else {
        return Ok(0.0);
    };
    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    for &v in values {
        if (v - first).abs() > LOOP_TOL * scale {
            return Err(Error::NonUniformLayer { layer, detail: format!("{what} varies ({first} vs {v})") });
        }
    }
    Ok(first)
}

/// Reduces a rooted distance-regular graph to its effective chain.
pub fn layer_reduce(g: &LatticeGraph, root: usize) -> Result<(TridiagonalHamiltonian, LayerPartition)> {
    let n = g.len();
    if root >= n {
        return Err(Error::InvalidInput(format!("root {root} out of range")));
    }
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if let Some(vertex) = dist.iter().position(|d| *d == usize::MAX) {
        return Err(Error::Disconnected { vertex });
    }
    let depth = dist.iter().max().copied().unwrap_or(0) + 1;
    let mut layers = vec![Vec::new(); depth];
    for v in 0..n {
        layers[dist[v]].push(v);
    }
    let mut forward_degree = vec![0; depth];
    let mut intra_degree = vec![0; depth];
    let mut back_degree = vec![0; depth];
    let mut coupling = vec![0.0; depth - 1];
    let mut intra_coupling = vec![0.0; depth];
    let mut onsite = vec![0.0; depth];
    for d in 0..depth {
        let mut counts: Option<(usize, usize, usize)> = None;
        let (mut fwd, mut intra) = (Vec::new(), Vec::new());
        for &v in &layers[d] {
            let (mut f, mut s, mut b) = (0, 0, 0);
            for &(u, k) in &adj[v] {
                let e = &g.edges[k];
                if wrap_phase(e.phase).abs() > LOOP_TOL {
                    return Err(Error::NonUniformLayer { layer: d, detail: format!("edge ({}, {}) carries a phase", e.i, e.j) });
                }
                match dist[u] as isize - d as isize {
                    1 => {
                        f += 1;
                        fwd.push(e.amplitude);
                    }
                    0 => {
                        s += 1;
                        intra.push(e.amplitude);
                    }
                    _ => b += 1,
                }
            }
            match counts {
                None => counts = Some((f, s, b)),
                Some(c) if c != (f, s, b) => {
                    return Err(Error::NotDistanceRegular {
                        layer: d,
                        detail: format!(
                            "vertex {v} has (forward, intra, back) degrees ({f}, {s}, {b}), expected {:?}",
                            c
                        ),
                    });
                }
                _ => {}
            }
        }
        let (f, s, b) = counts.expect("layers are non-empty");
        forward_degree[d] = f;
        intra_degree[d] = s;
        back_degree[d] = b;
        if d + 1 < depth {
            coupling[d] = uniform_value(&fwd, d, "inter-layer coupling")?;
        }
        intra_coupling[d] = uniform_value(&intra, d, "intra-layer coupling")?;
        let energies: Vec<f64> = layers[d].iter().map(|&v| g.onsite[v]).collect();
        onsite[d] = uniform_value(&energies, d, "on-site energy")?;
    }
    let partition = LayerPartition { root, layers, forward_degree, intra_degree, back_degree, coupling, intra_coupling, onsite };
    Ok((partition.effective_chain()?, partition))
}

/// 28-site heavy-hex patch: three hexagons around a shared centre vertex with
/// one extra site on every hexagon edge. Vertex ids follow the distance from
/// the centre (id 0), giving layer sizes 1, 3, 3, 6, 6, 6, 3.
pub fn heavy_hex_graph() -> LatticeGraph {
    // hexagon h is bounded by centre neighbours h and (h + 1) % 3; branch s of
    // neighbour a runs into hexagon a (s = 0) or hexagon (a + 2) % 3 (s = 1)
    let mut edges = Vec::with_capacity(30);
    let mut link = |a: usize, b: usize| edges.push(Edge { i: a.min(b), j: a.max(b), amplitude: 1.0, phase: 0.0 });
    for a in 0..3 {
        link(0, 1 + a);
        link(1 + a, 4 + a);
        for s in 0..2 {
            let branch = 2 * a + s;
            let hexagon = if s == 0 { a } else { (a + 2) % 3 };
            link(4 + a, 7 + branch);
            link(7 + branch, 13 + branch);
            link(13 + branch, 19 + branch);
            link(19 + branch, 25 + hexagon);
        }
    }
    LatticeGraph::new(vec![0.0; 28], edges).expect("heavy-hex patch is a simple graph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_unitary, QuantumState};

    fn square(phase: f64) -> LatticeGraph {
        let mut g = grid_graph(2, 2).unwrap();
        g.set_phase(2, 3, phase).unwrap();
        g
    }

    #[test]
    fn grid_counts() {
        let g = grid_graph(3, 2).unwrap();
        assert_eq!(g.edges().len(), 7);
        let p = grid_graph(1, 5).unwrap();
        assert_eq!(p.edges().len(), 4);
        assert!(p.edges().iter().all(|e| e.j == e.i + 1));
        assert_eq!(cycle_phase_sums(&grid_graph(4, 3).unwrap()).len(), 6);
        assert!(cycle_phase_sums(&p).is_empty());
    }

    #[test]
    fn edge_orientation_flip_negates_phase() {
        let g = LatticeGraph::new(vec![0.0; 2], vec![Edge::oriented(1, 0, 1.0, 0.4)]).unwrap();
        assert_eq!(g.edges()[0].phase, -0.4);
        let h = graph_hamiltonian(&g);
        assert!((h[(0, 1)] - C64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!(LatticeGraph::new(vec![0.0; 2], vec![Edge::oriented(0, 0, 1.0, 0.0)]).is_err());
        let dup = vec![Edge::oriented(0, 1, 1.0, 0.0), Edge::oriented(1, 0, 1.0, 0.0)];
        assert!(LatticeGraph::new(vec![0.0; 2], dup).is_err());
    }

    #[test]
    fn path_matches_three_qubit_form() {
        let j = 0.8;
        let g = LatticeGraph::new(vec![-2.0 * j, 0.0, 2.0 * j], vec![Edge::oriented(0, 1, j, 0.0), Edge::oriented(1, 2, j, 0.0)]).unwrap();
        let h = graph_hamiltonian(&g);
        let expect = crate::dynamics::three_qubit_hamiltonian(C64::from(j), -2.0 * j, 2.0 * j);
        assert!(linalg::max_abs(&(h - expect)) < 1e-15);
        let empty = graph_hamiltonian(&LatticeGraph::empty(3).with_onsite(vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!(empty[(1, 1)], C64::from(2.0));
        assert_eq!(empty[(0, 1)], C64::from(0.0));
    }

    #[test]
    fn single_flux_on_square() {
        let sums = cycle_phase_sums(&square(0.7));
        assert_eq!(sums.len(), 1);
        assert!((sums[0].sum.abs() - 0.7).abs() < 1e-15);
        assert!(gauge_fix(&square(2.0 * PI)).is_ok());
        match gauge_fix(&square(PI)) {
            Err(Error::GaugeFlux { flux, .. }) => assert!((flux.abs() - PI).abs() < 1e-12),
            other => panic!("expected flux error, got {other:?}"),
        }
    }

    #[test]
    fn gauge_fix_removes_tree_phases() {
        let mut g = grid_graph(2, 3).unwrap();
        let theta = [0.0, 0.3, -1.1, 2.0, 0.5, 0.9];
        g = g.gauge_transform(&theta).unwrap();
        let (fixed, frame) = gauge_fix(&g).unwrap();
        assert!(fixed.edges().iter().all(|e| e.phase == 0.0));
        let back = g.gauge_transform(&frame).unwrap();
        assert!(back.edges().iter().all(|e| e.phase.abs() < 1e-12));
        let (zero_fixed, zero_frame) = gauge_fix(&grid_graph(2, 2).unwrap()).unwrap();
        assert!(zero_frame.iter().all(|t| *t == 0.0));
        assert_eq!(zero_fixed, grid_graph(2, 2).unwrap());
    }

    #[test]
    fn pi_flux_equals_negated_coupling() {
        let h_phase = graph_hamiltonian(&square(PI));
        let mut h_neg = graph_hamiltonian(&grid_graph(2, 2).unwrap());
        h_neg[(3, 2)] = -h_neg[(3, 2)];
        h_neg[(2, 3)] = -h_neg[(2, 3)];
        assert!(linalg::max_abs(&(h_phase - h_neg)) < 1e-15);
    }

    #[test]
    fn detuning_examples() {
        let j = 1.0;
        let chain = LatticeGraph::new(vec![0.0; 3], vec![Edge::oriented(0, 1, j, 0.0), Edge::oriented(1, 2, j, 0.0)]).unwrap();
        let mut d = DetuningAssignment::new();
        d.set(0, 1, 2.0 * j);
        d.set(1, 2, -2.0 * j);
        assert_eq!(onsite_from_detunings(&chain, &d, 1).unwrap(), vec![2.0, 0.0, 2.0]);
        assert_eq!(onsite_from_detunings(&chain, &DetuningAssignment::new(), 0).unwrap(), vec![0.0; 3]);
        let sq = grid_graph(2, 2).unwrap();
        let mut bad = DetuningAssignment::new();
        bad.set(0, 1, 0.25);
        match onsite_from_detunings(&sq, &bad, 0) {
            Err(Error::InconsistentLoop { residual, .. }) => assert!((residual.abs() - 0.25).abs() < 1e-15),
            other => panic!("expected loop error, got {other:?}"),
        }
    }

    #[test]
    fn star_reduction() {
        let edges = (1..4).map(|k| Edge::oriented(0, k, 0.5, 0.0)).collect();
        let g = LatticeGraph::new(vec![0.0; 4], edges).unwrap();
        let (chain, part) = layer_reduce(&g, 0).unwrap();
        assert_eq!(part.sizes(), vec![1, 3]);
        assert!((chain.couplings()[0] - 3f64.sqrt() * 0.5).abs() < 1e-15);
    }

    #[test]
    fn path_reduces_to_itself() {
        let h = TridiagonalHamiltonian::new(vec![0.1, -0.2, 0.3, 0.0], vec![1.0, 0.7, 1.3]).unwrap();
        let (chain, _) = layer_reduce(&chain_graph(&h), 0).unwrap();
        assert_eq!(chain, h);
    }

    #[test]
    fn heavy_hex_profile() {
        let g = heavy_hex_graph();
        assert_eq!(g.len(), 28);
        assert_eq!(g.edges().len(), 30);
        let (chain, part) = layer_reduce(&g, 0).unwrap();
        assert_eq!(part.sizes(), vec![1, 3, 3, 6, 6, 6, 3]);
        assert_eq!(&part.forward_degree[..6], &[3, 1, 2, 1, 1, 1]);
        assert!(part.intra_degree.iter().all(|&l| l == 0));
        assert_eq!(chain.len(), 7);
        assert_eq!(cycle_phase_sums(&g).len(), 3);
    }

    #[test]
    fn reduction_rejects_irregular_and_nonuniform() {
        // root 0 with children 1, 2; only child 1 continues
        let edges = vec![Edge::oriented(0, 1, 1.0, 0.0), Edge::oriented(0, 2, 1.0, 0.0), Edge::oriented(1, 3, 1.0, 0.0)];
        let g = LatticeGraph::new(vec![0.0; 4], edges).unwrap();
        assert!(matches!(layer_reduce(&g, 0), Err(Error::NotDistanceRegular { layer: 1, .. })));
        let edges = (1..4).map(|k| Edge::oriented(0, k, k as f64, 0.0)).collect();
        let g = LatticeGraph::new(vec![0.0; 4], edges).unwrap();
        assert!(matches!(layer_reduce(&g, 0), Err(Error::NonUniformLayer { layer: 0, .. })));
    }

    #[test]
    fn heavy_hex_reduction_matches_full_dynamics() {
        let template = heavy_hex_graph();
        let (_, part) = layer_reduce(&template, 0).unwrap();
        let chain = TridiagonalHamiltonian::new(
            vec![0.01, -0.02, 0.0, 0.03, 0.01, -0.01, 0.02],
            vec![0.05, 0.04, 0.06, 0.03, 0.05, 0.04],
        )
        .unwrap();
        let g = part.realize(&template, &chain).unwrap();
        let (reduced, _) = layer_reduce(&g, 0).unwrap();
        for (a, b) in reduced.couplings().iter().zip(chain.couplings()) {
            assert!((a - b).abs() < 1e-15);
        }
        let times = [0.0, 13.0, 40.0, 77.0];
        let (full, _) = evolve_unitary(&graph_hamiltonian(&g), &QuantumState::localized(28, 0).unwrap(), &times).unwrap();
        let (eff, _) = evolve_unitary(&chain.to_complex(), &QuantumState::localized(7, 0).unwrap(), &times).unwrap();
        for (pf, pe) in full.populations.iter().zip(&eff.populations) {
            for (a, b) in part.layer_populations(pf).iter().zip(pe) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
