//! Weighted graphs, Dirichlet domains and functions supported in a domain.
//!
//! A [`WeightedGraph`] is a finite simple undirected graph with a positive
//! measure on every vertex and a positive weight on every edge. Vertices are
//! identified by string ids and stored in sorted id order, so every index,
//! edge list and reduction below has one canonical order.
//!
//! A [`Domain`] is a vertex subset `Ω` carrying the Dirichlet problem, and a
//! [`DirichletFunction`] stores the values of a function on `Ω` (in the
//! domain's vertex order); it is implicitly zero everywhere else.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};

/// An undirected edge `{u, v}` with `u < v` (graph vertex indices).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A sorted, duplicate-free set of graph vertex indices.
///
/// Sets are ordered by cardinality first and then lexicographically on the
/// sorted indices, which is the order used when reporting tied cuts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_strict_subset(&self, other: &VertexSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Incremental construction of a [`WeightedGraph`]; validation happens in
/// [`GraphBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<(String, f64)>,
    edges: Vec<(String, String, f64)>,
}

impl GraphBuilder {
    pub fn vertex(mut self, id: impl Into<String>, mu: f64) -> Self {
        self.vertices.push((id.into(), mu));
        self
    }

    pub fn edge(mut self, u: impl Into<String>, v: impl Into<String>, w: f64) -> Self {
        self.edges.push((u.into(), v.into(), w));
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        let mut vertices = self.vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in vertices.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateVertex(pair[0].0.clone()));
            }
        }
        for (id, mu) in &vertices {
            if !(mu.is_finite() && *mu > 0.0) {
                return Err(Error::NonPositiveMeasure { id: id.clone(), mu: *mu });
            }
        }
        let index: HashMap<String, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), i))
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut seen = HashSet::new();
        for (a, b, w) in self.edges {
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { u: a, v: b, w });
            }
            let (u, v) = if ia < ib { (ia, ib) } else { (ib, ia) };
            if !seen.insert((u, v)) {
                return Err(Error::ParallelEdge(a, b));
            }
            edges.push(Edge { u, v, w });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for e in &edges {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(y, _)| y);
        }
        let (ids, mu) = vertices.into_iter().unzip();
        Ok(WeightedGraph {
            ids,
            index,
            mu,
            edges,
            adjacency,
        })
    }
}

/// A finite, simple, undirected weighted graph `(V, E, μ, w)`.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mu: Vec<f64>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn mu(&self, v: usize) -> f64 {
        self.mu[v]
    }

    /// Edges in canonical `(u, v)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with the connecting edge weight, sorted by index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Resolves vertex ids into a [`VertexSet`].
    pub fn vertex_set<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet> {
        ids.iter()
            .map(|id| {
                self.index_of(id.as_ref())
                    .ok_or_else(|| Error::UnknownVertex(id.as_ref().to_owned()))
            })
            .collect()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((0..self.len()).collect())
    }

    pub fn set_ids(&self, s: &VertexSet) -> Vec<String> {
        s.iter().map(|v| self.ids[v].clone()).collect()
    }
}

/// Total weight `|∂s|_w` of the edges with exactly one endpoint in `s`.
pub fn boundary_weight(g: &WeightedGraph, s: &VertexSet) -> f64 {
    let mut inside = vec![false; g.len()];
    for v in s.iter().filter(|&v| v < g.len()) {
        inside[v] = true;
    }
    g.edges()
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| e.w)
        .sum()
}

/// A Dirichlet domain `Ω ⊆ V` together with its graph.
///
/// Positions `0..len()` enumerate `Ω` in increasing vertex index, which is
/// the layout of every [`DirichletFunction`] on this domain.
#[derive(Clone, Debug)]
pub struct Domain {
    graph: Arc<WeightedGraph>,
    omega: VertexSet,
    position: Vec<Option<usize>>,
    inner_edges: Vec<(usize, usize, f64)>,
    outer_edges: Vec<(usize, f64)>,
}

impl Domain {
    /// Builds a domain. Rejects an empty `Ω`, unknown vertices, and domains
    /// with no edge leaving `Ω`. Connectivity is not required here; the
    /// solvers check it with [`is_connected`].
    pub fn new(graph: Arc<WeightedGraph>, omega: VertexSet) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(v) = omega.iter().find(|&v| v >= graph.len()) {
            return Err(Error::UnknownVertex(format!("#{v}")));
        }
        let mut position = vec![None; graph.len()];
        for (k, v) in omega.iter().enumerate() {
            position[v] = Some(k);
        }
        let mut inner_edges = Vec::new();
        let mut outer_edges = Vec::new();
        for e in graph.edges() {
            match (position[e.u], position[e.v]) {
                (Some(a), Some(b)) => inner_edges.push((a, b, e.w)),
                (Some(a), None) | (None, Some(a)) => outer_edges.push((a, e.w)),
                (None, None) => {}
            }
        }
        if outer_edges.is_empty() {
            return Err(Error::NoBoundary);
        }
        Ok(Domain {
            graph,
            omega,
            position,
            inner_edges,
            outer_edges,
        })
    }

    pub fn from_ids<S: AsRef<str>>(graph: Arc<WeightedGraph>, omega: &[S]) -> Result<Self> {
        let set = graph.vertex_set(omega)?;
        Domain::new(graph, set)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<WeightedGraph> {
        Arc::clone(&self.graph)
    }

    pub fn omega(&self) -> &VertexSet {
        &self.omega
    }

    /// Number of vertices in `Ω`.
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Graph vertex at domain position `k`.
    pub fn vertex(&self, k: usize) -> usize {
        self.omega.as_slice()[k]
    }

    /// Domain position of graph vertex `v`, if `v ∈ Ω`.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.position.get(v).copied().flatten()
    }

    pub fn id(&self, k: usize) -> &str {
        self.graph.id(self.vertex(k))
    }

    pub fn omega_ids(&self) -> Vec<String> {
        self.graph.set_ids(&self.omega)
    }

    /// Measure of the vertex at domain position `k`.
    pub fn mu(&self, k: usize) -> f64 {
        self.graph.mu(self.vertex(k))
    }

    pub fn subset<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet> {
        let s = self.graph.vertex_set(ids)?;
        if !s.is_subset(&self.omega) {
            return Err(Error::SubsetNotInOmega);
        }
        Ok(s)
    }

    /// Edges with both endpoints in `Ω`, as `(position, position, w)`.
    pub fn inner_edges(&self) -> &[(usize, usize, f64)] {
        &self.inner_edges
    }

    /// Edges leaving `Ω`, as `(position of the inner endpoint, w)`.
    pub fn outer_edges(&self) -> &[(usize, f64)] {
        &self.outer_edges
    }

    /// Neighbors of the vertex at position `k`: `Some(position)` for
    /// neighbors in `Ω`, `None` for boundary neighbors, where functions vanish.
    pub fn local_neighbors(&self, k: usize) -> impl Iterator<Item = (Option<usize>, f64)> + '_ {
        self.graph
            .neighbors(self.vertex(k))
            .iter()
            .map(move |&(y, w)| (self.position[y], w))
    }

    /// Total weight of the edges leaving `Ω` from position `k`.
    pub fn outgoing_weight(&self, k: usize) -> f64 {
        self.local_neighbors(k)
            .filter(|(y, _)| y.is_none())
            .map(|(_, w)| w)
            .sum()
    }

    /// The vertex set formed by the domain positions in `positions`.
    pub fn set_from_positions(&self, positions: impl IntoIterator<Item = usize>) -> VertexSet {
        positions.into_iter().map(|k| self.vertex(k)).collect()
    }

    pub fn check_function(&self, u: &DirichletFunction) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: u.len(),
            });
        }
        Ok(())
    }
}

/// `|s|_μ`, summed in vertex order.
pub fn volume(d: &Domain, s: &VertexSet) -> Result<f64> {
    if !s.is_subset(d.omega()) {
        return Err(Error::SubsetNotInOmega);
    }
    Ok(s.iter().map(|v| d.graph().mu(v)).sum())
}

/// Whether every pair of vertices of `Ω` is joined by a path inside `Ω`.
pub fn is_connected(d: &Domain) -> bool {
    let mut seen = vec![false; d.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(k) = queue.pop_front() {
        for (y, _) in d.local_neighbors(k) {
            if let Some(j) = y {
                if !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    queue.push_back(j);
                }
            }
        }
    }
    reached == d.len()
}

/// The μ-weighted norm `(Σ_{x∈Ω} μ_x |u(x)|^p)^{1/p}`.
pub fn p_norm(d: &Domain, u: &DirichletFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    d.check_function(u)?;
    Ok(p_norm_pow(d, u.values(), p).powf(1.0 / p))
}

/// `Σ μ_x |u_x|^p` without the final root.
pub(crate) fn p_norm_pow(d: &Domain, u: &[f64], p: f64) -> f64 {
    u.iter()
        .enumerate()
        .map(|(k, x)| d.mu(k) * x.abs().powf(p))
        .sum()
}

/// A real function on `V` vanishing outside `Ω`, stored by domain position.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletFunction {
    values: Vec<f64>,
}

impl DirichletFunction {
    pub fn new(values: Vec<f64>) -> Self {
        DirichletFunction { values }
    }

    pub fn zeros(len: usize) -> Self {
        DirichletFunction::new(vec![0.0; len])
    }

    pub fn constant(len: usize, c: f64) -> Self {
        DirichletFunction::new(vec![c; len])
    }

    /// The characteristic function of `s ⊆ Ω`.
    pub fn indicator(d: &Domain, s: &VertexSet) -> Result<Self> {
        if !s.is_subset(d.omega()) {
            return Err(Error::SubsetNotInOmega);
        }
        Ok(DirichletFunction::new(
            (0..d.len())
                .map(|k| if s.contains(d.vertex(k)) { 1.0 } else { 0.0 })
                .collect(),
        ))
    }

    /// Looks up values by vertex id; ids missing from `values` are zero.
    pub fn from_ids<S: AsRef<str>>(d: &Domain, values: &[(S, f64)]) -> Result<Self> {
        let mut out = vec![0.0; d.len()];
        for (id, x) in values {
            let v = d
                .graph()
                .index_of(id.as_ref())
                .ok_or_else(|| Error::UnknownVertex(id.as_ref().to_owned()))?;
            let k = d.position(v).ok_or(Error::SubsetNotInOmega)?;
            out[k] = *x;
        }
        Ok(DirichletFunction::new(out))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        DirichletFunction::new(self.values.iter().map(|x| c * x).collect())
    }

    pub fn abs(&self) -> Self {
        DirichletFunction::new(self.values.iter().map(|x| x.abs()).collect())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_x |u(x) − v(x)|`.
    pub fn sup_distance(&self, other: &DirichletFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
