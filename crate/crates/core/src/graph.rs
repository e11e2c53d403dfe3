//! Multilayer graph model, edge-list ingestion, degree normalization, convex
//! layer aggregation and Laplacian construction.
//!
//! Every layer is an undirected weighted graph over a shared node set. Layer
//! weight matrices are stored as [`SymMatrix`], a compressed sorted coordinate
//! list with both triangles materialized so rows can be walked directly.

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra::DMatrix;

use crate::assignment::ClusterAssignment;
use crate::error::{Error, Result};

/// Sparse symmetric matrix with zero diagonal and strictly positive stored
/// entries. Rows are sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Builds the matrix from off-diagonal entries, each undirected pair given
    /// once in either orientation. Pairs must be distinct and values positive.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in pairs {
            debug_assert!(u != v && u < n && v < n);
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut fill = counts;
        let mut cols = vec![0; row_ptr[n]];
        let mut vals = vec![0.0; row_ptr[n]];
        for &(u, v, w) in pairs {
            cols[fill[u]] = v;
            vals[fill[u]] = w;
            fill[u] += 1;
            cols[fill[v]] = u;
            vals[fill[v]] = w;
            fill[v] += 1;
        }
        for r in 0..n {
            let (s, e) = (row_ptr[r], row_ptr[r + 1]);
            let mut row: Vec<(usize, f64)> =
                cols[s..e].iter().copied().zip(vals[s..e].iter().copied()).collect();
            row.sort_by_key(|&(c, _)| c);
            for (i, (c, w)) in row.into_iter().enumerate() {
                cols[s + i] = c;
                vals[s + i] = w;
            }
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries (twice the number of edges).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn num_edges(&self) -> usize {
        self.cols.len() / 2
    }

    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_ptr[u], self.row_ptr[u + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row_ptr[u + 1] - self.row_ptr[u]
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        let (s, e) = (self.row_ptr[u], self.row_ptr[u + 1]);
        match self.cols[s..e].binary_search(&v) {
            Ok(i) => self.vals[s + i],
            Err(_) => 0.0,
        }
    }

    /// Edges with `u < v`, in row-major order.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.row(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|u| self.row(u).map(|(_, w)| w).sum()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.vals.iter().sum::<f64>() / 2.0
    }

    /// `y = W x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for u in 0..self.n {
            let (s, e) = (self.row_ptr[u], self.row_ptr[u + 1]);
            let mut acc = 0.0;
            for i in s..e {
                acc += self.vals[i] * x[self.cols[i]];
            }
            y[u] = acc;
        }
    }

    /// `Σ coeffs[i] · mats[i]`, dropping entries that come out as zero.
    pub fn linear_combination(mats: &[&SymMatrix], coeffs: &[f64]) -> SymMatrix {
        assert_eq!(mats.len(), coeffs.len());
        let n = mats.first().map_or(0, |m| m.n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for u in 0..n {
            scratch.clear();
            for (m, &c) in mats.iter().zip(coeffs) {
                if c != 0.0 {
                    scratch.extend(m.row(u).map(|(v, w)| (v, c * w)));
                }
            }
            scratch.sort_by_key(|&(v, _)| v);
            let mut i = 0;
            while i < scratch.len() {
                let v = scratch[i].0;
                let mut acc = 0.0;
                while i < scratch.len() && scratch[i].0 == v {
                    acc += scratch[i].1;
                    i += 1;
                }
                if acc != 0.0 {
                    cols.push(v);
                    vals.push(acc);
                }
            }
            row_ptr.push(cols.len());
        }
        SymMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Principal submatrix on `nodes` (given in increasing order), re-indexed
    /// to `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> SymMatrix {
        let mut local = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            local[u] = i;
        }
        let mut row_ptr = Vec::with_capacity(nodes.len() + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for &u in nodes {
            for (v, w) in self.row(u) {
                if local[v] != usize::MAX {
                    cols.push(local[v]);
                    vals.push(w);
                }
            }
            row_ptr.push(cols.len());
        }
        // rows stay sorted because `nodes` is increasing
        SymMatrix {
            n: nodes.len(),
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            for (v, w) in self.row(u) {
                m[(u, v)] = w;
            }
        }
        m
    }

    fn is_unweighted(&self) -> bool {
        self.vals.iter().all(|&w| w == 1.0)
    }
}

/// Nonnegative layer weight vector on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights(Vec<f64>);

impl LayerWeights {
    /// Normalizes `w` onto the simplex. Entries must be finite and
    /// nonnegative with a positive sum.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("empty layer weight vector".into()));
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "layer weights must be finite and nonnegative: {w:?}"
            )));
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidArgument("layer weights sum to zero".into()));
        }
        Ok(Self(w.into_iter().map(|x| x / sum).collect()))
    }

    pub fn uniform(layers: usize) -> Self {
        Self(vec![1.0 / layers as f64; layers])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ_ℓ w_ℓ x_ℓ`
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// Single weighted graph together with its node strengths; the graph
/// Laplacian `diag(strength) - weights` is applied implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub weights: SymMatrix,
    pub strength: Vec<f64>,
}

/// Graph obtained by convex layer aggregation.
pub type AggregatedGraph = WeightedGraph;

impl WeightedGraph {
    pub fn new(weights: SymMatrix) -> Self {
        let strength = weights.row_sums();
        Self { weights, strength }
    }

    pub fn n(&self) -> usize {
        self.weights.dim()
    }

    /// `y = L x`
    pub fn laplacian_mul(&self, x: &[f64], y: &mut [f64]) {
        self.weights.mul_vec(x, y);
        for ((yi, &xi), &si) in y.iter_mut().zip(x).zip(&self.strength) {
            *yi = si * xi - *yi;
        }
    }

    /// Gershgorin bound on the spectral norm of the Laplacian (equal to its
    /// infinity norm).
    pub fn laplacian_norm_bound(&self) -> f64 {
        2.0 * self.strength.iter().copied().fold(0.0, f64::max)
    }

    pub fn laplacian_dense(&self) -> DMatrix<f64> {
        let mut m = -self.weights.to_dense();
        for (i, &s) in self.strength.iter().enumerate() {
            m[(i, i)] = s;
        }
        m
    }

    /// Connected components over positive-weight edges. Components are listed
    /// by their smallest node, members in increasing order.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for (v, w) in self.weights.row(u) {
                    if w > 0.0 && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.connected_components().len() == 1
    }

    /// Subgraph induced on `nodes` (increasing order).
    pub fn induced(&self, nodes: &[usize]) -> WeightedGraph {
        WeightedGraph::new(self.weights.induced(nodes))
    }
}

/// `L` symmetric weight matrices over a common, lexicographically ordered
/// node set.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilayerGraph {
    node_ids: Vec<String>,
    layers: Vec<SymMatrix>,
}

impl MultilayerGraph {
    /// `node_ids` must be strictly increasing; every layer must have
    /// dimension `node_ids.len()`.
    pub fn new(node_ids: Vec<String>, layers: Vec<SymMatrix>) -> Result<Self> {
        if node_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "node identifiers must be strictly increasing".into(),
            ));
        }
        for l in &layers {
            if l.dim() != node_ids.len() {
                return Err(Error::DimensionMismatch {
                    expected: node_ids.len(),
                    got: l.dim(),
                });
            }
            if l.vals.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(Error::InvalidArgument(
                    "layer entries must be finite and positive".into(),
                ));
            }
        }
        Ok(Self { node_ids, layers })
    }

    /// Builds a graph from `(layer, u, v, weight)` node-index edges; `u != v`
    /// and each undirected edge at most once per layer.
    pub fn from_edges(
        node_ids: Vec<String>,
        num_layers: usize,
        edges: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let n = node_ids.len();
        let mut per_layer: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); num_layers];
        for &(l, u, v, w) in edges {
            if l >= num_layers || u >= n || v >= n || u == v {
                return Err(Error::InvalidArgument(format!(
                    "bad edge ({l}, {u}, {v})"
                )));
            }
            per_layer[l].push((u.min(v), u.max(v), w));
        }
        let mut layers = Vec::with_capacity(num_layers);
        for (l, mut pairs) in per_layer.into_iter().enumerate() {
            pairs.sort_by_key(|&(u, v, _)| (u, v));
            if let Some(d) = pairs.windows(2).find(|p| p[0].0 == p[1].0 && p[0].1 == p[1].1) {
                return Err(Error::DuplicateEdge {
                    line: 0,
                    layer: l,
                    u: node_ids[d[0].0].clone(),
                    v: node_ids[d[0].1].clone(),
                });
            }
            layers.push(SymMatrix::from_pairs(n, &pairs));
        }
        Self::new(node_ids, layers)
    }

    /// Parses the `layer<TAB>u<TAB>v<TAB>weight` edge-list format. Node
    /// indices follow the lexicographic order of the identifiers.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        struct Row<'a> {
            line: usize,
            layer: usize,
            u: &'a str,
            v: &'a str,
            w: f64,
        }
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let layer: usize = fields[0]
                .parse()
                .map_err(|_| err(format!("invalid layer index '{}'", fields[0])))?;
            let w: f64 = fields[3]
                .parse()
                .map_err(|_| err(format!("invalid weight '{}'", fields[3])))?;
            if !w.is_finite() {
                return Err(err(format!("non-finite weight '{}'", fields[3])));
            }
            if w < 0.0 {
                return Err(err(format!("negative weight {w}")));
            }
            if w == 0.0 {
                return Err(err("zero weight; omit absent edges".into()));
            }
            if fields[1] == fields[2] {
                return Err(err(format!("self-loop on node '{}'", fields[1])));
            }
            rows.push(Row {
                line: lineno,
                layer,
                u: fields[1],
                v: fields[2],
                w,
            });
        }
        let ids: BTreeSet<&str> = rows.iter().flat_map(|r| [r.u, r.v]).collect();
        let node_ids: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
        let index: HashMap<&str, usize> =
            ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let num_layers = rows.iter().map(|r| r.layer + 1).max().unwrap_or(0);
        let mut per_layer: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); num_layers];
        let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for r in &rows {
            let (a, b) = (index[r.u], index[r.v]);
            let key = (r.layer, a.min(b), a.max(b));
            if seen.insert(key, r.line).is_some() {
                return Err(Error::DuplicateEdge {
                    line: r.line,
                    layer: r.layer,
                    u: r.u.to_string(),
                    v: r.v.to_string(),
                });
            }
            per_layer[r.layer].push((key.1, key.2, r.w));
        }
        let n = node_ids.len();
        let layers = per_layer
            .iter()
            .map(|pairs| SymMatrix::from_pairs(n, pairs))
            .collect();
        Self::new(node_ids, layers)
    }

    /// Serializes to the edge-list format, one row per undirected edge with
    /// `u < v` in node order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (l, layer) in self.layers.iter().enumerate() {
            for (u, v, w) in layer.upper_entries() {
                out.push_str(&format!(
                    "{l}\t{}\t{}\t{w}\n",
                    self.node_ids[u], self.node_ids[v]
                ));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn layers(&self) -> &[SymMatrix] {
        &self.layers
    }

    pub fn layer(&self, l: usize) -> &SymMatrix {
        &self.layers[l]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.node_ids.binary_search_by(|s| s.as_str().cmp(id)).ok()
    }

    /// A layer is unweighted iff every stored entry equals 1.
    pub fn is_unweighted_layer(&self, l: usize) -> bool {
        self.layers[l].is_unweighted()
    }

    /// Degree normalization `A_uv / sqrt(d_u d_v)` applied to unweighted
    /// layers; weighted layers are returned unchanged.
    pub fn degree_normalize(&self) -> Self {
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                if !layer.is_unweighted() {
                    return layer.clone();
                }
                let deg: Vec<f64> = (0..layer.dim()).map(|u| layer.degree(u) as f64).collect();
                let mut out = layer.clone();
                for u in 0..out.n {
                    for i in out.row_ptr[u]..out.row_ptr[u + 1] {
                        let v = out.cols[i];
                        // any stored edge gives both endpoints degree >= 1
                        out.vals[i] = 1.0 / (deg[u] * deg[v]).sqrt();
                    }
                }
                out
            })
            .collect();
        Self {
            node_ids: self.node_ids.clone(),
            layers,
        }
    }

    /// Convex layer aggregation `W^w = Σ_ℓ w_ℓ W^(ℓ)`.
    pub fn aggregate(&self, w: &LayerWeights) -> Result<AggregatedGraph> {
        if w.len() != self.num_layers() {
            return Err(Error::DimensionMismatch {
                expected: self.num_layers(),
                got: w.len(),
            });
        }
        let mats: Vec<&SymMatrix> = self.layers.iter().collect();
        if mats.is_empty() {
            return Ok(WeightedGraph::new(SymMatrix::zeros(self.n())));
        }
        Ok(WeightedGraph::new(SymMatrix::linear_combination(
            &mats,
            w.as_slice(),
        )))
    }

    /// Per-layer single-layer graph (its Laplacian is `L^(ℓ)`).
    pub fn layer_graph(&self, l: usize) -> WeightedGraph {
        WeightedGraph::new(self.layers[l].clone())
    }

    /// Graph restricted to `nodes` (increasing order) in every layer.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        Self {
            node_ids: nodes.iter().map(|&u| self.node_ids[u].clone()).collect(),
            layers: self.layers.iter().map(|l| l.induced(nodes)).collect(),
        }
    }

    /// Within-cluster graphs indexed `[layer][cluster]`; each has the cluster
    /// members (increasing global index) as its local nodes.
    pub fn within_cluster_graphs(
        &self,
        assignment: &ClusterAssignment,
    ) -> Result<Vec<Vec<WeightedGraph>>> {
        if assignment.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: assignment.n(),
            });
        }
        let members = assignment.members();
        Ok(self
            .layers
            .iter()
            .map(|layer| {
                members
                    .iter()
                    .map(|nodes| WeightedGraph::new(layer.induced(nodes)))
                    .collect()
            })
            .collect())
    }
}

/// Aggregates within-cluster graphs of one cluster across layers.
pub fn aggregate_graphs(graphs: &[&WeightedGraph], w: &LayerWeights) -> WeightedGraph {
    let mats: Vec<&SymMatrix> = graphs.iter().map(|g| &g.weights).collect();
    WeightedGraph::new(SymMatrix::linear_combination(&mats, w.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i:02}")).collect()
    }

    #[test]
    fn parses_two_layers() {
        let g = MultilayerGraph::parse_edge_list("0 a b 1.0\n1\ta\tb\t2.0\n").unwrap();
        assert_eq!(g.num_layers(), 2);
        assert_eq!(g.n(), 2);
        assert_eq!(g.layer(0).get(0, 1), 1.0);
        assert_eq!(g.layer(1).get(0, 1), 2.0);
        assert_eq!(g.layer(1).get(1, 0), 2.0);
    }

    #[test]
    fn node_order_is_lexicographic() {
        let g = MultilayerGraph::parse_edge_list("0\tz\tb\t1\n0\tb\tm\t1\n").unwrap();
        assert_eq!(g.node_ids(), &["b", "m", "z"]);
        assert_eq!(g.node_index("z"), Some(2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("0 a a 1.0\n", 1),
            ("# c\n0 a b\n", 2),
            ("0 a b x\n", 1),
            ("0 a b -1\n", 1),
            ("0 a b 0\n", 1),
            ("q a b 1\n", 1),
        ];
        for (text, line) in cases {
            match MultilayerGraph::parse_edge_list(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            MultilayerGraph::parse_edge_list("0 a b 1\n0 b a 2\n"),
            Err(Error::DuplicateEdge { line: 2, .. })
        ));
        // same pair on different layers is fine
        assert!(MultilayerGraph::parse_edge_list("0 a b 1\n1 b a 2\n").is_ok());
    }

    #[test]
    fn empty_middle_layer_is_tolerated() {
        let g = MultilayerGraph::parse_edge_list("0 a b 1\n0 b c 1\n2 a c 1\n").unwrap();
        assert_eq!(g.num_layers(), 3);
        assert_eq!(g.layer(1).nnz(), 0);
        let agg = g.aggregate(&LayerWeights::uniform(3)).unwrap();
        assert!(agg.is_connected());
        let agg = g.aggregate(&LayerWeights::new(vec![0.0, 1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(agg.connected_components().len(), 3);
        let n = g.degree_normalize();
        assert_eq!(n.layer(1).nnz(), 0);
    }

    #[test]
    fn degree_normalization() {
        let g = MultilayerGraph::parse_edge_list("0 a b 1\n0 b c 1\n1 a b 2.5\n0 d e 1\n")
            .unwrap();
        let n = g.degree_normalize();
        assert!((n.layer(0).get(0, 1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((n.layer(0).get(1, 2) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(n.layer(0).get(3, 4), 1.0);
        // node c is isolated in layer 1: nothing incident
        assert_eq!(n.layer(1).row(2).count(), 0);
        assert_eq!(n.layer(1).get(0, 1), 2.5);
        assert!(!g.is_unweighted_layer(1));
    }

    #[test]
    fn aggregation_is_convex_combination() {
        let g = MultilayerGraph::parse_edge_list("0 a b 2\n1 a b 4\n1 b c 1\n").unwrap();
        let agg = g.aggregate(&LayerWeights::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(agg.weights.get(0, 1), 3.0);
        assert_eq!(agg.weights.get(1, 2), 0.5);
        assert_eq!(agg.strength, vec![3.0, 3.5, 0.5]);
        let agg = g.aggregate(&LayerWeights::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(agg.weights, *g.layer(0));
        assert!(matches!(
            g.aggregate(&LayerWeights::uniform(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn laplacian_linear_in_weights() {
        let g = MultilayerGraph::parse_edge_list("0 a b 0.3\n0 b c 1.7\n1 a c 0.9\n1 a b 2.2\n")
            .unwrap();
        let w = LayerWeights::new(vec![0.37, 0.63]).unwrap();
        let direct = g.aggregate(&w).unwrap().laplacian_dense();
        let mut sum = DMatrix::zeros(3, 3);
        for (l, &wl) in w.as_slice().iter().enumerate() {
            sum += g.layer_graph(l).laplacian_dense() * wl;
        }
        assert!((direct - sum).abs().max() < 1e-12);
    }

    #[test]
    fn components() {
        let text = "0 a b 1\n0 b c 1\n0 a c 1\n0 d e 1\n0 e f 1\n0 d f 1\n";
        let g = MultilayerGraph::parse_edge_list(text).unwrap();
        let agg = g.aggregate(&LayerWeights::uniform(1)).unwrap();
        assert_eq!(agg.connected_components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let path = MultilayerGraph::parse_edge_list("0 a b 1\n0 b c 1\n").unwrap();
        assert!(path.aggregate(&LayerWeights::uniform(1)).unwrap().is_connected());
        // node c only has a layer-1 edge; zero weight on layer 1 isolates it
        let g = MultilayerGraph::parse_edge_list("0 a b 1\n1 b c 1\n").unwrap();
        let agg = g.aggregate(&LayerWeights::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(agg.connected_components(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn within_cluster_laplacians() {
        let text = "0 a b 1\n0 b c 2\n0 c d 1\n0 a d 3\n0 a c 1\n";
        let g = MultilayerGraph::parse_edge_list(text).unwrap();
        let whole = g.within_cluster_graphs(&ClusterAssignment::single(4)).unwrap();
        assert_eq!(whole[0][0].laplacian_dense(), g.layer_graph(0).laplacian_dense());

        let a = ClusterAssignment::from_labels(vec![0, 0, 1, 1]);
        let parts = g.within_cluster_graphs(&a).unwrap();
        for lap in &parts[0] {
            let d = lap.laplacian_dense();
            for r in 0..d.nrows() {
                assert!(d.row(r).sum().abs() < 1e-12);
            }
        }
        assert_eq!(parts[0][0].weights.get(0, 1), 1.0);
        assert_eq!(parts[0][1].weights.get(0, 1), 1.0);

        let single = ClusterAssignment::from_labels(vec![0, 1, 1, 1]);
        let parts = g.within_cluster_graphs(&single).unwrap();
        assert_eq!(parts[0][0].laplacian_dense(), DMatrix::zeros(1, 1));
    }

    #[test]
    fn from_edges_rejects_duplicates() {
        let r = MultilayerGraph::from_edges(ids(3), 1, &[(0, 0, 1, 1.0), (0, 1, 0, 1.0)]);
        assert!(matches!(r, Err(Error::DuplicateEdge { .. })));
    }
}
