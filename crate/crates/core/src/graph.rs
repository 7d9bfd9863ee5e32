//! Loopless multigraphs with stable edge identities, cuts, and r-graph
//! validation.
//!
//! Edge identity is positional: the edge with id `k` is `edges()[k]`. Parallel
//! edges are distinct edges with distinct ids. Graphs are immutable once built.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

/// Index of an edge inside its host [`MultiGraph`].
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {index} ({u}, {v}) is a loop")]
    Loop { index: usize, u: usize, v: usize },
    #[error("edge {index} ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange {
        index: usize,
        u: usize,
        v: usize,
        n: usize,
    },
    #[error("shore must be a proper nonempty vertex subset")]
    DegenerateShore,
    #[error("shore vertex {0} is out of range")]
    ShoreOutOfRange(usize),
    #[error("graph has an odd number of vertices ({0}); no odd cut exists")]
    OddOrder(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has fewer than two vertices")]
    TooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// The endpoint opposite to `w`. `w` must be an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }

    /// Endpoints ordered `(min, max)`.
    pub fn key(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeId>>,
}

impl MultiGraph {
    /// Builds a multigraph on `n` vertices; edge ids follow input order.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut incidence = vec![Vec::new(); n];
        for (index, &(u, v)) in pairs.iter().enumerate() {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { index, u, v, n });
            }
            if u == v {
                return Err(GraphError::Loop { index, u, v });
            }
            edges.push(Edge { id: index, u, v });
            incidence[u].push(index);
            incidence[v].push(index);
        }
        Ok(MultiGraph {
            n,
            edges,
            incidence,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids incident to `v`, ascending.
    pub fn incident(&self, v: usize) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    /// Common degree if the graph is regular (parallel edges counted).
    pub fn regular_degree(&self) -> Option<usize> {
        if self.n == 0 {
            return None;
        }
        let r = self.degree(0);
        if r == 0 {
            return None;
        }
        (0..self.n).all(|v| self.degree(v) == r).then_some(r)
    }

    /// Distinct adjacent pairs `(a, b)` with `a < b`, each with the multiplicity
    /// and the lowest edge id among its copies.
    pub fn simple_pairs(&self) -> Vec<SimplePair> {
        let mut out: Vec<SimplePair> = Vec::new();
        let mut keyed: Vec<((usize, usize), EdgeId)> =
            self.edges.iter().map(|e| (e.key(), e.id)).collect();
        keyed.sort();
        for (key, id) in keyed {
            match out.last_mut() {
                Some(last) if last.key == key => last.copies.push(id),
                _ => out.push(SimplePair {
                    key,
                    copies: vec![id],
                }),
            }
        }
        out
    }

    /// Sorted, deduplicated neighbor lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        self.components_avoiding(&[]).len() <= 1
    }

    /// Connected components of the graph with `removed` vertices deleted, each
    /// sorted, ordered by smallest member.
    pub fn components_avoiding(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        for &r in removed {
            seen[r] = true;
        }
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &id in &self.incidence[x] {
                    let y = self.edges[id].other(x);
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Two-coloring if the graph is bipartite (`true` marks the side of vertex 0
    /// of each component as `false`).
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let cx = color[x].unwrap();
                for &id in &self.incidence[x] {
                    let y = self.edges[id].other(x);
                    match color[y] {
                        None => {
                            color[y] = Some(!cx);
                            queue.push_back(y);
                        }
                        Some(cy) if cy == cx => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(Option::unwrap).collect())
    }

    /// Cut defined by `shore`.
    pub fn cut(&self, shore: &[usize]) -> Result<Cut, GraphError> {
        let mut inside = vec![false; self.n];
        for &v in shore {
            if v >= self.n {
                return Err(GraphError::ShoreOutOfRange(v));
            }
            inside[v] = true;
        }
        let size = inside.iter().filter(|&&b| b).count();
        if size == 0 || size == self.n {
            return Err(GraphError::DegenerateShore);
        }
        Ok(Cut::from_mask(self, &inside))
    }

    /// Minimum size over all odd cuts, with a witness. Uses a Gomory-Hu tree
    /// and inspects the fundamental cuts of its edges.
    pub fn min_odd_cut(&self) -> Result<(usize, Cut), GraphError> {
        self.odd_cut_preconditions()?;
        let tree = GomoryHuTree::build(self);
        let mut best: Option<(usize, Cut)> = None;
        for child in 1..self.n {
            let side = tree.subtree(child);
            if side.iter().filter(|&&b| b).count() % 2 == 0 {
                continue;
            }
            let cut = Cut::from_mask(self, &side);
            debug_assert_eq!(cut.size(), tree.weight[child]);
            if best.as_ref().is_none_or(|(w, _)| cut.size() < *w) {
                best = Some((cut.size(), cut));
            }
        }
        // n even and >= 2 guarantees a leaf of the tree, whose cut is odd.
        Ok(best.expect("tree has an odd fundamental cut"))
    }

    /// Exhaustive minimum odd cut over all shores containing vertex 0.
    /// Exponential; intended as a cross-check on small graphs.
    pub fn min_odd_cut_exhaustive(&self) -> Result<(usize, Cut), GraphError> {
        self.odd_cut_preconditions()?;
        assert!(self.n <= 24, "exhaustive sweep limited to 24 vertices");
        let mut best: Option<(usize, Cut)> = None;
        for mask in 0u32..(1u32 << (self.n - 1)) {
            let full = (mask << 1) | 1;
            let size = full.count_ones() as usize;
            if size.is_multiple_of(2) || size == self.n {
                continue;
            }
            let inside: Vec<bool> = (0..self.n).map(|v| full >> v & 1 == 1).collect();
            let c = self
                .edges
                .iter()
                .filter(|e| inside[e.u] != inside[e.v])
                .count();
            if best.as_ref().is_none_or(|(w, _)| c < *w) {
                best = Some((c, Cut::from_mask(self, &inside)));
            }
        }
        Ok(best.expect("vertex 0 alone is an odd shore"))
    }

    fn odd_cut_preconditions(&self) -> Result<(), GraphError> {
        if self.n < 2 {
            return Err(GraphError::TooSmall);
        }
        if self.n % 2 == 1 {
            return Err(GraphError::OddOrder(self.n));
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    /// Checks the r-graph conditions: connected, regular of degree r, even
    /// order, and no odd cut smaller than r.
    pub fn r_graph_check(&self) -> RGraphCheck {
        let r = self.regular_degree();
        let fail = |reason: RGraphFailure, witness: Option<Cut>| RGraphCheck {
            ok: false,
            r,
            min_odd_cut: None,
            witness,
            failure: Some(reason),
        };
        if self.n < 2 {
            return fail(RGraphFailure::TooSmall, None);
        }
        if !self.is_connected() {
            return fail(RGraphFailure::Disconnected, None);
        }
        if self.n % 2 == 1 {
            return fail(RGraphFailure::OddOrder, None);
        }
        let (size, witness) = self.min_odd_cut().expect("preconditions checked");
        let Some(r) = r else {
            let mut check = fail(RGraphFailure::NotRegular, None);
            check.min_odd_cut = Some(size);
            return check;
        };
        if size < r {
            let mut check = fail(RGraphFailure::SmallOddCut, Some(witness));
            check.min_odd_cut = Some(size);
            return check;
        }
        RGraphCheck {
            ok: true,
            r: Some(r),
            min_odd_cut: Some(size),
            witness: None,
            failure: None,
        }
    }

    /// Subgraph on the vertices not in `removed`, renumbered in ascending
    /// order. Returns the graph, the new-to-old vertex map and the new-to-old
    /// edge map.
    pub fn without_vertices(&self, removed: &[usize]) -> (MultiGraph, Vec<usize>, Vec<EdgeId>) {
        let mut gone = vec![false; self.n];
        for &r in removed {
            gone[r] = true;
        }
        let mut new_index = vec![usize::MAX; self.n];
        let mut old_vertex = Vec::new();
        for v in 0..self.n {
            if !gone[v] {
                new_index[v] = old_vertex.len();
                old_vertex.push(v);
            }
        }
        let mut pairs = Vec::new();
        let mut old_edge = Vec::new();
        for e in &self.edges {
            if !gone[e.u] && !gone[e.v] {
                pairs.push((new_index[e.u], new_index[e.v]));
                old_edge.push(e.id);
            }
        }
        let g = MultiGraph::new(old_vertex.len(), &pairs).expect("subgraph of a valid graph");
        (g, old_vertex, old_edge)
    }
}

/// One adjacent vertex pair of a multigraph with all its parallel copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplePair {
    pub key: (usize, usize),
    /// Edge ids of the parallel copies, ascending.
    pub copies: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RGraphFailure {
    TooSmall,
    Disconnected,
    OddOrder,
    NotRegular,
    SmallOddCut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RGraphCheck {
    pub ok: bool,
    pub r: Option<usize>,
    pub min_odd_cut: Option<usize>,
    /// An odd cut smaller than r, when that is the reason for failure.
    pub witness: Option<Cut>,
    pub failure: Option<RGraphFailure>,
}

/// The edges crossing a vertex bipartition, together with one shore.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cut {
    shore: Vec<usize>,
    complement: Vec<usize>,
    edge_ids: Vec<EdgeId>,
}

impl Cut {
    fn from_mask(g: &MultiGraph, inside: &[bool]) -> Cut {
        let shore = (0..g.n).filter(|&v| inside[v]).collect();
        let complement = (0..g.n).filter(|&v| !inside[v]).collect();
        let edge_ids = g
            .edges
            .iter()
            .filter(|e| inside[e.u] != inside[e.v])
            .map(|e| e.id)
            .collect();
        Cut {
            shore,
            complement,
            edge_ids,
        }
    }

    pub fn shore(&self) -> &[usize] {
        &self.shore
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn size(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_odd(&self) -> bool {
        self.shore.len() % 2 == 1 && self.complement.len() % 2 == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.shore.len() == 1 || self.complement.len() == 1
    }

    /// The same cut described from the other shore.
    pub fn flipped(&self) -> Cut {
        Cut {
            shore: self.complement.clone(),
            complement: self.shore.clone(),
            edge_ids: self.edge_ids.clone(),
        }
    }

    /// Canonical shore (the one containing vertex 0), for deduplication.
    pub fn canonical_shore(&self) -> &[usize] {
        if self.shore.first() == Some(&0) {
            &self.shore
        } else {
            &self.complement
        }
    }
}

/// Gomory-Hu cut tree built with Gusfield's method. `parent[v]` and
/// `weight[v]` describe the tree edge from `v` (v > 0) towards the root 0.
struct GomoryHuTree {
    parent: Vec<usize>,
    weight: Vec<usize>,
}

impl GomoryHuTree {
    fn build(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let net = FlowNetwork::from_graph(g);
        let mut parent = vec![0usize; n];
        let mut weight = vec![0usize; n];
        for s in 1..n {
            let t = parent[s];
            let (value, side) = net.min_cut(s, t);
            weight[s] = value;
            for i in 0..n {
                if i != s && side[i] && parent[i] == t {
                    parent[i] = s;
                }
            }
            if side[parent[t]] && t != 0 {
                parent[s] = parent[t];
                parent[t] = s;
                weight[s] = weight[t];
                weight[t] = value;
            }
        }
        GomoryHuTree { parent, weight }
    }

    /// Vertices in the subtree hanging below tree edge `(v, parent[v])`.
    fn subtree(&self, v: usize) -> Vec<bool> {
        let n = self.parent.len();
        let mut inside = vec![false; n];
        for x in 0..n {
            let mut y = x;
            let mut steps = 0;
            while y != 0 && y != v && steps <= n {
                y = self.parent[y];
                steps += 1;
            }
            inside[x] = y == v;
        }
        inside
    }
}

/// Undirected capacitated network over the simplified graph; capacities are
/// edge multiplicities.
struct FlowNetwork {
    n: usize,
    cap: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn from_graph(g: &MultiGraph) -> Self {
        let n = g.vertex_count();
        let mut cap = vec![vec![0usize; n]; n];
        for e in g.edges() {
            cap[e.u][e.v] += 1;
            cap[e.v][e.u] += 1;
        }
        let adj = g.neighbors();
        FlowNetwork { n, cap, adj }
    }

    /// Max-flow value between `s` and `t` and the source side of a minimum cut.
    fn min_cut(&self, s: usize, t: usize) -> (usize, Vec<bool>) {
        let n = self.n;
        let mut flow = vec![vec![0isize; n]; n];
        let residual = |flow: &Vec<Vec<isize>>, a: usize, b: usize| -> isize {
            self.cap[a][b] as isize - flow[a][b]
        };
        let mut total = 0usize;
        loop {
            let mut pred = vec![usize::MAX; n];
            pred[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for &y in &self.adj[x] {
                    if pred[y] == usize::MAX && residual(&flow, x, y) > 0 {
                        pred[y] = x;
                        queue.push_back(y);
                    }
                }
            }
            if pred[t] == usize::MAX {
                let side = pred.iter().map(|&p| p != usize::MAX).collect();
                return (total, side);
            }
            let mut bottleneck = isize::MAX;
            let mut y = t;
            while y != s {
                let x = pred[y];
                bottleneck = bottleneck.min(residual(&flow, x, y));
                y = x;
            }
            let mut y = t;
            while y != s {
                let x = pred[y];
                flow[x][y] += bottleneck;
                flow[y][x] -= bottleneck;
                y = x;
            }
            total += bottleneck as usize;
        }
    }
}

/// Shores of odd size containing vertex 0, excluding the full vertex set.
/// Used by exhaustive sweeps on small graphs.
pub fn odd_shores(n: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!((1..=24).contains(&n));
    (0u32..(1u32 << (n - 1))).filter_map(move |mask| {
        let full = (mask << 1) | 1;
        let size = full.count_ones() as usize;
        (size % 2 == 1 && size < n).then(|| (0..n).filter(|&v| full >> v & 1 == 1).collect())
    })
}

/// Shore as a sorted set, for comparisons in tests and reports.
pub fn shore_set(shore: &[usize]) -> BTreeSet<usize> {
    shore.iter().copied().collect()
}
