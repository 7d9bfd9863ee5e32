//! Perfect matchings: existence (Edmonds' blossom search), matchings through
//! prescribed edges, exhaustive enumeration, and incidence matrices.
//!
//! Existence works on the simplified graph; everything that produces
//! matchings as edge sets distinguishes parallel copies by edge id and breaks
//! ties towards the lowest edge id.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph};
use crate::linalg::{IntMatrix, RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("edge id {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("edge set is not a matching: vertex {0} is covered twice")]
    DoublyCovered(usize),
    #[error("edge set is not perfect: vertex {0} is uncovered")]
    Uncovered(usize),
    #[error("enumeration stopped after {limit} perfect matchings")]
    Overflow { limit: usize },
}

/// A perfect matching as a sorted list of edge ids of its host graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectMatching {
    edges: Vec<EdgeId>,
}

impl PerfectMatching {
    /// Validates that `edges` cover every vertex of `g` exactly once.
    pub fn new(g: &MultiGraph, mut edges: Vec<EdgeId>) -> Result<Self, MatchingError> {
        edges.sort_unstable();
        check_perfect(g, &edges)?;
        Ok(PerfectMatching { edges })
    }

    pub(crate) fn from_sorted(edges: Vec<EdgeId>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        PerfectMatching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// 0/1 indicator vector over the `m` edges of the host.
    pub fn indicator(&self, m: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); m];
        for &e in &self.edges {
            v[e] = BigInt::one();
        }
        v
    }
}

fn check_perfect(g: &MultiGraph, edges: &[EdgeId]) -> Result<(), MatchingError> {
    let mut covered = vec![false; g.vertex_count()];
    for &id in edges {
        if id >= g.edge_count() {
            return Err(MatchingError::UnknownEdge(id));
        }
        let e = g.edge(id);
        for w in [e.u, e.v] {
            if covered[w] {
                return Err(MatchingError::DoublyCovered(w));
            }
            covered[w] = true;
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(v) => Err(MatchingError::Uncovered(v)),
        None => Ok(()),
    }
}

const NONE: usize = usize::MAX;

/// Maximum cardinality matching by Edmonds' blossom search on a simple
/// adjacency structure.
struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Searches for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    queue.push_back(next);
                }
            }
        }
        None
    }

    fn run(mut self) -> Vec<usize> {
        let n = self.adj.len();
        for v in 0..n {
            if self.mate[v] == NONE {
                if let Some(&w) = self.adj[v].iter().find(|&&w| self.mate[w] == NONE) {
                    self.mate[v] = w;
                    self.mate[w] = v;
                }
            }
        }
        for root in 0..n {
            if self.mate[root] != NONE || self.adj[root].is_empty() {
                continue;
            }
            if let Some(mut u) = self.find_path(root) {
                while u != NONE {
                    let pv = self.parent[u];
                    let ppv = self.mate[pv];
                    self.mate[u] = pv;
                    self.mate[pv] = u;
                    u = ppv;
                }
            }
        }
        self.mate
    }
}

/// Simple adjacency of `g` with the `removed` vertices isolated.
fn adjacency_without(g: &MultiGraph, removed: &[bool]) -> Vec<Vec<usize>> {
    let mut adj = g.neighbors();
    for (v, list) in adj.iter_mut().enumerate() {
        if removed[v] {
            list.clear();
        } else {
            list.retain(|&w| !removed[w]);
        }
    }
    adj
}

/// Vertex mates of a maximum matching of `g - removed` (`None` when exposed).
pub fn maximum_matching(g: &MultiGraph, removed: &[bool]) -> Vec<Option<usize>> {
    let adj = adjacency_without(g, removed);
    Blossom::new(&adj)
        .run()
        .into_iter()
        .map(|m| (m != NONE).then_some(m))
        .collect()
}

/// Perfect matching of `g - removed` as edge ids (lowest id among parallel
/// copies), or `None` if there is none.
pub fn perfect_matching_avoiding(g: &MultiGraph, removed: &[bool]) -> Option<Vec<EdgeId>> {
    let mates = maximum_matching(g, removed);
    let mut edges = Vec::new();
    for v in 0..g.vertex_count() {
        if removed[v] {
            continue;
        }
        let w = mates[v]?;
        if v < w {
            let id = g
                .incident(v)
                .iter()
                .copied()
                .filter(|&id| g.edge(id).other(v) == w)
                .min()
                .expect("mates are adjacent");
            edges.push(id);
        }
    }
    Some(edges)
}

/// Whether `g - removed` has a perfect matching.
pub fn has_perfect_matching_avoiding(g: &MultiGraph, removed: &[bool]) -> bool {
    let alive = removed.iter().filter(|&&r| !r).count();
    if alive % 2 == 1 {
        return false;
    }
    let mates = maximum_matching(g, removed);
    (0..g.vertex_count()).all(|v| removed[v] || mates[v].is_some())
}

pub fn has_perfect_matching(g: &MultiGraph) -> bool {
    has_perfect_matching_avoiding(g, &vec![false; g.vertex_count()])
}

/// A perfect matching of `g` that contains every edge of `forced`, if any.
pub fn pm_containing_edges(
    g: &MultiGraph,
    forced: &[EdgeId],
) -> Result<Option<PerfectMatching>, MatchingError> {
    let mut removed = vec![false; g.vertex_count()];
    for &id in forced {
        if id >= g.edge_count() {
            return Err(MatchingError::UnknownEdge(id));
        }
        let e = g.edge(id);
        for w in [e.u, e.v] {
            if removed[w] {
                return Err(MatchingError::DoublyCovered(w));
            }
            removed[w] = true;
        }
    }
    Ok(perfect_matching_avoiding(g, &removed).map(|mut rest| {
        rest.extend_from_slice(forced);
        rest.sort_unstable();
        PerfectMatching::from_sorted(rest)
    }))
}

/// Visits every perfect matching of `g` in deterministic order: branch on the
/// lowest uncovered vertex, trying its incident edges by ascending id.
pub fn for_each_pm<F>(g: &MultiGraph, mut visit: F) -> ControlFlow<()>
where
    F: FnMut(PerfectMatching) -> ControlFlow<()>,
{
    let n = g.vertex_count();
    if n % 2 == 1 {
        return ControlFlow::Continue(());
    }
    let mut covered = vec![false; n];
    let mut chosen = Vec::with_capacity(n / 2);
    enumerate_from(g, 0, &mut covered, &mut chosen, &mut visit)
}

fn enumerate_from<F>(
    g: &MultiGraph,
    start: usize,
    covered: &mut [bool],
    chosen: &mut Vec<EdgeId>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(PerfectMatching) -> ControlFlow<()>,
{
    let Some(v) = (start..covered.len()).find(|&v| !covered[v]) else {
        let mut edges = chosen.clone();
        edges.sort_unstable();
        return visit(PerfectMatching::from_sorted(edges));
    };
    covered[v] = true;
    for &id in g.incident(v) {
        let w = g.edge(id).other(v);
        if covered[w] {
            continue;
        }
        covered[w] = true;
        chosen.push(id);
        let flow = enumerate_from(g, v + 1, covered, chosen, visit);
        chosen.pop();
        covered[w] = false;
        flow?;
    }
    covered[v] = false;
    ControlFlow::Continue(())
}

/// All perfect matchings of `g`, or [`MatchingError::Overflow`] if there are
/// more than `limit`.
pub fn enumerate_pms(
    g: &MultiGraph,
    limit: Option<usize>,
) -> Result<Vec<PerfectMatching>, MatchingError> {
    let mut out = Vec::new();
    let flow = for_each_pm(g, |pm| {
        if limit.is_some_and(|l| out.len() >= l) {
            return ControlFlow::Break(());
        }
        out.push(pm);
        ControlFlow::Continue(())
    });
    match (flow, limit) {
        (ControlFlow::Break(()), Some(limit)) => Err(MatchingError::Overflow { limit }),
        _ => Ok(out),
    }
}

/// Edge-by-matching 0/1 matrix with its column key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub matrix: RatMatrix,
    pub columns: Vec<PerfectMatching>,
}

pub fn incidence_matrix(
    g: &MultiGraph,
    pms: &[PerfectMatching],
) -> Result<IncidenceMatrix, MatchingError> {
    for pm in pms {
        check_perfect(g, pm.edges())?;
    }
    let matrix = integer_incidence(g.edge_count(), pms).to_rational();
    Ok(IncidenceMatrix {
        matrix,
        columns: pms.to_vec(),
    })
}

/// Integer incidence matrix with `m` rows, one column per matching.
pub fn integer_incidence(m: usize, pms: &[PerfectMatching]) -> IntMatrix {
    let columns: Vec<Vec<BigInt>> = pms.iter().map(|pm| pm.indicator(m)).collect();
    IntMatrix::from_columns(m, &columns)
}

/// Rank of the incidence vectors of `pms` over the rationals.
pub fn matching_rank(m: usize, pms: &[PerfectMatching]) -> usize {
    crate::linalg::int_rank(&integer_incidence(m, pms))
}

/// Sum of a column of an incidence matrix, as a rational.
pub fn column_sum(matrix: &RatMatrix, j: usize) -> Rational {
    matrix.column(j).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;
    use std::collections::BTreeSet;

    #[test]
    fn existence() {
        assert!(has_perfect_matching(&named::k4()));
        let k3 = MultiGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!has_perfect_matching(&k3));
        let p = named::petersen();
        let (rest, _, _) = p.without_vertices(&[0, 1]);
        assert!(has_perfect_matching(&rest));
        // star K_{1,3} plus an isolated edge: no perfect matching
        let star = MultiGraph::new(6, &[(0, 1), (0, 2), (0, 3), (4, 5)]).unwrap();
        assert!(!has_perfect_matching(&star));
    }

    #[test]
    fn blossom_needed() {
        // two triangles joined by an edge: perfect matching uses the bridge
        let g = MultiGraph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
            .unwrap();
        assert!(has_perfect_matching(&g));
        assert!(has_perfect_matching(&named::petersen()));
    }

    #[test]
    fn forced_edges() {
        let k4 = named::k4();
        let pm = pm_containing_edges(&k4, &[0]).unwrap().unwrap();
        assert_eq!(pm.edges(), &[0, 5]);

        let p = named::petersen();
        let all = enumerate_pms(&p, None).unwrap();
        for e in 0..15 {
            let pm = pm_containing_edges(&p, &[e]).unwrap().unwrap();
            assert!(pm.contains(e));
            assert_eq!(all.iter().filter(|m| m.contains(e)).count(), 2);
        }

        let c6 = named::cycle(6);
        assert_eq!(
            pm_containing_edges(&c6, &[0, 1]),
            Err(MatchingError::DoublyCovered(1))
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_pms(&named::petersen(), None).unwrap().len(), 6);
        assert_eq!(enumerate_pms(&named::k4(), None).unwrap().len(), 3);
        assert_eq!(enumerate_pms(&named::cycle(6), None).unwrap().len(), 2);
        assert_eq!(enumerate_pms(&named::parallel_pair(3), None).unwrap().len(), 3);
        assert_eq!(
            enumerate_pms(&named::cycle(6), Some(1)),
            Err(MatchingError::Overflow { limit: 1 })
        );
        assert_eq!(enumerate_pms(&named::cycle(6), Some(2)).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let g = named::k4_doubled();
        let all = enumerate_pms(&g, None).unwrap();
        assert_eq!(all.len(), 3 * 4);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for pm in &all {
            assert!(PerfectMatching::new(&g, pm.edges().to_vec()).is_ok());
        }
    }

    #[test]
    fn incidence_rows_and_columns() {
        let p = named::petersen();
        let pms = enumerate_pms(&p, None).unwrap();
        let inc = incidence_matrix(&p, &pms).unwrap();
        for i in 0..15 {
            let s: Rational = inc.matrix.row(i).iter().cloned().sum();
            assert_eq!(s, Rational::from_integer(2.into()));
        }
        for j in 0..6 {
            assert_eq!(column_sum(&inc.matrix, j), Rational::from_integer(5.into()));
        }
        assert_eq!(matching_rank(15, &pms), 6);

        let k4 = named::k4();
        let inc = incidence_matrix(&k4, &enumerate_pms(&k4, None).unwrap()).unwrap();
        for i in 0..6 {
            let ones = inc.matrix.row(i).iter().filter(|x| !x.is_zero()).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn incidence_rejects_bad_columns() {
        let k4 = named::k4();
        let bad = PerfectMatching::from_sorted(vec![0]);
        assert_eq!(
            incidence_matrix(&k4, &[bad]),
            Err(MatchingError::Uncovered(2))
        );
        let double = PerfectMatching::from_sorted(vec![0, 1]);
        assert_eq!(
            incidence_matrix(&k4, &[double]),
            Err(MatchingError::DoublyCovered(0))
        );
    }
}
