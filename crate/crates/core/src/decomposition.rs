//! Tight cut decomposition.
//!
//! Nontrivial tight cut candidates come from the classical structure of
//! matching covered graphs: Hall violators in bipartite graphs, odd
//! components around maximal barriers, and 1- or 2-vertex separations. Every
//! candidate is checked with [`is_tight_cut`] before it is used.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Cut, EdgeId, GraphError, MultiGraph, RGraphFailure};
use crate::matching::{has_perfect_matching_avoiding, maximum_matching};
use crate::named;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("input is not an r-graph ({failure:?})")]
    NotRGraph {
        failure: Option<RGraphFailure>,
        witness: Option<Cut>,
    },
    #[error("cut is not odd")]
    NotOddCut,
    #[error("collapsed shore is a single vertex")]
    TrivialCollapse,
    #[error("contraction produced a graph that is not an r-graph with r = {r}")]
    ChildNotRGraph { r: usize },
    #[error("tight cut has {found} edges, expected {expected}")]
    CutSizeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Whether every perfect matching of `g` meets `cut` in exactly one edge.
/// Decided by checking that no two disjoint cut edges extend to a perfect
/// matching. `g` is assumed matching covered.
pub fn is_tight_cut(g: &MultiGraph, cut: &Cut) -> Result<bool, DecompositionError> {
    if !cut.is_odd() {
        return Err(DecompositionError::NotOddCut);
    }
    let mut keys: Vec<(usize, usize)> = cut.edge_ids().iter().map(|&e| g.edge(e).key()).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut removed = vec![false; g.vertex_count()];
    for (i, &(a, b)) in keys.iter().enumerate() {
        for &(c, d) in &keys[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            for w in [a, b, c, d] {
                removed[w] = true;
            }
            let extends = has_perfect_matching_avoiding(g, &removed);
            for w in [a, b, c, d] {
                removed[w] = false;
            }
            if extends {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn ensure_r_graph(g: &MultiGraph) -> Result<usize, DecompositionError> {
    let check = g.r_graph_check();
    match (check.ok, check.r) {
        (true, Some(r)) => Ok(r),
        _ => Err(DecompositionError::NotRGraph {
            failure: check.failure,
            witness: check.witness,
        }),
    }
}

/// A verified nontrivial tight cut of the r-graph `g`, if one exists.
pub fn find_nontrivial_tight_cut(g: &MultiGraph) -> Result<Option<Cut>, DecompositionError> {
    ensure_r_graph(g)?;
    first_tight_candidate(g)
}

fn first_tight_candidate(g: &MultiGraph) -> Result<Option<Cut>, DecompositionError> {
    if g.vertex_count() < 6 {
        return Ok(None);
    }
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for shore in candidate_shores(g) {
        let cut = g.cut(&shore)?;
        if !cut.is_odd() || cut.is_trivial() {
            continue;
        }
        let canon = cut.canonical_shore().to_vec();
        if seen.contains(&canon) {
            continue;
        }
        if is_tight_cut(g, &cut)? {
            return Ok(Some(cut));
        }
        seen.push(canon);
    }
    Ok(None)
}

/// Candidate shores in deterministic order.
fn candidate_shores(g: &MultiGraph) -> Vec<Vec<usize>> {
    match g.bipartition() {
        Some(color) => hall_violator_shores(g, &color),
        None => {
            let mut shores = barrier_shores(g);
            shores.extend(separation_shores(g));
            shores
        }
    }
}

/// Bipartite case: for each pair of vertices `u1, u2` on one side and
/// `w1, w2` on the other whose removal destroys every perfect matching, the
/// Hall violator `X` found in the remainder yields the shore `X + N(X)`.
fn hall_violator_shores(g: &MultiGraph, color: &[bool]) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let left: Vec<usize> = (0..n).filter(|&v| !color[v]).collect();
    let right: Vec<usize> = (0..n).filter(|&v| color[v]).collect();
    let adj = g.neighbors();
    let mut shores = Vec::new();
    let mut removed = vec![false; n];
    for (i, &u1) in left.iter().enumerate() {
        for &u2 in &left[i + 1..] {
            for (j, &w1) in right.iter().enumerate() {
                for &w2 in &right[j + 1..] {
                    for v in [u1, u2, w1, w2] {
                        removed[v] = true;
                    }
                    let mates = maximum_matching(g, &removed);
                    let exposed: Vec<usize> = left
                        .iter()
                        .copied()
                        .filter(|&u| !removed[u] && mates[u].is_none())
                        .collect();
                    if !exposed.is_empty() {
                        let x = alternating_reach(&adj, &mates, &removed, &exposed);
                        let mut shore = x.clone();
                        for &u in &x {
                            shore.extend(adj[u].iter().copied());
                        }
                        shore.sort_unstable();
                        shore.dedup();
                        shores.push(shore);
                    }
                    for v in [u1, u2, w1, w2] {
                        removed[v] = false;
                    }
                }
            }
        }
    }
    shores
}

/// Left vertices reachable from `exposed` by alternating paths.
fn alternating_reach(
    adj: &[Vec<usize>],
    mates: &[Option<usize>],
    removed: &[bool],
    exposed: &[usize],
) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = exposed.to_vec();
    for &u in exposed {
        seen[u] = true;
    }
    let mut reached = Vec::new();
    while let Some(u) = stack.pop() {
        reached.push(u);
        for &w in &adj[u] {
            if removed[w] || seen[w] {
                continue;
            }
            seen[w] = true;
            if let Some(next) = mates[w] {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
    }
    reached.sort_unstable();
    reached
}

/// Maximal barriers are the classes of `u ~ v  <=>  g - u - v` has no perfect
/// matching. Odd components of `g - B` with at least three vertices give
/// barrier cuts.
fn barrier_shores(g: &MultiGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut class = vec![usize::MAX; n];
    let mut barriers: Vec<Vec<usize>> = Vec::new();
    let mut removed = vec![false; n];
    for u in 0..n {
        if class[u] != usize::MAX {
            continue;
        }
        let id = barriers.len();
        class[u] = id;
        let mut members = vec![u];
        for v in (u + 1)..n {
            if class[v] != usize::MAX {
                continue;
            }
            removed[u] = true;
            removed[v] = true;
            if !has_perfect_matching_avoiding(g, &removed) {
                class[v] = id;
                members.push(v);
            }
            removed[u] = false;
            removed[v] = false;
        }
        barriers.push(members);
    }
    let mut shores = Vec::new();
    for barrier in barriers.iter().filter(|b| b.len() >= 2) {
        for comp in g.components_avoiding(barrier) {
            if comp.len() % 2 == 1 && comp.len() >= 3 {
                shores.push(comp);
            }
        }
    }
    shores
}

/// Shores built from vertex separations `{u, v}`: every edge leaving a union
/// of components of `g - u - v` (plus `u` when that union is even) touches
/// `u` or `v`, so at most two perfect matching edges can cross.
fn separation_shores(g: &MultiGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut shores = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let comps = g.components_avoiding(&[u, v]);
            if comps.len() < 2 {
                continue;
            }
            for comp in comps {
                let mut shore = comp;
                if shore.len() % 2 == 0 {
                    shore.push(u);
                    shore.sort_unstable();
                }
                shores.push(shore);
            }
        }
    }
    shores
}

/// Which shore of a cut survives a contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeepSide {
    Shore,
    Complement,
}

/// Correspondence between a contracted graph and its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionMap {
    /// Parent edge id of each child edge.
    pub child_to_parent: Vec<EdgeId>,
    /// Parent vertex of each child vertex, except the contracted one.
    pub kept_vertices: Vec<usize>,
    /// Child index of the vertex replacing the collapsed shore.
    pub contracted_vertex: usize,
    /// Parent vertices that were collapsed.
    pub shore: Vec<usize>,
}

impl ContractionMap {
    pub fn parent_edge(&self, child: EdgeId) -> EdgeId {
        self.child_to_parent[child]
    }

    pub fn child_edge(&self, parent: EdgeId) -> Option<EdgeId> {
        self.child_to_parent.iter().position(|&p| p == parent)
    }
}

/// Collapses the shore not kept into a single new vertex (the last index of
/// the child). Edges inside the collapsed shore disappear.
pub fn contract_shore(
    g: &MultiGraph,
    cut: &Cut,
    keep: KeepSide,
) -> Result<(MultiGraph, ContractionMap), DecompositionError> {
    if !cut.is_odd() {
        return Err(DecompositionError::NotOddCut);
    }
    let (kept, collapsed) = match keep {
        KeepSide::Shore => (cut.shore(), cut.complement()),
        KeepSide::Complement => (cut.complement(), cut.shore()),
    };
    if collapsed.len() == 1 {
        return Err(DecompositionError::TrivialCollapse);
    }
    let c = kept.len();
    let mut index = vec![c; g.vertex_count()];
    for (i, &v) in kept.iter().enumerate() {
        index[v] = i;
    }
    let mut pairs = Vec::new();
    let mut child_to_parent = Vec::new();
    for e in g.edges() {
        let (a, b) = (index[e.u], index[e.v]);
        if a == c && b == c {
            continue;
        }
        pairs.push((a, b));
        child_to_parent.push(e.id);
    }
    let child = MultiGraph::new(c + 1, &pairs)?;
    Ok((
        child,
        ContractionMap {
            child_to_parent,
            kept_vertices: kept.to_vec(),
            contracted_vertex: c,
            shore: collapsed.to_vec(),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafClass {
    Brace,
    PetersenBrick,
    OtherBrick,
}

impl LeafClass {
    pub fn name(self) -> &'static str {
        match self {
            LeafClass::Brace => "brace",
            LeafClass::PetersenBrick => "petersen_brick",
            LeafClass::OtherBrick => "other_brick",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "brace" => Some(LeafClass::Brace),
            "petersen_brick" => Some(LeafClass::PetersenBrick),
            "other_brick" => Some(LeafClass::OtherBrick),
            _ => None,
        }
    }
}

/// Classifies a graph without nontrivial tight cuts.
pub fn classify_leaf(g: &MultiGraph) -> LeafClass {
    if g.bipartition().is_some() {
        LeafClass::Brace
    } else if petersen_isomorphism(g).is_some() {
        LeafClass::PetersenBrick
    } else {
        LeafClass::OtherBrick
    }
}

/// If the underlying simple graph of `g` is the Petersen graph, returns `phi`
/// with `phi[c]` the vertex of `g` playing canonical vertex `c` of
/// [`named::petersen`].
pub fn petersen_isomorphism(g: &MultiGraph) -> Option<[usize; 10]> {
    if g.vertex_count() != 10 {
        return None;
    }
    let adj = g.neighbors();
    if adj.iter().any(|list| list.len() != 3) {
        return None;
    }
    // cubic, simple 15 pairs, girth 5: the unique (3,5)-cage
    for (v, list) in adj.iter().enumerate() {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                // triangle or 4-cycle through v
                if adj[a].contains(&b) {
                    return None;
                }
                if adj[a].iter().any(|&x| x != v && adj[b].contains(&x)) {
                    return None;
                }
            }
        }
    }
    let canon = named::petersen().neighbors();
    let mut phi = [usize::MAX; 10];
    let mut used = [false; 10];
    extend_isomorphism(&canon, &adj, 0, &mut phi, &mut used).then_some(phi)
}

fn extend_isomorphism(
    canon: &[Vec<usize>],
    adj: &[Vec<usize>],
    c: usize,
    phi: &mut [usize; 10],
    used: &mut [bool; 10],
) -> bool {
    if c == 10 {
        return true;
    }
    for v in 0..10 {
        if used[v] {
            continue;
        }
        let consistent = (0..c).all(|d| canon[c].contains(&d) == adj[v].contains(&phi[d]));
        if !consistent {
            continue;
        }
        phi[c] = v;
        used[v] = true;
        if extend_isomorphism(canon, adj, c + 1, phi, used) {
            return true;
        }
        used[v] = false;
    }
    phi[c] = usize::MAX;
    false
}

/// Recursive record of tight cuts and contractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTree {
    pub graph: MultiGraph,
    pub node: TreeNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(LeafClass),
    Split(Box<Split>),
}

/// An internal node. `left` keeps the cut's shore and collapses its
/// complement; `right` keeps the complement and collapses the shore.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub cut: Cut,
    pub left: DecompositionTree,
    pub right: DecompositionTree,
    pub left_map: ContractionMap,
    pub right_map: ContractionMap,
}

impl DecompositionTree {
    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&DecompositionTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a DecompositionTree>) {
        match &self.node {
            TreeNode::Leaf(_) => out.push(self),
            TreeNode::Split(split) => {
                split.left.collect_leaves(out);
                split.right.collect_leaves(out);
            }
        }
    }

    /// Internal nodes in pre-order.
    pub fn splits(&self) -> Vec<(&MultiGraph, &Split)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if let TreeNode::Split(split) = &t.node {
                out.push((&t.graph, split.as_ref()));
                stack.push(&split.right);
                stack.push(&split.left);
            }
        }
        out
    }

    pub fn leaf_class(&self) -> Option<LeafClass> {
        match self.node {
            TreeNode::Leaf(class) => Some(class),
            TreeNode::Split(_) => None,
        }
    }

    /// Number of Petersen brick leaves.
    pub fn petersen_count(&self) -> usize {
        self.count(LeafClass::PetersenBrick)
    }

    pub fn count(&self, class: LeafClass) -> usize {
        self.leaves()
            .iter()
            .filter(|t| t.leaf_class() == Some(class))
            .count()
    }

    pub fn brick_count(&self) -> usize {
        self.count(LeafClass::PetersenBrick) + self.count(LeafClass::OtherBrick)
    }
}

/// Tight cut decomposition of an r-graph. The first verified candidate cut is
/// used at every node; contracted children are re-validated as r-graphs.
pub fn decompose(g: &MultiGraph) -> Result<DecompositionTree, DecompositionError> {
    let r = ensure_r_graph(g)?;
    decompose_with(g.clone(), r)
}

fn decompose_with(g: MultiGraph, r: usize) -> Result<DecompositionTree, DecompositionError> {
    let Some(cut) = first_tight_candidate(&g)? else {
        let class = classify_leaf(&g);
        return Ok(DecompositionTree {
            graph: g,
            node: TreeNode::Leaf(class),
        });
    };
    if cut.size() != r {
        return Err(DecompositionError::CutSizeMismatch {
            expected: r,
            found: cut.size(),
        });
    }
    let (left_graph, left_map) = contract_shore(&g, &cut, KeepSide::Shore)?;
    let (right_graph, right_map) = contract_shore(&g, &cut, KeepSide::Complement)?;
    for child in [&left_graph, &right_graph] {
        let check = child.r_graph_check();
        if !check.ok || check.r != Some(r) {
            return Err(DecompositionError::ChildNotRGraph { r });
        }
    }
    let left = decompose_with(left_graph, r)?;
    let right = decompose_with(right_graph, r)?;
    Ok(DecompositionTree {
        graph: g,
        node: TreeNode::Split(Box::new(Split {
            cut,
            left,
            right,
            left_map,
            right_map,
        })),
    })
}
