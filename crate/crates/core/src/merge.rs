//! Combining child solutions across a tight cut, and the recursive solve.
//!
//! Every perfect matching of a child uses exactly one cut edge `e`. For each
//! `e` the child terms through `e` are paired up and each pair is lifted to
//! the parent matching `(left - e) + (right - e) + e`. The product rule
//! weights every pair by the product of coefficients; the pairing rule
//! splits the coefficient mass along sorted prefix sums so that entries stay
//! integral or `+1/2`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cover::{CoverSolution, HalfInt, Term};
use crate::decomposition::{decompose, DecompositionError, DecompositionTree, Split, TreeNode};
use crate::graph::{EdgeId, MultiGraph};
use crate::linalg::Rational;
use crate::matching::{MatchingError, PerfectMatching};
use crate::solvers::{solve_leaf, solve_leaf_nonnegative, SolverError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("{0} child solution does not cover its graph exactly once")]
    ChildCoverage(&'static str),
    #[error("{0} child solution has an entry that is neither integral nor +1/2")]
    ChildNotHalfIntegral(&'static str),
    #[error("sequences have different sums {left} and {right}")]
    SumMismatch { left: HalfInt, right: HalfInt },
    #[error("sequence is not sorted non-decreasingly")]
    Unsorted,
    #[error("sequence entry {0} is not a positive integer or 1/2")]
    InvalidEntry(HalfInt),
    #[error("positive part is empty")]
    EmptyPositives,
    #[error("at cut edge {edge}: only +1/2 entries on the side with less negative mass")]
    HalvesAgainstNegatives { edge: EdgeId },
    #[error("pairing produced the non-half-integral value {0}")]
    NonHalfIntegralPair(HalfInt),
    #[error("lifted edge set is not a perfect matching: {0}")]
    Lift(#[from] MatchingError),
}

/// A coefficient magnitude and the index of the term it came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Signed {
    pub value: HalfInt,
    pub key: usize,
}

/// Positive and negative parts of one side of an edge group, each sorted by
/// `(value, key)`. Negative entries are stored by magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedSequences {
    pub positives: Vec<Signed>,
    pub negatives: Vec<Signed>,
}

impl SignedSequences {
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, HalfInt)>) -> Self {
        let mut seq = SignedSequences::default();
        for (key, value) in terms {
            if value.is_positive() {
                seq.positives.push(Signed { value, key });
            } else if value.is_negative() {
                seq.negatives.push(Signed { value: value.abs(), key });
            }
        }
        seq.sort();
        seq
    }

    fn sort(&mut self) {
        self.positives.sort();
        self.negatives.sort();
    }

    pub fn positive_mass(&self) -> HalfInt {
        self.positives.iter().map(|s| s.value.clone()).sum()
    }

    pub fn negative_mass(&self) -> HalfInt {
        self.negatives.iter().map(|s| s.value.clone()).sum()
    }

    pub fn positive_values(&self) -> Vec<HalfInt> {
        self.positives.iter().map(|s| s.value.clone()).collect()
    }

    pub fn negative_values(&self) -> Vec<HalfInt> {
        self.negatives.iter().map(|s| s.value.clone()).collect()
    }

    /// Moves `k` more mass into both parts of the side with less negative
    /// mass.
    fn raise(&mut self, k: HalfInt) -> Result<(), MergeError> {
        if let Some(pos) = self.positives.iter().rposition(|s| s.value.is_integer()) {
            let top = self.positives.remove(pos);
            self.negatives.push(Signed { value: k.clone(), key: top.key });
            self.positives.push(Signed { value: top.value + k, key: top.key });
        } else if let Some(top) = self.negatives.pop() {
            // no positive integer to split: deepen the largest negative and
            // add the matching positive part under the same key
            self.positives.push(Signed { value: k.clone(), key: top.key });
            self.negatives.push(Signed { value: top.value + k, key: top.key });
        } else if self.positives.is_empty() {
            return Err(MergeError::EmptyPositives);
        } else {
            return Err(MergeError::HalvesAgainstNegatives { edge: usize::MAX });
        }
        self.sort();
        Ok(())
    }
}

/// Equalises the negative masses of the two sides by splitting the largest
/// positive integer entry of the lighter side as `s = (s + k) - k`.
pub fn balance_negatives(
    mut left: SignedSequences,
    mut right: SignedSequences,
) -> Result<(SignedSequences, SignedSequences), MergeError> {
    let (l1, l2) = (left.negative_mass(), right.negative_mass());
    if l1 < l2 {
        left.raise(l2 - l1)?;
    } else if l2 < l1 {
        right.raise(l1 - l2)?;
    }
    Ok((left, right))
}

fn check_sequence(a: &[HalfInt]) -> Result<(), MergeError> {
    if let Some(bad) = a.iter().find(|x| !x.is_positive() || !(x.is_integer() || x.is_plus_half())) {
        return Err(MergeError::InvalidEntry(bad.clone()));
    }
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(MergeError::Unsorted);
    }
    Ok(())
}

/// Pairs two sorted sequences of equal sum along the merged list of their
/// prefix sums. Each gap `(w, w')` between consecutive marks yields
/// `(i, j, w' - w)` with `i`, `j` the first indices whose prefix sums reach
/// `w'`. Indices are zero-based.
pub fn pair_sequences(a: &[HalfInt], b: &[HalfInt]) -> Result<Vec<(usize, usize, HalfInt)>, MergeError> {
    check_sequence(a)?;
    check_sequence(b)?;
    let (sa, sb): (HalfInt, HalfInt) = (a.iter().cloned().sum(), b.iter().cloned().sum());
    if sa != sb {
        return Err(MergeError::SumMismatch { left: sa, right: sb });
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut w = HalfInt::zero();
    let (mut pa, mut pb) = (HalfInt::zero(), HalfInt::zero());
    if let (Some(x), Some(y)) = (a.first(), b.first()) {
        pa = x.clone();
        pb = y.clone();
    }
    while i < a.len() && j < b.len() {
        let next = pa.clone().min(pb.clone());
        let value = &next - &w;
        if !(value.is_integer() || value.is_plus_half()) {
            return Err(MergeError::NonHalfIntegralPair(value));
        }
        out.push((i, j, value));
        if pa == next {
            i += 1;
            if let Some(x) = a.get(i) {
                pa += x;
            }
        }
        if pb == next {
            j += 1;
            if let Some(y) = b.get(j) {
                pb += y;
            }
        }
        w = next;
    }
    Ok(out)
}

/// `(left - e) + (right - e) + e` as a matching of the parent.
fn lift(
    g: &MultiGraph,
    split: &Split,
    left: &PerfectMatching,
    right: &PerfectMatching,
) -> Result<PerfectMatching, MergeError> {
    let mut edges: Vec<EdgeId> = left
        .edges()
        .iter()
        .map(|&c| split.left_map.parent_edge(c))
        .chain(right.edges().iter().map(|&c| split.right_map.parent_edge(c)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(PerfectMatching::new(g, edges)?)
}

/// Child edges of cut edge `e` on both sides.
fn child_edges(split: &Split, e: EdgeId) -> (EdgeId, EdgeId) {
    let l = split.left_map.child_edge(e).expect("cut edge survives contraction");
    let r = split.right_map.child_edge(e).expect("cut edge survives contraction");
    (l, r)
}

fn check_child(
    graph: &MultiGraph,
    sol: &CoverSolution,
    side: &'static str,
    half_integral: bool,
) -> Result<(), MergeError> {
    if !sol.covers_exactly_once(graph) {
        return Err(MergeError::ChildCoverage(side));
    }
    if half_integral && !sol.is_half_integral() {
        return Err(MergeError::ChildNotHalfIntegral(side));
    }
    Ok(())
}

/// A cover with arbitrary rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalCover {
    pub terms: Vec<(PerfectMatching, Rational)>,
}

impl RationalCover {
    pub fn covers_exactly_once(&self, g: &MultiGraph) -> bool {
        let mut acc = vec![Rational::zero(); g.edge_count()];
        for (pm, c) in &self.terms {
            for &e in pm.edges() {
                if e >= acc.len() {
                    return false;
                }
                acc[e] += c;
            }
        }
        acc.iter().all(Rational::is_one)
    }

    pub fn coeff_sum(&self) -> Rational {
        self.terms.iter().map(|(_, c)| c.clone()).sum()
    }
}

/// Product rule: every pair through the same cut edge is weighted by the
/// product of its coefficients.
pub fn product_merge(
    g: &MultiGraph,
    split: &Split,
    left: &CoverSolution,
    right: &CoverSolution,
) -> Result<RationalCover, MergeError> {
    check_child(&split.left.graph, left, "left", false)?;
    check_child(&split.right.graph, right, "right", false)?;
    let mut sums: BTreeMap<PerfectMatching, Rational> = BTreeMap::new();
    let mut order = Vec::new();
    for &e in split.cut.edge_ids() {
        let (le, re) = child_edges(split, e);
        for lt in left.terms().iter().filter(|t| t.matching.contains(le)) {
            for rt in right.terms().iter().filter(|t| t.matching.contains(re)) {
                let pm = lift(g, split, &lt.matching, &rt.matching)?;
                let c = lt.coeff.to_rational() * rt.coeff.to_rational();
                match sums.get_mut(&pm) {
                    Some(acc) => *acc += c,
                    None => {
                        order.push(pm.clone());
                        sums.insert(pm, c);
                    }
                }
            }
        }
    }
    let terms = order
        .into_iter()
        .filter_map(|pm| {
            let c = sums.remove(&pm).unwrap();
            (!c.is_zero()).then_some((pm, c))
        })
        .collect();
    Ok(RationalCover { terms })
}

/// Pairing rule. Per cut edge the negative masses are balanced, then positive
/// entries are paired with positive and negative with negative.
pub fn improved_merge(
    g: &MultiGraph,
    split: &Split,
    left: &CoverSolution,
    right: &CoverSolution,
) -> Result<CoverSolution, MergeError> {
    check_child(&split.left.graph, left, "left", true)?;
    check_child(&split.right.graph, right, "right", true)?;
    let mut terms = Vec::new();
    for &e in split.cut.edge_ids() {
        let (le, re) = child_edges(split, e);
        let group = |sol: &CoverSolution, ce: EdgeId| {
            SignedSequences::from_terms(
                sol.terms()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.matching.contains(ce))
                    .map(|(i, t)| (i, t.coeff.clone())),
            )
        };
        let (ls, rs) = balance_negatives(group(left, le), group(right, re)).map_err(|err| match err {
            MergeError::HalvesAgainstNegatives { .. } => MergeError::HalvesAgainstNegatives { edge: e },
            other => other,
        })?;
        for (lpart, rpart, sign) in [
            (&ls.positives, &rs.positives, 1),
            (&ls.negatives, &rs.negatives, -1),
        ] {
            let a: Vec<HalfInt> = lpart.iter().map(|s| s.value.clone()).collect();
            let b: Vec<HalfInt> = rpart.iter().map(|s| s.value.clone()).collect();
            for (i, j, value) in pair_sequences(&a, &b)? {
                let pm = lift(
                    g,
                    split,
                    &left.terms()[lpart[i].key].matching,
                    &right.terms()[rpart[j].key].matching,
                )?;
                let coeff = if sign > 0 { value } else { -value };
                terms.push(Term { matching: pm, coeff });
            }
        }
    }
    Ok(CoverSolution::new(terms))
}

/// Numerical check of the properties a pairing merge is expected to keep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeProperties {
    pub coverage_ok: bool,
    pub half_integral: bool,
    /// Support at most the sum of the children's supports.
    pub support_ok: bool,
    /// Largest magnitude at most the children's largest magnitude.
    pub norm_ok: bool,
    /// At most as many `+1/2` entries as the children combined.
    pub halves_ok: bool,
    /// `None` unless both children used independent matchings.
    pub independent: Option<bool>,
    pub coeff_sum_is_cut_size: bool,
}

impl MergeProperties {
    pub fn all_ok(&self) -> bool {
        self.coverage_ok
            && self.half_integral
            && self.support_ok
            && self.norm_ok
            && self.halves_ok
            && self.independent != Some(false)
            && self.coeff_sum_is_cut_size
    }
}

pub fn merge_properties(
    g: &MultiGraph,
    split: &Split,
    left: &CoverSolution,
    right: &CoverSolution,
    merged: &CoverSolution,
) -> MergeProperties {
    let children_independent = left.is_independent(split.left.graph.edge_count())
        && right.is_independent(split.right.graph.edge_count());
    MergeProperties {
        coverage_ok: merged.covers_exactly_once(g),
        half_integral: merged.is_half_integral(),
        support_ok: merged.support() <= left.support() + right.support(),
        norm_ok: merged.inf_norm() <= left.inf_norm().max(right.inf_norm()),
        halves_ok: merged.halves_count() <= left.halves_count() + right.halves_count(),
        independent: children_independent.then(|| merged.is_independent(g.edge_count())),
        coeff_sum_is_cut_size: merged.coeff_sum() == HalfInt::integer(split.cut.size()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Solve sibling subtrees on the rayon pool.
    pub parallel: bool,
}

/// Decomposes `g`, solves the leaves and folds the solutions upward.
pub fn solve_r_graph(
    g: &MultiGraph,
    opts: SolveOptions,
) -> Result<(CoverSolution, DecompositionTree), SolveError> {
    let tree = decompose(g)?;
    let sol = solve_tree(&tree, opts)?;
    Ok((sol, tree))
}

/// Solution for the graph at the root of `tree`.
///
/// A brick solution with negative coefficients cannot always be paired
/// against a side that carries only halves on a cut edge. When a merge fails
/// that way, both subtrees are solved again with every brick leaf split into
/// disjoint perfect matchings where possible, and the merge is retried.
pub fn solve_tree(tree: &DecompositionTree, opts: SolveOptions) -> Result<CoverSolution, SolveError> {
    solve_with(tree, opts, false)
}

/// Solution for the root of `tree` with every brick leaf split into disjoint
/// perfect matchings where possible; the merge retry in [`solve_tree`] uses it.
pub fn solve_tree_nonnegative(tree: &DecompositionTree, opts: SolveOptions) -> Result<CoverSolution, SolveError> {
    solve_with(tree, opts, true)
}

fn solve_with(tree: &DecompositionTree, opts: SolveOptions, nonnegative: bool) -> Result<CoverSolution, SolveError> {
    match &tree.node {
        TreeNode::Leaf(class) if nonnegative => Ok(solve_leaf_nonnegative(&tree.graph, *class)?),
        TreeNode::Leaf(class) => Ok(solve_leaf(&tree.graph, *class)?),
        TreeNode::Split(split) => {
            let children = |nonnegative| {
                if opts.parallel {
                    rayon::join(
                        || solve_with(&split.left, opts, nonnegative),
                        || solve_with(&split.right, opts, nonnegative),
                    )
                } else {
                    (solve_with(&split.left, opts, nonnegative), solve_with(&split.right, opts, nonnegative))
                }
            };
            let (left, right) = children(nonnegative);
            match improved_merge(&tree.graph, split, &left?, &right?) {
                Err(MergeError::HalvesAgainstNegatives { .. }) if !nonnegative => {
                    let (left, right) = children(true);
                    Ok(improved_merge(&tree.graph, split, &left?, &right?)?)
                }
                merged => Ok(merged?),
            }
        }
    }
}
