//! Solutions of `A x = 1` on decomposition leaves.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cover::{CoverSolution, HalfInt, Term};
use crate::decomposition::{petersen_isomorphism, LeafClass};
use crate::graph::{EdgeId, MultiGraph};
use crate::linalg::{hnf_solve, rational_solve, RatMatrix, Rational};
use crate::matching::{
    enumerate_pms, for_each_pm, integer_incidence, perfect_matching_avoiding,
    pm_containing_edges, MatchingError, PerfectMatching,
};
use crate::named;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("graph is not regular")]
    NotRegular,
    #[error("regular bipartite graph has no perfect matching on its remaining edges")]
    NoPerfectMatching,
    #[error("underlying simple graph is not the Petersen graph")]
    NotPetersen,
    #[error("multiplicities are not a combination of the Petersen matchings")]
    OutsidePetersenSpan,
    #[error("Petersen coefficients violate sign or parity: {0:?}")]
    BadAlpha(Vec<String>),
    #[error("edge {0} lies in no perfect matching")]
    EdgeInNoMatching(EdgeId),
    #[error("no independent matching set with an integral solution was found")]
    NoIntegralSolution,
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Splits a regular bipartite multigraph into `r` disjoint perfect matchings,
/// each with coefficient 1.
pub fn brace_solve(g: &MultiGraph) -> Result<CoverSolution, SolverError> {
    if g.bipartition().is_none() {
        return Err(SolverError::NotBipartite);
    }
    let r = g.regular_degree().ok_or(SolverError::NotRegular)?;
    let n = g.vertex_count();
    let mut remaining: Vec<EdgeId> = (0..g.edge_count()).collect();
    let mut terms = Vec::with_capacity(r);
    for _ in 0..r {
        let pairs: Vec<_> = remaining.iter().map(|&e| (g.edge(e).u, g.edge(e).v)).collect();
        let rest = MultiGraph::new(n, &pairs).expect("subgraph of a valid graph");
        let local = perfect_matching_avoiding(&rest, &vec![false; n])
            .ok_or(SolverError::NoPerfectMatching)?;
        let edges: Vec<EdgeId> = local.iter().map(|&i| remaining[i]).collect();
        let matching = PerfectMatching::new(g, edges)?;
        remaining.retain(|e| !matching.contains(*e));
        terms.push(Term {
            matching,
            coeff: HalfInt::one(),
        });
    }
    Ok(CoverSolution::new(terms))
}

/// The six perfect matchings of the canonical Petersen graph, in enumeration
/// order. They index the coefficient vector of [`petersen_alpha`].
pub fn petersen_matchings() -> Vec<PerfectMatching> {
    enumerate_pms(&named::petersen(), None).expect("unbounded enumeration")
}

/// Copies of each canonical Petersen edge in `g`, ascending by id.
fn petersen_copies(g: &MultiGraph) -> Result<Vec<Vec<EdgeId>>, SolverError> {
    let phi = petersen_isomorphism(g).ok_or(SolverError::NotPetersen)?;
    let simple = g.simple_pairs();
    named::petersen_pairs()
        .iter()
        .map(|&(a, b)| {
            let (u, v) = (phi[a], phi[b]);
            let key = (u.min(v), u.max(v));
            simple
                .iter()
                .find(|p| p.key == key)
                .map(|p| p.copies.clone())
                .ok_or(SolverError::NotPetersen)
        })
        .collect()
}

/// Coefficients `alpha` with `sum alpha_i M_i = c`, where `c` counts the
/// parallel copies of each Petersen edge.
pub fn petersen_alpha(g: &MultiGraph) -> Result<[HalfInt; 6], SolverError> {
    let copies = petersen_copies(g)?;
    alpha_from_multiplicities(&copies.iter().map(Vec::len).collect::<Vec<_>>())
}

/// Coefficients for an arbitrary weighting `c` of the canonical Petersen
/// edges (zero weights allowed).
pub fn alpha_from_multiplicities(c: &[usize]) -> Result<[HalfInt; 6], SolverError> {
    let pms = petersen_matchings();
    let a = integer_incidence(15, &pms).to_rational();
    let b: Vec<Rational> = c.iter().map(|&k| Rational::from_integer(k.into())).collect();
    let sol = rational_solve(&a, &b)
        .expect("dimensions agree")
        .ok_or(SolverError::OutsidePetersenSpan)?;
    debug_assert!(sol.nullspace.is_empty());
    let alpha: Vec<HalfInt> = sol
        .particular
        .iter()
        .map(HalfInt::from_rational)
        .collect::<Option<_>>()
        .ok_or_else(|| bad_alpha(&sol.particular))?;
    let all_int = alpha.iter().all(HalfInt::is_integer);
    let all_half = alpha.iter().all(|x| !x.is_integer());
    if alpha.iter().any(HalfInt::is_negative) || !(all_int || all_half) {
        return Err(bad_alpha(&sol.particular));
    }
    Ok(alpha.try_into().expect("six matchings"))
}

fn bad_alpha(values: &[Rational]) -> SolverError {
    SolverError::BadAlpha(values.iter().map(ToString::to_string).collect())
}

/// Petersen brick solution. Parallel copies are handed out in ascending id
/// order; in the half-integral case the lowest copy of every edge carries the
/// six `1/2` terms.
pub fn petersen_solve(g: &MultiGraph) -> Result<CoverSolution, SolverError> {
    let copies = petersen_copies(g)?;
    let alpha = alpha_from_multiplicities(&copies.iter().map(Vec::len).collect::<Vec<_>>())?;
    let canon = petersen_matchings();
    let mut cursor = vec![0usize; 15];
    let mut terms = Vec::new();
    let take = |pm: &PerfectMatching, cursor: &mut Vec<usize>| -> Result<PerfectMatching, SolverError> {
        let edges = pm
            .edges()
            .iter()
            .map(|&k| {
                let e = copies[k][cursor[k]];
                cursor[k] += 1;
                e
            })
            .collect();
        Ok(PerfectMatching::new(g, edges)?)
    };
    let half = !alpha[0].is_integer();
    if half {
        for pm in &canon {
            let lowest: Vec<EdgeId> = pm.edges().iter().map(|&k| copies[k][0]).collect();
            terms.push(Term {
                matching: PerfectMatching::new(g, lowest)?,
                coeff: HalfInt::half(),
            });
        }
        cursor.iter_mut().for_each(|c| *c = 1);
    }
    for (pm, a) in canon.iter().zip(&alpha) {
        let reps = if half { a - &HalfInt::half() } else { a.clone() };
        let reps = reps.to_integer().expect("integral after removing the half");
        let mut k = BigInt::zero();
        while k < reps {
            let matching = take(pm, &mut cursor)?;
            terms.push(Term {
                matching,
                coeff: HalfInt::one(),
            });
            k += 1;
        }
    }
    debug_assert!(cursor.iter().zip(&copies).all(|(c, list)| *c == list.len()));
    Ok(CoverSolution::new(terms))
}

/// Matchings chosen so that each one contains the lowest edge not covered by
/// its predecessors; that edge is returned alongside it.
pub fn greedy_basis(g: &MultiGraph) -> Result<Vec<(PerfectMatching, EdgeId)>, SolverError> {
    let mut covered = vec![false; g.edge_count()];
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        if covered[e] {
            continue;
        }
        let pm = pm_containing_edges(g, &[e])?.ok_or(SolverError::EdgeInNoMatching(e))?;
        for &f in pm.edges() {
            covered[f] = true;
        }
        out.push((pm, e));
    }
    Ok(out)
}

/// Row-echelon span of rational vectors, extended one vector at a time.
struct Span {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    fn new() -> Self {
        Span { rows: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the current span.
    fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone() / &row[*p];
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

fn rational_indicator(pm: &PerfectMatching, m: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); m];
    for &e in pm.edges() {
        v[e] = Rational::one();
    }
    v
}

/// Coordinates of vectors of the column span of a full-column-rank basis,
/// read off a nonsingular square set of rows.
struct Coordinates {
    rows: Vec<usize>,
    inverse: RatMatrix,
}

impl Coordinates {
    fn new(basis: &[PerfectMatching], m: usize) -> Self {
        let d = basis.len();
        let b = integer_incidence(m, basis).to_rational();
        let mut span = Span::new();
        let mut rows = Vec::with_capacity(d);
        for i in 0..m {
            if span.insert(b.row(i).to_vec()) {
                rows.push(i);
                if rows.len() == d {
                    break;
                }
            }
        }
        let square = RatMatrix::from_rows(rows.iter().map(|&i| b.row(i).to_vec()).collect());
        let columns: Vec<Vec<Rational>> = (0..d)
            .map(|j| {
                let mut unit = vec![Rational::zero(); d];
                unit[j] = Rational::one();
                rational_solve(&square, &unit)
                    .expect("square")
                    .expect("nonsingular")
                    .particular
            })
            .collect();
        Coordinates {
            rows,
            inverse: RatMatrix::from_columns(d, &columns),
        }
    }

    fn of(&self, v: &[Rational]) -> Vec<Rational> {
        let picked: Vec<Rational> = self.rows.iter().map(|&i| v[i].clone()).collect();
        self.inverse.mul_vec(&picked)
    }
}

fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Integral solution over linearly independent perfect matchings for a brick
/// other than the Petersen graph.
///
/// The greedy basis is extended to full rank with enumerated matchings. If the
/// unique solution over that basis is not integral, basis members are
/// exchanged for other matchings: first any exchange that makes the solution
/// integral, otherwise the one that shrinks the basis determinant the most.
pub fn brick_solve(g: &MultiGraph) -> Result<CoverSolution, SolverError> {
    let m = g.edge_count();
    let mut basis: Vec<PerfectMatching> = greedy_basis(g)?.into_iter().map(|(pm, _)| pm).collect();
    let mut span = Span::new();
    for pm in &basis {
        let fresh = span.insert(rational_indicator(pm, m));
        debug_assert!(fresh, "greedy matchings have private edges");
    }
    let _ = for_each_pm(g, |pm| {
        if !basis.contains(&pm) && span.insert(rational_indicator(&pm, m)) {
            basis.push(pm);
        }
        // the span of all matchings is reached once no more vectors are
        // independent; stopping early is only safe at the known dimension
        if span.dim() + g.vertex_count() == m + 1 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });

    let ones = vec![BigInt::one(); m];
    loop {
        let matrix = integer_incidence(m, &basis);
        if let Some(x) = hnf_solve(&matrix, &ones) {
            let terms = basis.iter().zip(x).map(|(pm, c)| Term {
                matching: pm.clone(),
                coeff: HalfInt::integer(c),
            });
            return Ok(CoverSolution::new(terms));
        }
        basis = exchange(g, &basis)?;
    }
}

/// One basis exchange, or an error if no improving exchange exists.
fn exchange(g: &MultiGraph, basis: &[PerfectMatching]) -> Result<Vec<PerfectMatching>, SolverError> {
    let m = g.edge_count();
    let coords = Coordinates::new(basis, m);
    let ones = vec![Rational::one(); m];
    let lambda = coords.of(&ones);
    let mut best: Option<(Rational, usize, PerfectMatching)> = None;
    let mut winner: Option<(usize, PerfectMatching)> = None;
    let _ = for_each_pm(g, |pm| {
        if basis.contains(&pm) {
            return ControlFlow::Continue(());
        }
        let mu = coords.of(&rational_indicator(&pm, m));
        for j in 0..mu.len() {
            if mu[j].is_zero() {
                continue;
            }
            let pivot = lambda[j].clone() / &mu[j];
            let swapped: Vec<Rational> = (0..mu.len())
                .map(|i| if i == j { pivot.clone() } else { &lambda[i] - &mu[i] * &pivot })
                .collect();
            if is_integral(&swapped) {
                winner = Some((j, pm));
                return ControlFlow::Break(());
            }
            let size = mu[j].abs();
            if size < Rational::one() && best.as_ref().is_none_or(|(b, _, _)| size < *b) {
                best = Some((size, j, pm.clone()));
            }
        }
        ControlFlow::Continue(())
    });
    let (j, pm) = winner
        .or(best.map(|(_, j, pm)| (j, pm)))
        .ok_or(SolverError::NoIntegralSolution)?;
    let mut next = basis.to_vec();
    next[j] = pm;
    Ok(next)
}

/// Matchings visited by [`matching_partition`] before it gives up.
pub const PARTITION_BUDGET: usize = 200_000;

/// Splits the edges into disjoint perfect matchings, if such a split is found
/// within [`PARTITION_BUDGET`] enumerated matchings. Each part gets coefficient 1.
pub fn matching_partition(g: &MultiGraph) -> Option<CoverSolution> {
    fn go(g: &MultiGraph, left: &mut Vec<bool>, parts: &mut Vec<Vec<EdgeId>>, budget: &mut usize) -> bool {
        let Some(first) = left.iter().position(|&b| b) else {
            return true;
        };
        let ids: Vec<EdgeId> = (0..left.len()).filter(|&i| left[i]).collect();
        let pairs: Vec<_> = ids.iter().map(|&i| (g.edge(i).u, g.edge(i).v)).collect();
        let sub = MultiGraph::new(g.vertex_count(), &pairs).expect("subgraph of a loopless graph");
        let mut found = Vec::new();
        let _ = for_each_pm(&sub, |pm| {
            if *budget == 0 {
                return ControlFlow::Break(());
            }
            *budget -= 1;
            // local id 0 is the lowest remaining edge
            if pm.contains(0) {
                found.push(pm.edges().iter().map(|&l| ids[l]).collect::<Vec<_>>());
            }
            ControlFlow::Continue(())
        });
        debug_assert!(found.iter().all(|p| p.contains(&first)));
        for part in found {
            for &e in &part {
                left[e] = false;
            }
            parts.push(part);
            if go(g, left, parts, budget) {
                return true;
            }
            for &e in &parts.pop().unwrap() {
                left[e] = true;
            }
            if *budget == 0 {
                return false;
            }
        }
        false
    }
    let mut left = vec![true; g.edge_count()];
    let mut parts = Vec::new();
    let mut budget = PARTITION_BUDGET;
    if g.edge_count() == 0 || !go(g, &mut left, &mut parts, &mut budget) {
        return None;
    }
    let terms = parts.into_iter().map(|edges| Term {
        matching: PerfectMatching::new(g, edges).expect("enumerated matching"),
        coeff: HalfInt::one(),
    });
    Some(CoverSolution::new(terms))
}

/// Like [`solve_leaf`], but a brick whose edges split into disjoint perfect
/// matchings is solved by that split, so no coefficient is negative.
pub fn solve_leaf_nonnegative(g: &MultiGraph, class: LeafClass) -> Result<CoverSolution, SolverError> {
    match class {
        LeafClass::OtherBrick => matching_partition(g).map_or_else(|| brick_solve(g), Ok),
        _ => solve_leaf(g, class),
    }
}

/// Dispatches on the leaf class.
pub fn solve_leaf(g: &MultiGraph, class: LeafClass) -> Result<CoverSolution, SolverError> {
    match class {
        LeafClass::Brace => brace_solve(g),
        LeafClass::PetersenBrick => petersen_solve(g),
        LeafClass::OtherBrick => brick_solve(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_of_k4_and_none_for_petersen() {
        let sol = matching_partition(&named::k4()).unwrap();
        assert_eq!(sol.terms().len(), 3);
        assert!(sol.covers_exactly_once(&named::k4()));
        assert!(matching_partition(&named::petersen()).is_none());
    }

    fn coeffs(sol: &CoverSolution) -> Vec<String> {
        sol.terms().iter().map(|t| t.coeff.to_string()).collect()
    }

    fn disjoint(sol: &CoverSolution, m: usize) -> bool {
        let mut seen = vec![false; m];
        sol.matchings().flat_map(|pm| pm.edges()).all(|&e| !std::mem::replace(&mut seen[e], true))
    }

    #[test]
    fn braces() {
        for g in [named::cycle(4), named::k33(), named::parallel_pair(3)] {
            let sol = brace_solve(&g).unwrap();
            let r = g.regular_degree().unwrap();
            assert_eq!(sol.len(), r);
            assert!(sol.terms().iter().all(|t| t.coeff == HalfInt::one()));
            assert!(sol.covers_exactly_once(&g));
            assert!(disjoint(&sol, g.edge_count()));
        }
        assert_eq!(brace_solve(&named::k4()), Err(SolverError::NotBipartite));
    }

    #[test]
    fn alpha_examples() {
        let half = HalfInt::half();
        assert_eq!(petersen_alpha(&named::petersen()).unwrap(), std::array::from_fn(|_| half.clone()));
        let one = HalfInt::one();
        assert_eq!(petersen_alpha(&named::petersen_scaled(2)).unwrap(), std::array::from_fn(|_| one.clone()));

        let canon = petersen_matchings();
        let mut c = vec![0usize; 15];
        for pm in &canon[..2] {
            for &k in pm.edges() {
                c[k] += 1;
            }
        }
        let alpha = alpha_from_multiplicities(&c).unwrap();
        let expected: Vec<HalfInt> = [1, 1, 0, 0, 0, 0].into_iter().map(HalfInt::from).collect();
        assert_eq!(alpha.to_vec(), expected);

        // the same weights on top of a doubled Petersen graph: alpha shifts by one
        let base = named::petersen_pairs();
        let mut pairs = named::petersen_scaled(2).pairs();
        for pm in &canon[..2] {
            pairs.extend(pm.edges().iter().map(|&k| base[k]));
        }
        let g = MultiGraph::new(10, &pairs).unwrap();
        let alpha = petersen_alpha(&g).unwrap();
        let expected: Vec<HalfInt> = [2, 2, 1, 1, 1, 1].into_iter().map(HalfInt::from).collect();
        assert_eq!(alpha.to_vec(), expected);
        let sol = petersen_solve(&g).unwrap();
        assert_eq!(coeffs(&sol), vec!["1"; 8]);
        assert!(disjoint(&sol, g.edge_count()) && sol.covers_exactly_once(&g));
    }

    #[test]
    fn alpha_odd_cut_inequality() {
        for k in 1..=3 {
            let g = named::petersen_scaled(k);
            let r = g.regular_degree().unwrap();
            let alpha = petersen_alpha(&g).unwrap();
            let total: HalfInt = alpha.iter().cloned().sum();
            for a in &alpha {
                let lhs = &total + &(a.clone() + a.clone() + a.clone() + a.clone());
                assert!(lhs >= HalfInt::integer(r));
            }
        }
    }

    #[test]
    fn petersen_solutions() {
        let p = named::petersen();
        let sol = petersen_solve(&p).unwrap();
        assert_eq!(sol.len(), 6);
        assert_eq!(sol.halves_count(), 6);
        assert!(sol.covers_exactly_once(&p) && sol.is_independent(15));

        let p2 = named::petersen_scaled(2);
        let sol = petersen_solve(&p2).unwrap();
        assert_eq!(coeffs(&sol), vec!["1"; 6]);
        assert!(disjoint(&sol, 30) && sol.covers_exactly_once(&p2));

        let p3 = named::petersen_scaled(3);
        let sol = petersen_solve(&p3).unwrap();
        assert_eq!(sol.halves_count(), 6);
        assert!(sol.covers_exactly_once(&p3) && sol.is_independent(45));
    }

    #[test]
    fn greedy_examples() {
        let k4 = greedy_basis(&named::k4()).unwrap();
        assert_eq!(k4.len(), 3);
        let prism = greedy_basis(&named::prism()).unwrap();
        assert!(prism.len() <= 4);
        assert_eq!(greedy_basis(&named::cycle(6)).unwrap().len(), 2);
        for (i, (_, e)) in prism.iter().enumerate() {
            assert!(prism[..i].iter().all(|(pm, _)| !pm.contains(*e)));
        }
    }

    #[test]
    fn brick_examples() {
        let k4 = named::k4();
        let sol = brick_solve(&k4).unwrap();
        assert_eq!(coeffs(&sol), ["1", "1", "1"]);

        let prism = named::prism();
        let sol = brick_solve(&prism).unwrap();
        assert!(sol.covers_exactly_once(&prism));
        assert_eq!(sol.len(), 3);
        assert!(sol.is_integral() && sol.is_independent(9));
        let rungs = [6, 7, 8];
        for pm in sol.matchings() {
            assert_eq!(pm.edges().iter().filter(|e| rungs.contains(e)).count(), 1);
        }

        let k4d = named::k4_doubled();
        let sol = brick_solve(&k4d).unwrap();
        assert!(sol.covers_exactly_once(&k4d) && sol.is_integral() && sol.is_independent(12));
        assert!(sol.len() <= 12 - 4 + 1);
    }
}
