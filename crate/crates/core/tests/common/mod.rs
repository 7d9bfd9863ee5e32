//! Brute-force oracles written without the library's matching, cut or
//! linear algebra code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pmcover_core::generate::random_r_graph;
use pmcover_core::MultiGraph;

/// Every perfect matching as a sorted edge id list: the lowest free vertex
/// is matched through each of its edges in turn.
pub fn all_perfect_matchings(g: &MultiGraph) -> Vec<Vec<usize>> {
    fn go(g: &MultiGraph, used: &mut Vec<bool>, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = g.vertex_count();
        if chosen.len() * 2 == n {
            let mut pm = chosen.clone();
            pm.sort_unstable();
            out.push(pm);
            return;
        }
        let free = (0..n).find(|&v| !used[v]).unwrap();
        for id in 0..g.edge_count() {
            let e = g.edge(id);
            if used[e.u] || used[e.v] || (e.u != free && e.v != free) {
                continue;
            }
            used[e.u] = true;
            used[e.v] = true;
            chosen.push(id);
            go(g, used, chosen, out);
            chosen.pop();
            used[e.u] = false;
            used[e.v] = false;
        }
    }
    let mut out = Vec::new();
    if g.vertex_count().is_multiple_of(2) {
        go(g, &mut vec![false; g.vertex_count()], &mut Vec::new(), &mut out);
    }
    out
}

/// Shores as bitmasks containing vertex 0 with an odd number of vertices.
pub fn odd_masks(n: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << n)).filter(move |s| s & 1 == 1 && s.count_ones() % 2 == 1 && (s.count_ones() as usize) < n)
}

pub fn mask_to_shore(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

pub fn crossing(g: &MultiGraph, mask: u32, edges: &[usize]) -> usize {
    edges
        .iter()
        .filter(|&&id| {
            let e = g.edge(id);
            (mask >> e.u & 1) != (mask >> e.v & 1)
        })
        .count()
}

pub fn cut_size(g: &MultiGraph, mask: u32) -> usize {
    crossing(g, mask, &(0..g.edge_count()).collect::<Vec<_>>())
}

/// Every matching crosses the shore exactly once.
pub fn tight_by_definition(g: &MultiGraph, mask: u32, pms: &[Vec<usize>]) -> bool {
    pms.iter().all(|pm| crossing(g, mask, pm) == 1)
}

/// Some odd shore with at least three vertices on each side is tight.
pub fn has_nontrivial_tight_cut(g: &MultiGraph, pms: &[Vec<usize>]) -> bool {
    let n = g.vertex_count();
    odd_masks(n)
        .filter(|s| s.count_ones() >= 3 && n - s.count_ones() as usize >= 3)
        .any(|s| tight_by_definition(g, s, pms))
}

pub fn brute_min_odd_cut(g: &MultiGraph) -> usize {
    odd_masks(g.vertex_count()).map(|s| cut_size(g, s)).min().unwrap()
}

/// Rank over the rationals by plain Gaussian elimination.
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = rows[i][c].clone() / &rows[rank][c];
                for k in c..cols {
                    let delta = &f * &rows[rank][k];
                    rows[i][k] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn indicator(edges: &[usize], m: usize) -> Vec<i64> {
    let mut v = vec![0; m];
    for &e in edges {
        v[e] = 1;
    }
    v
}

/// Per-edge sums of `coeffs[k] * terms[k]` all equal one.
pub fn covers_exactly(m: usize, terms: &[(Vec<usize>, BigRational)]) -> bool {
    let mut acc = vec![BigRational::zero(); m];
    for (edges, c) in terms {
        for &e in edges {
            acc[e] += c;
        }
    }
    acc.iter().all(|x| x.is_one())
}

pub struct Instance {
    pub label: String,
    pub n: usize,
    pub r: usize,
    pub graph: MultiGraph,
}

impl Instance {
    fn new(label: impl Into<String>, graph: MultiGraph) -> Self {
        Instance {
            label: label.into(),
            n: graph.vertex_count(),
            r: graph.regular_degree().expect("regular"),
            graph,
        }
    }
}

pub const ORDERS: [usize; 6] = [4, 6, 8, 10, 12, 14];
pub const DEGREES: [usize; 4] = [2, 3, 4, 5];
pub const SEEDS_PER_CELL: u64 = 9;

/// The seeded random corpus: 6 orders x 4 degrees x 9 seeds.
pub fn generated() -> Vec<Instance> {
    let mut out = Vec::new();
    for &n in &ORDERS {
        for &r in &DEGREES {
            for k in 0..SEEDS_PER_CELL {
                let seed = (n as u64) * 1000 + (r as u64) * 100 + k;
                let graph = random_r_graph(n, r, seed).expect("generator");
                out.push(Instance::new(format!("gen n={n} r={r} seed={seed}"), graph));
            }
        }
    }
    out
}

/// Every edge repeated `k` times; copies of edge `i` get ids `i`, `i + m`, ...
pub fn repeat(g: &MultiGraph, k: usize) -> MultiGraph {
    let pairs = g.pairs();
    let all: Vec<_> = (0..k).flat_map(|_| pairs.iter().copied()).collect();
    MultiGraph::new(g.vertex_count(), &all).unwrap()
}

/// Hand-built instances with Petersen bricks, parallel edges and mixed
/// leaf classes, which random unions of matchings rarely produce.
pub fn named_instances() -> Vec<Instance> {
    use pmcover_core::named::*;
    let pb = splice(&petersen(), 0, &k33(), 0);
    vec![
        Instance::new("petersen", petersen()),
        Instance::new("petersen x2", petersen_scaled(2)),
        Instance::new("petersen x3", petersen_scaled(3)),
        Instance::new("k4", k4()),
        Instance::new("k4 x2", k4_doubled()),
        Instance::new("prism", prism()),
        Instance::new("k33", k33()),
        Instance::new("c6", cycle(6)),
        Instance::new("parallel pair 3", parallel_pair(3)),
        Instance::new("k4|k33", k4_k33_splice()),
        Instance::new("petersen|k4", splice(&petersen(), 0, &k4(), 0)),
        Instance::new("petersen|petersen", splice(&petersen(), 0, &petersen(), 0)),
        Instance::new("petersen|k33|petersen", splice(&pb, 9, &petersen(), 4)),
        Instance::new("petersen|k33|k4", splice(&pb, 9, &k4(), 0)),
        Instance::new("petersen|k33|brick", splice(&pb, 9, &random_r_graph(10, 3, 0).unwrap(), 2)),
        Instance::new("petersen|k33", pb),
        Instance::new("petersen x3|k33 x3", splice(&petersen_scaled(3), 0, &repeat(&k33(), 3), 0)),
        Instance::new("k4 x2|k33 x2", splice(&k4_doubled(), 0, &repeat(&k33(), 2), 0)),
        Instance::new("prism x2|k33 x2", splice(&repeat(&prism(), 2), 0, &repeat(&k33(), 2), 0)),
    ]
}
