//! Small named graphs used throughout the test corpus and the CLI examples.

use crate::graph::MultiGraph;

/// Petersen graph: outer cycle 0..5, spokes `i -- i+5`, inner pentagram.
pub fn petersen() -> MultiGraph {
    MultiGraph::new(10, &petersen_pairs()).unwrap()
}

pub fn petersen_pairs() -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(15);
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
    }
    for i in 0..5 {
        pairs.push((i, i + 5));
    }
    for i in 0..5 {
        pairs.push((i + 5, (i + 2) % 5 + 5));
    }
    pairs
}

/// Petersen graph with every edge repeated `k` times. Copies of pair `p` get
/// ids `p, p + 15, p + 30, ...`.
pub fn petersen_scaled(k: usize) -> MultiGraph {
    let base = petersen_pairs();
    let pairs: Vec<_> = (0..k).flat_map(|_| base.iter().copied()).collect();
    MultiGraph::new(10, &pairs).unwrap()
}

/// Cycle `0 - 1 - ... - (n-1) - 0`; edge `i` joins `i` and `i+1 mod n`.
pub fn cycle(n: usize) -> MultiGraph {
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    MultiGraph::new(n, &pairs).unwrap()
}

pub fn k4() -> MultiGraph {
    MultiGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// K4 with each edge doubled; the copies of edge `i` are `i` and `i + 6`.
pub fn k4_doubled() -> MultiGraph {
    let base = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let pairs: Vec<_> = base.iter().chain(base.iter()).copied().collect();
    MultiGraph::new(4, &pairs).unwrap()
}

/// Triangular prism: triangles {0,1,2} and {3,4,5}, rungs `i -- i+3`.
pub fn prism() -> MultiGraph {
    MultiGraph::new(
        6,
        &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
    )
    .unwrap()
}

/// K_{3,3} with sides {0,1,2} and {3,4,5}.
pub fn k33() -> MultiGraph {
    let mut pairs = Vec::new();
    for a in 0..3 {
        for b in 3..6 {
            pairs.push((a, b));
        }
    }
    MultiGraph::new(6, &pairs).unwrap()
}

/// Two vertices joined by `r` parallel edges.
pub fn parallel_pair(r: usize) -> MultiGraph {
    MultiGraph::new(2, &vec![(0, 1); r]).unwrap()
}

/// Cubic graph with a bridge: two copies of K4 with one edge subdivided,
/// the subdivision vertices joined by the bridge.
pub fn bridged_cubic() -> MultiGraph {
    let half = |o: usize| {
        vec![
            (o, o + 4),
            (o + 4, o + 1),
            (o, o + 2),
            (o, o + 3),
            (o + 1, o + 2),
            (o + 1, o + 3),
            (o + 2, o + 3),
        ]
    };
    let mut pairs = half(0);
    pairs.extend(half(5));
    pairs.push((4, 9));
    MultiGraph::new(10, &pairs).unwrap()
}

/// K4 spliced with K3,3 along a 3-edge tight cut: triangle {0,1,2}, one
/// side {3,4} and the other {5,6,7} of the bipartite part, with the cut
/// edges `0-5`, `1-6`, `2-7`.
pub fn k4_k33_splice() -> MultiGraph {
    MultiGraph::new(
        8,
        &[
            (0, 1),
            (1, 2),
            (2, 0),
            (0, 5),
            (1, 6),
            (2, 7),
            (3, 5),
            (3, 6),
            (3, 7),
            (4, 5),
            (4, 6),
            (4, 7),
        ],
    )
    .unwrap()
}

/// Joins `a - va` and `b - vb` by matching the edges that left `va` with the
/// edges that left `vb`, in incidence order. Vertices of `a` come first.
/// Both vertices must have the same degree.
pub fn splice(a: &MultiGraph, va: usize, b: &MultiGraph, vb: usize) -> MultiGraph {
    assert_eq!(a.degree(va), b.degree(vb), "splice needs equal degrees");
    let shift = |v: usize, skip: usize| if v > skip { v - 1 } else { v };
    let offset = a.vertex_count() - 1;
    let mut pairs = Vec::new();
    for e in a.edges().iter().filter(|e| !e.touches(va)) {
        pairs.push((shift(e.u, va), shift(e.v, va)));
    }
    for e in b.edges().iter().filter(|e| !e.touches(vb)) {
        pairs.push((offset + shift(e.u, vb), offset + shift(e.v, vb)));
    }
    let ends_a = a.incident(va).iter().map(|&id| shift(a.edge(id).other(va), va));
    let ends_b = b.incident(vb).iter().map(|&id| offset + shift(b.edge(id).other(vb), vb));
    pairs.extend(ends_a.zip(ends_b));
    MultiGraph::new(offset + b.vertex_count() - 1, &pairs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, LeafClass};

    #[test]
    fn splices() {
        // the 3-cut of a Petersen/K4 splice is not tight: Petersen minus a
        // closed neighbourhood is a hexagon, so some matching crosses 3 times
        let pk = splice(&petersen(), 0, &k4(), 0);
        assert_eq!((pk.vertex_count(), pk.edge_count()), (12, 18));
        assert_eq!(pk.r_graph_check().r, Some(3));
        let tree = decompose(&pk).unwrap();
        assert_eq!(tree.leaf_class(), Some(LeafClass::OtherBrick));

        // against a bipartite side the cut is tight
        let pb = splice(&petersen(), 0, &k33(), 0);
        let tree = decompose(&pb).unwrap();
        assert_eq!(tree.petersen_count(), 1);
        assert_eq!(tree.count(LeafClass::Brace), 1);

        let ppb = splice(&pb, 9, &petersen(), 4);
        assert!(ppb.r_graph_check().ok);
        assert_eq!(decompose(&ppb).unwrap().petersen_count(), 2);
    }
}
