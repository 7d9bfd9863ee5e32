//! Certificates and their independent verification.
//!
//! A certificate stores the graph, every term as an edge id list with twice
//! its coefficient, a summary of the decomposition tree and the verifier's
//! report. Integers are written as JSON numbers of arbitrary length.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cover::{CoverSolution, HalfInt, Term};
use crate::decomposition::{DecompositionTree, LeafClass};
use crate::graph::{EdgeId, MultiGraph};
use crate::matching::{matching_rank, PerfectMatching};
use crate::merge::{solve_r_graph, SolveError, SolveOptions};

mod bigint_json {
    use num_bigint::BigInt;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Number;

    pub fn serialize<S: Serializer>(value: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let number: Number = value
            .to_string()
            .parse()
            .map_err(serde::ser::Error::custom)?;
        number.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let number = Number::deserialize(d)?;
        number
            .to_string()
            .parse()
            .map_err(|_| D::Error::custom(format!("expected an integer, found {number}")))
    }
}

/// SHA-256 over the header `rgraph n m` followed by one `u v` line per edge.
pub fn fingerprint(g: &MultiGraph) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("rgraph {} {}\n", g.vertex_count(), g.edge_count()));
    for e in g.edges() {
        hasher.update(format!("{} {}\n", e.u, e.v));
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub edges: Vec<[usize; 2]>,
    pub fingerprint: String,
}

impl GraphRecord {
    pub fn of(g: &MultiGraph) -> Self {
        GraphRecord {
            n: g.vertex_count(),
            m: g.edge_count(),
            r: g.regular_degree().unwrap_or(0),
            edges: g.edges().iter().map(|e| [e.u, e.v]).collect(),
            fingerprint: fingerprint(g),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub edges: Vec<EdgeId>,
    #[serde(with = "bigint_json")]
    pub twice_value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafRecord {
    pub class: LeafClass,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSummary {
    pub leaves: Vec<LeafRecord>,
    pub p: usize,
}

impl TreeSummary {
    pub fn of(tree: &DecompositionTree) -> Self {
        let leaves = tree
            .leaves()
            .iter()
            .map(|leaf| LeafRecord {
                class: leaf.leaf_class().expect("leaf"),
                n: leaf.graph.vertex_count(),
                m: leaf.graph.edge_count(),
            })
            .collect();
        TreeSummary {
            leaves,
            p: tree.petersen_count(),
        }
    }

    /// `max (m - n + 1)` over the other-brick leaves, if there are any.
    pub fn brick_dimension(&self) -> Option<usize> {
        self.leaves
            .iter()
            .filter(|l| l.class == LeafClass::OtherBrick)
            .map(|l| l.m + 1 - l.n)
            .max()
    }
}

/// Every quantity is recomputed from the graph, the terms and the tree
/// summary. `support_bound_ok` and `norm_bound_ok` are advisory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub coverage_ok: bool,
    pub each_term_is_pm: bool,
    /// Every non-integral coefficient equals `+1/2`.
    pub fractional_ok: bool,
    pub halves_count: usize,
    pub halves_bound_ok: bool,
    pub support: usize,
    pub support_bound_ok: bool,
    pub independent: bool,
    #[serde(with = "bigint_json")]
    pub inf_norm_twice: BigInt,
    #[serde(with = "bigint_json")]
    pub norm_bound: BigInt,
    pub norm_bound_ok: bool,
    pub coeff_sum_is_r: bool,
}

impl VerifyReport {
    pub fn passes_mandatory(&self) -> bool {
        self.coverage_ok
            && self.each_term_is_pm
            && self.fractional_ok
            && self.halves_bound_ok
            && self.independent
            && self.coeff_sum_is_r
    }

    pub fn inf_norm(&self) -> HalfInt {
        HalfInt::from_twice(self.inf_norm_twice.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("term {term} references unknown edge {edge}")]
    UnknownEdge { term: usize, edge: EdgeId },
    #[error("term {term} has coefficient zero")]
    ZeroCoefficient { term: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("graph record is inconsistent: {0}")]
    BadGraph(String),
}

/// Checks the terms against every claim about the cover.
pub fn verify_cover(
    g: &MultiGraph,
    terms: &[TermRecord],
    summary: &TreeSummary,
) -> Result<VerifyReport, CertificateError> {
    let m = g.edge_count();
    for (term, t) in terms.iter().enumerate() {
        if let Some(&edge) = t.edges.iter().find(|&&e| e >= m) {
            return Err(CertificateError::UnknownEdge { term, edge });
        }
    }
    let matchings: Vec<Option<PerfectMatching>> = terms
        .iter()
        .map(|t| PerfectMatching::new(g, t.edges.clone()).ok())
        .collect();
    let each_term_is_pm = matchings.iter().all(Option::is_some);

    let mut acc = vec![BigInt::zero(); m];
    for t in terms {
        for &e in &t.edges {
            acc[e] += &t.twice_value;
        }
    }
    let two = BigInt::from(2);
    let coverage_ok = acc.iter().all(|c| *c == two);

    let halves_count = terms.iter().filter(|t| t.twice_value.bit(0)).count();
    let fractional_ok = terms
        .iter()
        .all(|t| !t.twice_value.bit(0) || t.twice_value.is_one());

    let pms: Vec<PerfectMatching> = matchings.into_iter().flatten().collect();
    let independent = each_term_is_pm && matching_rank(m, &pms) == terms.len();

    let support = terms.len();
    let n = g.vertex_count();
    let inf_norm_twice = terms
        .iter()
        .map(|t| t.twice_value.abs())
        .max()
        .unwrap_or_default();
    let norm_bound = match summary.brick_dimension() {
        Some(d) => BigInt::one() << d,
        None => BigInt::one(),
    };
    let coeff_sum: BigInt = terms.iter().map(|t| &t.twice_value).sum();
    let coeff_sum_is_r = match g.regular_degree() {
        Some(r) => coeff_sum == BigInt::from(2 * r),
        None => false,
    };
    Ok(VerifyReport {
        coverage_ok,
        each_term_is_pm,
        fractional_ok,
        halves_count,
        halves_bound_ok: halves_count <= 6 * summary.p,
        support,
        support_bound_ok: support + n <= m + 1,
        independent,
        norm_bound_ok: inf_norm_twice <= &norm_bound * 2,
        inf_norm_twice,
        norm_bound,
        coeff_sum_is_r,
    })
}

pub fn term_records(sol: &CoverSolution) -> Vec<TermRecord> {
    sol.terms()
        .iter()
        .map(|t| TermRecord {
            edges: t.matching.edges().to_vec(),
            twice_value: t.coeff.twice().clone(),
        })
        .collect()
}

/// Convenience wrapper over [`verify_cover`] for an in-memory solution.
pub fn verify_solution(g: &MultiGraph, sol: &CoverSolution, tree: &DecompositionTree) -> VerifyReport {
    verify_cover(g, &term_records(sol), &TreeSummary::of(tree)).expect("solution edges belong to g")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub graph: GraphRecord,
    pub terms: Vec<TermRecord>,
    pub tree: TreeSummary,
    pub report: VerifyReport,
}

impl Certificate {
    pub fn new(g: &MultiGraph, sol: &CoverSolution, tree: &DecompositionTree) -> Self {
        let terms = term_records(sol);
        let summary = TreeSummary::of(tree);
        let report = verify_cover(g, &terms, &summary).expect("solution edges belong to g");
        Certificate {
            graph: GraphRecord::of(g),
            terms,
            tree: summary,
            report,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    /// Parses and validates a certificate.
    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let cert: Certificate = serde_json::from_str(text).map_err(|e| CertificateError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cert.validate()?;
        Ok(cert)
    }

    fn validate(&self) -> Result<(), CertificateError> {
        let g = &self.graph;
        if g.edges.len() != g.m {
            return Err(CertificateError::BadGraph(format!(
                "m = {} but {} edges listed",
                g.m,
                g.edges.len()
            )));
        }
        for (term, t) in self.terms.iter().enumerate() {
            if t.twice_value.is_zero() {
                return Err(CertificateError::ZeroCoefficient { term });
            }
            if let Some(&edge) = t.edges.iter().find(|&&e| e >= g.m) {
                return Err(CertificateError::UnknownEdge { term, edge });
            }
        }
        Ok(())
    }

    /// The graph stored in the certificate.
    pub fn graph(&self) -> Result<MultiGraph, CertificateError> {
        let pairs: Vec<(usize, usize)> = self.graph.edges.iter().map(|&[u, v]| (u, v)).collect();
        MultiGraph::new(self.graph.n, &pairs).map_err(|e| CertificateError::BadGraph(e.to_string()))
    }

    /// Terms as a solution over `g`, if every term is a perfect matching.
    pub fn solution(&self, g: &MultiGraph) -> Option<CoverSolution> {
        let terms: Option<Vec<Term>> = self
            .terms
            .iter()
            .map(|t| {
                PerfectMatching::new(g, t.edges.clone()).ok().map(|matching| Term {
                    matching,
                    coeff: HalfInt::from_twice(t.twice_value.clone()),
                })
            })
            .collect();
        terms.map(CoverSolution::new)
    }
}

/// Solves `g` and packages the result.
pub fn certify(g: &MultiGraph, opts: SolveOptions) -> Result<Certificate, SolveError> {
    let (sol, tree) = solve_r_graph(g, opts)?;
    Ok(Certificate::new(g, &sol, &tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn petersen_certificate() {
        let g = named::petersen();
        let cert = certify(&g, SolveOptions::default()).unwrap();
        let r = &cert.report;
        assert!(r.passes_mandatory());
        assert_eq!((r.halves_count, cert.tree.p, r.support), (6, 1, 6));
        assert!(r.support_bound_ok && r.norm_bound_ok);
        assert_eq!(r.inf_norm(), HalfInt::half());
        assert!(cert.terms.iter().all(|t| t.twice_value == BigInt::one()));
    }

    #[test]
    fn k4_certificate_and_tampering() {
        let g = named::k4();
        let mut cert = certify(&g, SolveOptions::default()).unwrap();
        assert!(cert.report.passes_mandatory());
        assert_eq!((cert.report.halves_count, cert.report.support), (0, 3));
        assert_eq!(cert.report.inf_norm(), HalfInt::one());

        cert.terms[0].twice_value = BigInt::from(4);
        let report = verify_cover(&g, &cert.terms, &cert.tree).unwrap();
        assert!(!report.coverage_ok && !report.passes_mandatory());
    }

    #[test]
    fn forged_terms_are_caught() {
        let g = named::cycle(4);
        let summary = TreeSummary { leaves: vec![], p: 0 };
        let terms = vec![TermRecord { edges: vec![0, 1], twice_value: BigInt::from(2) }];
        let report = verify_cover(&g, &terms, &summary).unwrap();
        assert!(!report.each_term_is_pm && !report.coverage_ok);

        let halves = vec![
            TermRecord { edges: vec![0, 2], twice_value: BigInt::one() },
            TermRecord { edges: vec![0, 2], twice_value: BigInt::one() },
            TermRecord { edges: vec![1, 3], twice_value: BigInt::from(2) },
        ];
        let report = verify_cover(&g, &halves, &summary).unwrap();
        assert!(report.coverage_ok && !report.independent && !report.halves_bound_ok);

        let bad = vec![TermRecord { edges: vec![9], twice_value: BigInt::one() }];
        assert_eq!(
            verify_cover(&g, &bad, &summary),
            Err(CertificateError::UnknownEdge { term: 0, edge: 9 })
        );
    }

    #[test]
    fn round_trip_and_parse_errors() {
        let g = named::petersen();
        let cert = certify(&g, SolveOptions::default()).unwrap();
        let text = cert.to_json();
        assert_eq!(Certificate::from_json(&text).unwrap(), cert);
        assert_eq!(cert.graph().unwrap(), g);
        assert_eq!(cert.graph.fingerprint, fingerprint(&g));

        let truncated = &text[..text.len() / 2];
        assert!(matches!(Certificate::from_json(truncated), Err(CertificateError::Parse { .. })));

        let zero = text.replacen("\"twice_value\": 1", "\"twice_value\": 0", 1);
        assert_eq!(
            Certificate::from_json(&zero),
            Err(CertificateError::ZeroCoefficient { term: 0 })
        );
        let float = text.replacen("\"twice_value\": 1", "\"twice_value\": 1.5", 1);
        assert!(matches!(Certificate::from_json(&float), Err(CertificateError::Parse { .. })));
    }

    #[test]
    fn big_coefficients_survive_json() {
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let t = TermRecord { edges: vec![0], twice_value: huge.clone() };
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains("123456789012345678901234567890"));
        let back: TermRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.twice_value, huge);
    }
}
