//! Half-integer scalars and solutions of `A x = 1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::graph::MultiGraph;
use crate::linalg::Rational;
use crate::matching::{matching_rank, PerfectMatching};

/// A number of the form `k / 2`, stored as the integer `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HalfInt {
    twice: BigInt,
}

impl HalfInt {
    pub fn from_twice(twice: impl Into<BigInt>) -> Self {
        HalfInt {
            twice: twice.into(),
        }
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        HalfInt {
            twice: value.into() * 2,
        }
    }

    pub fn half() -> Self {
        HalfInt::from_twice(1)
    }

    pub fn one() -> Self {
        HalfInt::from_twice(2)
    }

    pub fn zero() -> Self {
        HalfInt::from_twice(0)
    }

    /// Exact conversion from a rational with denominator 1 or 2.
    pub fn from_rational(q: &Rational) -> Option<Self> {
        match q.denom() {
            d if d.is_one() => Some(HalfInt::integer(q.numer().clone())),
            d if *d == BigInt::from(2) => Some(HalfInt::from_twice(q.numer().clone())),
            _ => None,
        }
    }

    pub fn twice(&self) -> &BigInt {
        &self.twice
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.twice.clone(), BigInt::from(2))
    }

    pub fn is_zero(&self) -> bool {
        self.twice.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.twice.is_even()
    }

    /// Exactly `+1/2`.
    pub fn is_plus_half(&self) -> bool {
        self.twice.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.twice.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.twice.is_negative()
    }

    pub fn abs(&self) -> Self {
        HalfInt::from_twice(self.twice.abs())
    }

    /// Integer value, if integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| &self.twice / 2)
    }
}

impl Ord for HalfInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.twice.cmp(&other.twice)
    }
}

impl PartialOrd for HalfInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl<'a> Add<&'a HalfInt> for &'a HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: &HalfInt) -> HalfInt {
        HalfInt::from_twice(&self.twice + &rhs.twice)
    }
}

impl AddAssign<&HalfInt> for HalfInt {
    fn add_assign(&mut self, rhs: &HalfInt) {
        self.twice += &rhs.twice;
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl<'a> Sub<&'a HalfInt> for &'a HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: &HalfInt) -> HalfInt {
        HalfInt::from_twice(&self.twice - &rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::zero(), |a, b| a + b)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", &self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl From<i64> for HalfInt {
    fn from(v: i64) -> Self {
        HalfInt::integer(v)
    }
}

/// One perfect matching with its coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub matching: PerfectMatching,
    pub coeff: HalfInt,
}

/// A combination of perfect matchings with nonzero half-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverSolution {
    terms: Vec<Term>,
}

impl CoverSolution {
    /// Drops zero coefficients and merges identical matchings (first
    /// occurrence keeps its position).
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut order: Vec<PerfectMatching> = Vec::new();
        let mut sums: BTreeMap<PerfectMatching, HalfInt> = BTreeMap::new();
        for t in terms {
            match sums.get_mut(&t.matching) {
                Some(c) => *c += &t.coeff,
                None => {
                    order.push(t.matching.clone());
                    sums.insert(t.matching, t.coeff);
                }
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|m| {
                let coeff = sums.remove(&m).unwrap();
                (!coeff.is_zero()).then_some(Term { matching: m, coeff })
            })
            .collect();
        CoverSolution { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `A x` for a host graph with `m` edges.
    pub fn coverage(&self, m: usize) -> Vec<HalfInt> {
        let mut acc = vec![HalfInt::zero(); m];
        for t in &self.terms {
            for &e in t.matching.edges() {
                acc[e] += &t.coeff;
            }
        }
        acc
    }

    /// Every edge of `g` is covered with total weight exactly one.
    pub fn covers_exactly_once(&self, g: &MultiGraph) -> bool {
        let one = HalfInt::one();
        self.terms
            .iter()
            .all(|t| t.matching.edges().iter().all(|&e| e < g.edge_count()))
            && self.coverage(g.edge_count()).iter().all(|c| *c == one)
    }

    pub fn support(&self) -> usize {
        self.terms.len()
    }

    pub fn halves_count(&self) -> usize {
        self.terms.iter().filter(|t| !t.coeff.is_integer()).count()
    }

    /// All entries are integers or exactly `+1/2`.
    pub fn is_half_integral(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.coeff.is_integer() || t.coeff.is_plus_half())
    }

    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_integer())
    }

    pub fn inf_norm(&self) -> HalfInt {
        self.terms
            .iter()
            .map(|t| t.coeff.abs())
            .max()
            .unwrap_or_else(HalfInt::zero)
    }

    pub fn coeff_sum(&self) -> HalfInt {
        self.terms.iter().map(|t| t.coeff.clone()).sum()
    }

    /// Incidence vectors of the used matchings are linearly independent.
    pub fn is_independent(&self, m: usize) -> bool {
        let pms: Vec<_> = self.terms.iter().map(|t| t.matching.clone()).collect();
        matching_rank(m, &pms) == pms.len()
    }

    pub fn matchings(&self) -> impl Iterator<Item = &PerfectMatching> {
        self.terms.iter().map(|t| &t.matching)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    #[test]
    fn halfint_arithmetic_and_display() {
        let h = HalfInt::half();
        assert_eq!((&h + &h), HalfInt::one());
        assert_eq!(h.to_string(), "1/2");
        assert_eq!(HalfInt::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInt::integer(-2).to_string(), "-2");
        assert!(HalfInt::from_twice(3) > HalfInt::one());
        assert!(h.is_plus_half() && !HalfInt::from_twice(-1).is_plus_half());
        assert_eq!(
            HalfInt::from_rational(&Rational::new(3.into(), 6.into())),
            Some(HalfInt::half())
        );
        assert_eq!(HalfInt::from_rational(&Rational::new(1.into(), 4.into())), None);
    }

    #[test]
    fn new_merges_duplicates_and_drops_zeros() {
        let g = named::cycle(4);
        let a = PerfectMatching::new(&g, vec![0, 2]).unwrap();
        let b = PerfectMatching::new(&g, vec![1, 3]).unwrap();
        let sol = CoverSolution::new([
            Term { matching: a.clone(), coeff: HalfInt::half() },
            Term { matching: b.clone(), coeff: HalfInt::from(2) },
            Term { matching: a.clone(), coeff: HalfInt::half() },
            Term { matching: b.clone(), coeff: HalfInt::from(-1) },
        ]);
        assert_eq!(sol.len(), 2);
        assert!(sol.covers_exactly_once(&g));
        assert!(sol.is_independent(4));
        assert_eq!(sol.coeff_sum(), HalfInt::from(2));

        let cancelled = CoverSolution::new([
            Term { matching: a.clone(), coeff: HalfInt::from(1) },
            Term { matching: a, coeff: HalfInt::from(-1) },
        ]);
        assert!(cancelled.is_empty());
    }
}
