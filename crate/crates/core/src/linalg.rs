//! Exact linear algebra over the rationals and the integers.
//!
//! Elimination is fraction-free (Bareiss) on integer-scaled rows; rational
//! arithmetic only appears in the final back substitution. Lattice membership
//! uses a column Hermite normal form with the unimodular transform recorded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: matrix has {rows} rows, right-hand side has {rhs}")]
    DimensionMismatch { rows: usize, rhs: usize },
}

/// Dense row-major matrix with entries of type `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<Rational>;
pub type IntMatrix = Matrix<BigInt>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * &other[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    /// Determinant of a square matrix (fraction-free elimination).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let ech = bareiss(rows, self.cols);
        if ech.pivots.len() < self.rows {
            return BigInt::zero();
        }
        let last = &ech.rows[self.rows - 1][self.cols - 1];
        if ech.swaps % 2 == 1 {
            -last.clone()
        } else {
            last.clone()
        }
    }
}

impl RatMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        IntMatrix::from_i64_rows(rows).to_rational()
    }
}

/// Integer row-echelon form produced by Bareiss elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    /// `(row, column)` of each pivot, in order.
    pivots: Vec<(usize, usize)>,
    swaps: usize,
}

/// Fraction-free forward elimination over the first `elim_cols` columns; any
/// further columns (an augmented right-hand side) are carried along.
fn bareiss(mut a: Vec<Vec<BigInt>>, elim_cols: usize) -> Echelon {
    let nrows = a.len();
    let width = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..elim_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        for i in (r + 1)..nrows {
            for j in (c + 1)..width {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    Echelon {
        rows: a,
        pivots,
        swaps,
    }
}

/// Scales a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

pub fn rank(m: &RatMatrix) -> usize {
    let rows = (0..m.rows()).map(|i| integer_row(m.row(i))).collect();
    bareiss(rows, m.cols()).pivots.len()
}

pub fn int_rank(m: &IntMatrix) -> usize {
    let rows = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    bareiss(rows, m.cols()).pivots.len()
}

/// A particular solution and a basis of the nullspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSolution {
    pub particular: Vec<Rational>,
    pub nullspace: Vec<Vec<Rational>>,
}

/// Solves `m x = b` exactly. `Ok(None)` when the system is inconsistent.
pub fn rational_solve(
    m: &RatMatrix,
    b: &[Rational],
) -> Result<Option<RationalSolution>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            rows: m.rows(),
            rhs: b.len(),
        });
    }
    let cols = m.cols();
    let rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(b[i].clone());
            integer_row(&row)
        })
        .collect();
    let ech = bareiss(rows, cols);
    let rank = ech.pivots.len();
    if ech.rows[rank..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(None);
    }

    // Reduced row echelon form over the rationals.
    let mut red: Vec<Vec<Rational>> = ech.rows[..rank]
        .iter()
        .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for (k, &(_, c)) in ech.pivots.iter().enumerate().rev() {
        let inv = red[k][c].recip();
        for x in red[k].iter_mut() {
            *x *= &inv;
        }
        for i in 0..k {
            let f = red[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for j in c..=cols {
                let delta = &f * &red[k][j];
                red[i][j] -= delta;
            }
        }
    }

    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut particular = vec![Rational::zero(); cols];
    for (k, &c) in pivot_cols.iter().enumerate() {
        particular[c] = red[k][cols].clone();
    }
    let mut nullspace = Vec::new();
    for f in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[f] = Rational::one();
        for (k, &c) in pivot_cols.iter().enumerate() {
            v[c] = -red[k][f].clone();
        }
        nullspace.push(v);
    }
    Ok(Some(RationalSolution {
        particular,
        nullspace,
    }))
}

/// Column Hermite normal form `h = m * u` with `u` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// `(row, column)` of each staircase pivot; pivot columns are `0..len`.
    pub pivots: Vec<(usize, usize)>,
}

/// Column-style HNF. Rows are processed top to bottom; within a row the
/// remaining columns are reduced by Euclidean column operations, always
/// pivoting on the minimal nonzero absolute value (lowest column on ties).
/// Pivots are made positive and entries left of a pivot are reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> HermiteForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    let mut pivots = Vec::new();
    let mut k = 0;

    // col_j -= q * col_src, applied to both h and u
    let axpy = |mat: &mut IntMatrix, j: usize, src: usize, q: &BigInt| {
        for i in 0..mat.rows() {
            let delta = q * &mat[(i, src)];
            if !delta.is_zero() {
                mat[(i, j)] -= delta;
            }
        }
    };

    for i in 0..rows {
        if k == cols {
            break;
        }
        loop {
            let best = (k..cols)
                .filter(|&j| !h[(i, j)].is_zero())
                .min_by(|&a, &b| h[(i, a)].abs().cmp(&h[(i, b)].abs()).then(a.cmp(&b)));
            let Some(p) = best else { break };
            h.swap_columns(p, k);
            u.swap_columns(p, k);
            let mut done = true;
            for j in (k + 1)..cols {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = h[(i, j)].div_floor(&h[(i, k)]);
                axpy(&mut h, j, k, &q);
                axpy(&mut u, j, k, &q);
                if !h[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(i, k)].is_zero() {
            continue;
        }
        if h[(i, k)].is_negative() {
            for r in 0..rows {
                h[(r, k)] = -h[(r, k)].clone();
            }
            for r in 0..cols {
                u[(r, k)] = -u[(r, k)].clone();
            }
        }
        for j in 0..k {
            let q = h[(i, j)].div_floor(&h[(i, k)]);
            if !q.is_zero() {
                axpy(&mut h, j, k, &q);
                axpy(&mut u, j, k, &q);
            }
        }
        pivots.push((i, k));
        k += 1;
    }
    HermiteForm { h, u, pivots }
}

/// Integer solution of `m x = b`, if `b` lies in the lattice spanned by the
/// columns of `m`. Any returned vector has been checked by multiplication.
pub fn hnf_solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length");
    let form = hermite_normal_form(m);
    let mut y = vec![BigInt::zero(); m.cols()];
    for &(i, k) in &form.pivots {
        let mut rem = b[i].clone();
        for (j, yj) in y.iter().enumerate().take(k) {
            rem -= &form.h[(i, j)] * yj;
        }
        let (q, r) = rem.div_rem(&form.h[(i, k)]);
        if !r.is_zero() {
            return None;
        }
        y[k] = q;
    }
    if form.h.mul_vec(&y) != b {
        return None;
    }
    let x = form.u.mul_vec(&y);
    (m.mul_vec(&x) == b).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn solve_identity() {
        let m = RatMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1]]);
        let s = rational_solve(&m, &[q(1), q(1)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![q(1), q(1)]);
        assert!(s.nullspace.is_empty());
    }

    #[test]
    fn solve_underdetermined() {
        let m = RatMatrix::from_i64_rows(&[vec![1, 1]]);
        let s = rational_solve(&m, &[q(3)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![q(3), q(0)]);
        assert_eq!(s.nullspace, vec![vec![q(-1), q(1)]]);
    }

    #[test]
    fn solve_inconsistent_and_mismatch() {
        let m = RatMatrix::from_i64_rows(&[vec![1], vec![1]]);
        assert_eq!(rational_solve(&m, &[q(0), q(1)]).unwrap(), None);
        assert!(matches!(
            rational_solve(&m, &[q(0)]),
            Err(LinalgError::DimensionMismatch { rows: 2, rhs: 1 })
        ));
    }

    #[test]
    fn solve_with_fractions() {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let m = RatMatrix::from_rows(vec![vec![half.clone(), q(1)], vec![q(0), q(3)]]);
        let s = rational_solve(&m, &[q(2), q(3)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![q(2), q(1)]);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&RatMatrix::from_i64_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])), 3);
        assert_eq!(rank(&RatMatrix::from_i64_rows(&[vec![1, 1], vec![1, 1]])), 1);
        assert_eq!(rank(&RatMatrix::zeros(3, 2)), 0);
    }

    #[test]
    fn hnf_scalar_cases() {
        let m = IntMatrix::from_i64_rows(&[vec![2]]);
        assert_eq!(hnf_solve(&m, &ints(&[2])), Some(ints(&[1])));
        assert_eq!(hnf_solve(&m, &ints(&[1])), None);
    }

    #[test]
    fn hnf_k4_matchings() {
        // edges 01 02 03 12 13 23; matchings {01,23} {02,13} {03,12}
        let m = IntMatrix::from_i64_rows(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![0, 0, 1],
            vec![0, 1, 0],
            vec![1, 0, 0],
        ]);
        assert_eq!(hnf_solve(&m, &ints(&[1; 6])), Some(ints(&[1, 1, 1])));
    }

    #[test]
    fn determinant_small() {
        let m = IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.determinant(), BigInt::from(-1));
        let m = IntMatrix::from_i64_rows(&[vec![2, 3, 1], vec![4, 1, 0], vec![0, 5, 7]]);
        // 2(7) - 3(28) + 1(20)
        assert_eq!(m.determinant(), BigInt::from(14 - 84 + 20));
    }

    fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
        })
    }

    fn box_search(m: &IntMatrix, b: &[BigInt], bound: i64) -> bool {
        let cols = m.cols();
        let width = (2 * bound + 1) as usize;
        let total = width.pow(cols as u32);
        (0..total).any(|mut code| {
            let x: Vec<BigInt> = (0..cols)
                .map(|_| {
                    let d = (code % width) as i64 - bound;
                    code /= width;
                    BigInt::from(d)
                })
                .collect();
            m.mul_vec(&x) == b
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(rows in small_matrix(5, 5)) {
            let m = RatMatrix::from_i64_rows(&rows);
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn rational_solutions_have_zero_residual(
            rows in small_matrix(4, 4),
            b in proptest::collection::vec(-4i64..=4, 4),
        ) {
            let m = RatMatrix::from_i64_rows(&rows);
            let b: Vec<Rational> = b[..m.rows()].iter().map(|&x| q(x)).collect();
            if let Some(s) = rational_solve(&m, &b).unwrap() {
                prop_assert_eq!(m.mul_vec(&s.particular), b.clone());
                for v in &s.nullspace {
                    prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
                }
                prop_assert_eq!(s.nullspace.len(), m.cols() - rank(&m));
            }
        }

        #[test]
        fn hnf_is_unimodular_staircase(rows in small_matrix(5, 4)) {
            let m = IntMatrix::from_i64_rows(&rows);
            let form = hermite_normal_form(&m);
            prop_assert_eq!(m.mul(&form.u), form.h.clone());
            prop_assert_eq!(form.u.determinant().abs(), BigInt::one());
            let mut last_row = None;
            for (k, &(i, col)) in form.pivots.iter().enumerate() {
                prop_assert_eq!(col, k);
                prop_assert!(last_row.is_none_or(|r| i > r));
                last_row = Some(i);
                prop_assert!(form.h[(i, k)].is_positive());
                for j in 0..k {
                    prop_assert!(!form.h[(i, j)].is_negative());
                    prop_assert!(form.h[(i, j)] < form.h[(i, k)]);
                }
                for j in (k + 1)..m.cols() {
                    prop_assert!(form.h[(i, j)].is_zero());
                }
                for r in 0..i {
                    prop_assert!(form.h[(r, k)].is_zero());
                }
            }
            for j in form.pivots.len()..m.cols() {
                prop_assert!(form.h.column(j).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn hnf_solve_matches_box_search(
            rows in small_matrix(4, 3),
            x in proptest::collection::vec(-2i64..=2, 3),
            perturb in proptest::collection::vec(-1i64..=1, 4),
            use_perturb in any::<bool>(),
        ) {
            let m = IntMatrix::from_i64_rows(&rows);
            let x = ints(&x[..m.cols()]);
            let mut b = m.mul_vec(&x);
            if use_perturb {
                for (bi, p) in b.iter_mut().zip(&perturb) {
                    *bi += *p;
                }
            }
            let found = hnf_solve(&m, &b);
            if let Some(sol) = &found {
                prop_assert_eq!(&m.mul_vec(sol), &b);
            }
            let brute = box_search(&m, &b, 4);
            if brute {
                prop_assert!(found.is_some());
            }
            if !use_perturb {
                prop_assert!(found.is_some());
            }
        }
    }
}
