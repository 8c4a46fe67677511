//! Dense rational matrices, vector helpers, norms, and the polyhedral
//! vertex bound.

use crate::error::{Error, Result};
use crate::scalar::{abs, factorial, rat, Scalar};
use num_traits::Zero;

/// Dense row-major matrix of exact rationals. A matrix may have zero rows
/// and/or zero columns; all operations treat the empty case uniformly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, rat(1));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    /// `self * v`
    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix-vector product: {} columns vs vector of length {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `self^T * v`
    pub fn tr_mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "transposed matrix-vector product: {} rows vs vector of length {}",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![Scalar::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self.at(i, j) * &v[i];
            }
        }
        Ok(out)
    }

    /// Stacks `other` below `self`. Column counts must match unless one
    /// side has zero rows.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "vstack: {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = Vec::with_capacity((self.rows + other.rows) * cols);
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    /// Places `other` to the right of `self`. Row counts must match unless
    /// one side has zero columns.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols > 0 && other.cols > 0 && self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack: {} vs {} rows",
                self.rows, other.rows
            )));
        }
        let rows = if self.cols > 0 { self.rows } else { other.rows };
        let mut out = Matrix::zeros(rows, self.cols + other.cols);
        for i in 0..rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.at(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    /// First non-integer entry, if any.
    pub fn non_integer_entry(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.at(i, j).is_integer() {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Test/construction helper: integer matrix literal.
pub fn mat(rows: &[&[i64]]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
        .expect("ragged integer matrix literal")
}

/// Test/construction helper: integer vector literal.
pub fn ivec(vals: &[i64]) -> Vec<Scalar> {
    vals.iter().map(|&v| rat(v)).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// max |entry| of a vector; 0 when empty.
pub fn vec_max_abs(v: &[Scalar]) -> Scalar {
    v.iter().map(abs).max().unwrap_or_else(Scalar::zero)
}

/// max |entry|; 0 for an empty matrix.
pub fn max_abs_norm(m: &Matrix) -> Scalar {
    vec_max_abs(&m.data)
}

/// Vector-induced infinity norm: max over rows of the sum of |entries|;
/// 0 for an empty matrix.
pub fn induced_inf_norm(m: &Matrix) -> Scalar {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(abs).sum::<Scalar>())
        .max()
        .unwrap_or_else(Scalar::zero)
}

/// Upper bound on the max-abs entry of any vertex of `{w >= 0 : A w = b}`
/// for integer `A` (m x n) and `b`: `m! * ||b|| * ||A||^(m-1)` with
/// `||.||` the max-abs norm. Errors if `A` or `b` has a non-integer entry.
pub fn vertex_bound(a: &Matrix, b: &[Scalar]) -> Result<Scalar> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "vertex_bound: {} rows vs rhs of length {}",
            a.rows(),
            b.len()
        )));
    }
    if let Some((i, j)) = a.non_integer_entry() {
        return Err(Error::ConditionViolation(format!(
            "vertex_bound requires an integer matrix; entry ({i},{j}) = {}",
            crate::scalar::format_scalar(a.at(i, j))
        )));
    }
    if let Some(v) = b.iter().find(|v| !v.is_integer()) {
        return Err(Error::ConditionViolation(format!(
            "vertex_bound requires an integer rhs; found {}",
            crate::scalar::format_scalar(v)
        )));
    }
    let m = a.rows();
    if m == 0 {
        return Ok(Scalar::zero());
    }
    let norm_a = max_abs_norm(a);
    let norm_b = vec_max_abs(b);
    let mut pow = rat(1);
    for _ in 0..m - 1 {
        pow *= &norm_a;
    }
    Ok(Scalar::from_integer(factorial(m)) * norm_b * pow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    #[test]
    fn norms_on_identity() {
        let id = Matrix::identity(2);
        assert_eq!(max_abs_norm(&id), rat(1));
        assert_eq!(induced_inf_norm(&id), rat(1));
    }

    #[test]
    fn norms_direct_formula() {
        let m = mat(&[&[1, -2], &[3, 0]]);
        assert_eq!(max_abs_norm(&m), rat(3));
        assert_eq!(induced_inf_norm(&m), rat(3));
        let m = mat(&[&[1, -2], &[2, 2]]);
        assert_eq!(max_abs_norm(&m), rat(2));
        assert_eq!(induced_inf_norm(&m), rat(4));
    }

    #[test]
    fn norms_zero_and_empty() {
        assert_eq!(max_abs_norm(&Matrix::zeros(3, 2)), rat(0));
        assert_eq!(induced_inf_norm(&Matrix::zeros(3, 2)), rat(0));
        assert_eq!(max_abs_norm(&Matrix::zeros(0, 5)), rat(0));
        assert_eq!(induced_inf_norm(&Matrix::zeros(0, 5)), rat(0));
    }

    #[test]
    fn vertex_bound_formula() {
        // m = 1: 1! * 5 * 1^0 = 5
        assert_eq!(vertex_bound(&mat(&[&[1]]), &ivec(&[5])).unwrap(), rat(5));
        // m = 2, ||A|| = 2, ||b|| = 3: 2! * 3 * 2 = 12
        let a = mat(&[&[2, 1], &[0, -1]]);
        assert_eq!(vertex_bound(&a, &ivec(&[3, 1])).unwrap(), rat(12));
    }

    #[test]
    fn vertex_bound_rejects_fractional_data() {
        let a = Matrix::from_rows(vec![vec![frac(1, 2)]]).unwrap();
        assert!(matches!(
            vertex_bound(&a, &ivec(&[1])),
            Err(Error::ConditionViolation(_))
        ));
        assert!(matches!(
            vertex_bound(&mat(&[&[1]]), &[frac(1, 2)]),
            Err(Error::ConditionViolation(_))
        ));
    }

    /// Enumerates all basic solutions of {w >= 0 : Aw = b} and checks the
    /// bound dominates every vertex entry.
    #[test]
    fn vertex_bound_dominates_enumerated_vertices() {
        let a = mat(&[&[1, 1], &[1, -1]]);
        let b = ivec(&[2, 0]);
        let bound = vertex_bound(&a, &b).unwrap();
        assert_eq!(bound, rat(4)); // 2! * 2 * 1
        for v in enumerate_vertices(&a, &b) {
            assert!(vec_max_abs(&v) <= bound, "vertex {v:?} exceeds bound");
        }
    }

    #[test]
    fn vertex_bound_dominates_random_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(m..=4);
            let a = Matrix::from_rows(
                (0..m)
                    .map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect())
                    .collect(),
            )
            .unwrap();
            let b: Vec<Scalar> = (0..m).map(|_| rat(rng.gen_range(-3..=3))).collect();
            let bound = vertex_bound(&a, &b).unwrap();
            for v in enumerate_vertices(&a, &b) {
                assert!(vec_max_abs(&v) <= bound, "A={a:?} b={b:?} vertex {v:?}");
            }
        }
    }

    /// Brute-force basic solutions: every nonsingular column basis.
    fn enumerate_vertices(a: &Matrix, b: &[Scalar]) -> Vec<Vec<Scalar>> {
        let m = a.rows();
        let n = a.cols();
        let mut out = Vec::new();
        for cols in combos(n, m) {
            if let Some(sol) = solve_square(a, &cols, b) {
                if sol.iter().all(|v| *v >= Scalar::zero()) {
                    let mut full = vec![Scalar::zero(); n];
                    for (k, &j) in cols.iter().enumerate() {
                        full[j] = sol[k].clone();
                    }
                    out.push(full);
                }
            }
        }
        out
    }

    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for j in start..n {
                cur.push(j);
                rec(j + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    fn solve_square(a: &Matrix, cols: &[usize], b: &[Scalar]) -> Option<Vec<Scalar>> {
        let m = a.rows();
        let mut aug: Vec<Vec<Scalar>> = (0..m)
            .map(|i| {
                let mut row: Vec<Scalar> = cols.iter().map(|&j| a.at(i, j).clone()).collect();
                row.push(b[i].clone());
                row
            })
            .collect();
        for col in 0..m {
            let pivot = (col..m).find(|&r| !aug[r][col].is_zero())?;
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v /= &p;
            }
            for r in 0..m {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in 0..=m {
                        let delta = &f * &aug[col][c];
                        aug[r][c] -= delta;
                    }
                }
            }
        }
        Some((0..m).map(|i| aug[i][m].clone()).collect())
    }
}
