//! Total unimodularity by exhaustive subdeterminant enumeration.
//!
//! Checked matrices in this toolkit are tiny (condition checks on instance
//! data), so the exponential enumeration is deliberate. Any entry outside
//! {-1, 0, 1} fails immediately.

use crate::linalg::Matrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Witness of a failed total-unimodularity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TuViolation {
    /// An entry outside {-1, 0, 1}.
    Entry { row: usize, col: usize },
    /// A square submatrix with |det| >= 2.
    Submatrix {
        rows: Vec<usize>,
        cols: Vec<usize>,
        det: BigInt,
    },
}

impl std::fmt::Display for TuViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TuViolation::Entry { row, col } => {
                write!(f, "entry ({row},{col}) outside {{-1,0,1}}")
            }
            TuViolation::Submatrix { rows, cols, det } => {
                write!(f, "submatrix rows {rows:?} cols {cols:?} has det {det}")
            }
        }
    }
}

/// True iff every square submatrix has determinant in {-1, 0, 1}.
/// The empty matrix is totally unimodular.
pub fn is_totally_unimodular(m: &Matrix) -> bool {
    tu_violation(m).is_none()
}

/// First total-unimodularity violation in enumeration order, if any.
pub fn tu_violation(m: &Matrix) -> Option<TuViolation> {
    let nr = m.rows();
    let nc = m.cols();
    let mut entries = vec![vec![BigInt::zero(); nc]; nr];
    for i in 0..nr {
        for j in 0..nc {
            let v = m.at(i, j);
            if !v.is_integer() || v.numer().abs() > BigInt::one() {
                return Some(TuViolation::Entry { row: i, col: j });
            }
            entries[i][j] = v.numer().clone();
        }
    }
    // Size-1 submatrices are covered by the entry scan.
    for k in 2..=nr.min(nc) {
        let mut rows_sel = first_combo(k);
        loop {
            let mut cols_sel = first_combo(k);
            loop {
                let det = det_submatrix(&entries, &rows_sel, &cols_sel);
                if det.abs() > BigInt::one() {
                    return Some(TuViolation::Submatrix {
                        rows: rows_sel,
                        cols: cols_sel,
                        det,
                    });
                }
                if !next_combo(&mut cols_sel, nc) {
                    break;
                }
            }
            if !next_combo(&mut rows_sel, nr) {
                break;
            }
        }
    }
    None
}

fn first_combo(k: usize) -> Vec<usize> {
    (0..k).collect()
}

/// Advances a k-combination of {0..n} in lexicographic order.
fn next_combo(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Integer determinant of the selected submatrix via fraction-free
/// (Bareiss) elimination.
fn det_submatrix(entries: &[Vec<BigInt>], rows: &[usize], cols: &[usize]) -> BigInt {
    let k = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| entries[i][j].clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k {
        if a[p][p].is_zero() {
            match (p + 1..k).find(|&r| !a[r][p].is_zero()) {
                Some(r) => {
                    a.swap(p, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for r in p + 1..k {
            for c in p + 1..k {
                let num = &a[p][p] * &a[r][c] - &a[r][p] * &a[p][c];
                a[r][c] = num / &prev;
            }
            a[r][p] = BigInt::zero();
        }
        prev = a[p][p].clone();
    }
    sign * a[k - 1][k - 1].clone()
}
