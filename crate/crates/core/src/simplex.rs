//! Dense two-phase primal simplex with Bland's rule on exact rationals.
//!
//! Internal engine behind `lp::solve_lp`. The caller-form program is
//! reduced to `min c'x, Ax = b, x >= 0` (shifting, mirroring, or splitting
//! variables; slack columns; explicit rows for two-sided bounds), solved on
//! a dense tableau, and certificates are mapped back to caller space.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RowSense, Sense, Solution, SolveOutcome};
use crate::scalar::Scalar;
use num_traits::Zero;

const PIVOT_CAP: usize = 200_000;

pub(crate) fn solve(lp: &LinearProgram) -> Result<SolveOutcome> {
    for j in 0..lp.num_vars() {
        if let (Some(l), Some(u)) = (&lp.lower[j], &lp.upper[j]) {
            if l > u {
                return Ok(SolveOutcome::Infeasible);
            }
        }
    }
    let std = Standardized::build(lp);
    match run_simplex(&std.a, &std.b, &std.c)? {
        StdOutcome::Infeasible => Ok(SolveOutcome::Infeasible),
        StdOutcome::Unbounded { ray } => Ok(SolveOutcome::Unbounded {
            ray: Some(std.map_ray(&ray, lp.num_vars())),
        }),
        StdOutcome::Optimal { x, duals } => {
            let primal = std.map_point(&x, lp);
            let objective = crate::linalg::dot(&lp.objective, &primal) + &lp.offset;
            let row_duals = std.map_duals(&duals, lp.num_rows());
            let reduced_costs = lp.reduced_costs(&row_duals);
            Ok(SolveOutcome::Optimal(Solution {
                objective,
                primal,
                row_duals: Some(row_duals),
                reduced_costs: Some(reduced_costs),
            }))
        }
    }
}

enum VarMap {
    /// x = shift + s
    Shift { col: usize, shift: Scalar },
    /// x = from - s
    Mirror { col: usize, from: Scalar },
    /// x = p - q
    Split { pos: usize, neg: usize },
}

struct Standardized {
    a: Vec<Vec<Scalar>>,
    b: Vec<Scalar>,
    c: Vec<Scalar>,
    var_map: Vec<VarMap>,
    /// Per caller row: (standard row index, sign applied to reach b >= 0).
    row_map: Vec<(usize, i8)>,
    /// -1 when the caller sense is Max (internal problem minimizes -c).
    sense_sign: i8,
}

impl Standardized {
    fn build(lp: &LinearProgram) -> Standardized {
        let n = lp.num_vars();
        let sense_sign: i8 = match lp.sense {
            Sense::Min => 1,
            Sense::Max => -1,
        };
        let mut var_map = Vec::with_capacity(n);
        let mut c_core: Vec<Scalar> = Vec::new();
        // (column, cap) rows enforcing s <= upper - lower for boxed vars.
        let mut bound_rows: Vec<(usize, Scalar)> = Vec::new();
        for j in 0..n {
            let cost = if sense_sign == 1 {
                lp.objective[j].clone()
            } else {
                -lp.objective[j].clone()
            };
            match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), Some(u)) => {
                    let col = c_core.len();
                    c_core.push(cost);
                    bound_rows.push((col, u - l));
                    var_map.push(VarMap::Shift { col, shift: l.clone() });
                }
                (Some(l), None) => {
                    let col = c_core.len();
                    c_core.push(cost);
                    var_map.push(VarMap::Shift { col, shift: l.clone() });
                }
                (None, Some(u)) => {
                    let col = c_core.len();
                    c_core.push(-cost);
                    var_map.push(VarMap::Mirror { col, from: u.clone() });
                }
                (None, None) => {
                    let pos = c_core.len();
                    c_core.push(cost.clone());
                    c_core.push(-cost);
                    var_map.push(VarMap::Split { pos, neg: pos + 1 });
                }
            }
        }
        let n_core = c_core.len();
        // Caller rows in core-column space with adjusted rhs.
        let mut raw_rows: Vec<(Vec<Scalar>, RowSense, Scalar)> = Vec::new();
        for (i, row) in lp.rows.iter().enumerate() {
            let mut coefs = vec![Scalar::zero(); n_core];
            let mut rhs = lp.rhs[i].clone();
            for (j, aij) in row.iter().enumerate() {
                if aij.is_zero() {
                    continue;
                }
                match &var_map[j] {
                    VarMap::Shift { col, shift } => {
                        coefs[*col] += aij;
                        rhs -= aij * shift;
                    }
                    VarMap::Mirror { col, from } => {
                        coefs[*col] -= aij;
                        rhs -= aij * from;
                    }
                    VarMap::Split { pos, neg } => {
                        coefs[*pos] += aij;
                        coefs[*neg] -= aij;
                    }
                }
            }
            raw_rows.push((coefs, lp.row_senses[i], rhs));
        }
        for (col, cap) in bound_rows {
            let mut coefs = vec![Scalar::zero(); n_core];
            coefs[col] = crate::scalar::rat(1);
            raw_rows.push((coefs, RowSense::Le, cap));
        }
        let n_slack = raw_rows
            .iter()
            .filter(|(_, s, _)| !matches!(s, RowSense::Eq))
            .count();
        let n_total = n_core + n_slack;
        let mut a = Vec::with_capacity(raw_rows.len());
        let mut b = Vec::with_capacity(raw_rows.len());
        let mut row_map = Vec::with_capacity(lp.num_rows());
        let mut next_slack = n_core;
        for (idx, (coefs, sense, rhs)) in raw_rows.into_iter().enumerate() {
            let mut full = coefs;
            full.resize(n_total, Scalar::zero());
            match sense {
                RowSense::Le => {
                    full[next_slack] = crate::scalar::rat(1);
                    next_slack += 1;
                }
                RowSense::Ge => {
                    full[next_slack] = crate::scalar::rat(-1);
                    next_slack += 1;
                }
                RowSense::Eq => {}
            }
            let sign = if rhs < Scalar::zero() {
                for v in full.iter_mut() {
                    *v = -v.clone();
                }
                -1i8
            } else {
                1i8
            };
            b.push(if sign == -1 { -rhs } else { rhs });
            a.push(full);
            if idx < lp.num_rows() {
                row_map.push((idx, sign));
            }
        }
        let mut c = c_core;
        c.resize(n_total, Scalar::zero());
        Standardized {
            a,
            b,
            c,
            var_map,
            row_map,
            sense_sign,
        }
    }

    fn map_point(&self, x: &[Scalar], lp: &LinearProgram) -> Vec<Scalar> {
        (0..lp.num_vars())
            .map(|j| match &self.var_map[j] {
                VarMap::Shift { col, shift } => shift + &x[*col],
                VarMap::Mirror { col, from } => from - &x[*col],
                VarMap::Split { pos, neg } => &x[*pos] - &x[*neg],
            })
            .collect()
    }

    fn map_ray(&self, ray: &[Scalar], n_vars: usize) -> Vec<Scalar> {
        (0..n_vars)
            .map(|j| match &self.var_map[j] {
                VarMap::Shift { col, .. } => ray[*col].clone(),
                VarMap::Mirror { col, .. } => -ray[*col].clone(),
                VarMap::Split { pos, neg } => &ray[*pos] - &ray[*neg],
            })
            .collect()
    }

    fn map_duals(&self, duals: &[Scalar], n_rows: usize) -> Vec<Scalar> {
        (0..n_rows)
            .map(|i| {
                let (std_row, sign) = self.row_map[i];
                let mut y = duals[std_row].clone();
                if sign == -1 {
                    y = -y;
                }
                if self.sense_sign == -1 {
                    y = -y;
                }
                y
            })
            .collect()
    }
}

enum StdOutcome {
    Optimal { x: Vec<Scalar>, duals: Vec<Scalar> },
    Infeasible,
    Unbounded { ray: Vec<Scalar> },
}

/// Two-phase simplex on `min c'x, Ax = b, x >= 0` with `b >= 0`.
fn run_simplex(a: &[Vec<Scalar>], b: &[Scalar], c: &[Scalar]) -> Result<StdOutcome> {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut t: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Scalar::zero(); width];
        row[..n].clone_from_slice(&a[i]);
        row[n + i] = crate::scalar::rat(1);
        row[n + m] = b[i].clone();
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Phase 1: minimize the sum of artificials. Artificials never re-enter.
    let mut obj = vec![Scalar::zero(); width];
    for j in 0..n {
        let mut s = Scalar::zero();
        for row in t.iter() {
            s += &row[j];
        }
        obj[j] = -s;
    }
    let mut corner = Scalar::zero();
    for bi in b {
        corner -= bi;
    }
    obj[n + m] = corner;
    let mut pivots = 0usize;
    loop {
        let enter = (0..n).find(|&j| obj[j] < Scalar::zero());
        let Some(j) = enter else { break };
        let Some(r) = ratio_test(&t, &basis, j, n + m) else {
            // Sum of nonnegative artificials cannot be unbounded below.
            return Err(Error::Internal("phase-1 unbounded".into()));
        };
        pivot(&mut t, &mut obj, &mut basis, r, j);
        pivots += 1;
        if pivots > PIVOT_CAP {
            return Err(Error::LimitExceeded("simplex pivot cap (phase 1)".into()));
        }
    }
    let infeas: Scalar = basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(i, _)| t[i][n + m].clone())
        .sum();
    if infeas > Scalar::zero() {
        return Ok(StdOutcome::Infeasible);
    }
    // Drive basic artificials (all at level 0) out where a structural pivot
    // exists; rows left behind are identically zero on structural columns
    // and stay inert through phase 2.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut obj, &mut basis, i, j);
            }
        }
    }
    // Phase 2 objective row: r_j = c_j - c_B' B^-1 A_j.
    for j in 0..width {
        let mut v = if j < n { c[j].clone() } else { Scalar::zero() };
        for (i, &bj) in basis.iter().enumerate() {
            if bj < n && !c[bj].is_zero() {
                v -= &c[bj] * &t[i][j];
            }
        }
        obj[j] = v;
    }
    loop {
        let enter = (0..n).find(|&j| obj[j] < Scalar::zero());
        let Some(j) = enter else { break };
        match ratio_test(&t, &basis, j, n + m) {
            Some(r) => {
                pivot(&mut t, &mut obj, &mut basis, r, j);
                pivots += 1;
                if pivots > PIVOT_CAP {
                    return Err(Error::LimitExceeded("simplex pivot cap (phase 2)".into()));
                }
            }
            None => {
                let mut ray = vec![Scalar::zero(); n];
                ray[j] = crate::scalar::rat(1);
                for (i, &bj) in basis.iter().enumerate() {
                    if bj < n {
                        ray[bj] = -t[i][j].clone();
                    }
                }
                return Ok(StdOutcome::Unbounded { ray });
            }
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][n + m].clone();
        }
    }
    // Duals read off the artificial columns: obj[n+i] = 0 - y_i.
    let duals: Vec<Scalar> = (0..m).map(|i| -obj[n + i].clone()).collect();
    Ok(StdOutcome::Optimal { x, duals })
}

/// Bland leaving rule: minimum ratio, ties broken by smallest basic index.
fn ratio_test(t: &[Vec<Scalar>], basis: &[usize], j: usize, rhs_col: usize) -> Option<usize> {
    let mut best: Option<(Scalar, usize, usize)> = None;
    for (i, row) in t.iter().enumerate() {
        if row[j] > Scalar::zero() {
            let ratio = &row[rhs_col] / &row[j];
            let cand = (ratio, basis[i], i);
            best = match best {
                None => Some(cand),
                Some(cur) => {
                    if cand.0 < cur.0 || (cand.0 == cur.0 && cand.1 < cur.1) {
                        Some(cand)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
    }
    best.map(|(_, _, i)| i)
}

fn pivot(t: &mut [Vec<Scalar>], obj: &mut [Scalar], basis: &mut [usize], r: usize, j: usize) {
    let p = t[r][j].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let width = t[r].len();
    for i in 0..t.len() {
        if i == r || t[i][j].is_zero() {
            continue;
        }
        let f = t[i][j].clone();
        for col in 0..width {
            let delta = &f * &t[r][col];
            t[i][col] -= delta;
        }
    }
    if !obj[j].is_zero() {
        let f = obj[j].clone();
        for col in 0..width {
            let delta = &f * &t[r][col];
            obj[col] -= delta;
        }
    }
    basis[r] = j;
}
