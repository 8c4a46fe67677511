//! Linear programs in caller form, outcomes, and exact certificate checks.
//!
//! A [`LinearProgram`] keeps rows with their original senses and variables
//! with optional bounds (None = unbounded on that side). `solve_lp` returns
//! exact rational primal and dual certificates; `solve_milp` (in `milp`)
//! runs branch-and-bound over integer-flagged variables.

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, Scalar};
use crate::simplex;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Scalar>,
    /// Constant added to the objective value.
    pub offset: Scalar,
    pub rows: Vec<Vec<Scalar>>,
    pub row_senses: Vec<RowSense>,
    pub rhs: Vec<Scalar>,
    /// None = -inf.
    pub lower: Vec<Option<Scalar>>,
    /// None = +inf.
    pub upper: Vec<Option<Scalar>>,
    pub integer: Vec<bool>,
}

impl LinearProgram {
    /// A program over `n` free continuous variables with zero objective.
    pub fn new(sense: Sense, n: usize) -> Self {
        LinearProgram {
            sense,
            objective: vec![Scalar::zero(); n],
            offset: Scalar::zero(),
            rows: Vec::new(),
            row_senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
            integer: vec![false; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row from sparse (column, coefficient) terms. Repeated columns
    /// accumulate.
    pub fn add_row(&mut self, sense: RowSense, terms: &[(usize, Scalar)], rhs: Scalar) {
        let mut row = vec![Scalar::zero(); self.num_vars()];
        for (j, c) in terms {
            row[*j] += c;
        }
        self.rows.push(row);
        self.row_senses.push(sense);
        self.rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, j: usize, lower: Option<Scalar>, upper: Option<Scalar>) {
        self.lower[j] = lower;
        self.upper[j] = upper;
    }

    pub fn mark_integer(&mut self, j: usize) {
        self.integer[j] = true;
    }

    pub fn check_dims(&self) -> Result<()> {
        let n = self.num_vars();
        let m = self.num_rows();
        if self.lower.len() != n || self.upper.len() != n || self.integer.len() != n {
            return Err(Error::Dimension(format!(
                "bounds/integrality length mismatch: {} vars",
                n
            )));
        }
        if self.row_senses.len() != m || self.rhs.len() != m {
            return Err(Error::Dimension(format!(
                "row senses/rhs length mismatch: {} rows",
                m
            )));
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row has {} coefficients, expected {}",
                r.len(),
                n
            )));
        }
        Ok(())
    }

    /// Reduced costs `c - A^T y` in caller space.
    pub fn reduced_costs(&self, row_duals: &[Scalar]) -> Vec<Scalar> {
        let mut r = self.objective.clone();
        for (i, y) in row_duals.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (j, a) in self.rows[i].iter().enumerate() {
                r[j] -= y * a;
            }
        }
        r
    }
}

/// Primal/dual certificates of an optimal solve. Dual fields are absent for
/// mixed-integer solves.
#[derive(Clone, Debug)]
pub struct Solution {
    pub objective: Scalar,
    pub primal: Vec<Scalar>,
    pub row_duals: Option<Vec<Scalar>>,
    pub reduced_costs: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Optimal(Solution),
    Infeasible,
    Unbounded { ray: Option<Vec<Scalar>> },
}

impl SolveOutcome {
    pub fn optimal(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn expect_optimal(&self, what: &str) -> Result<&Solution> {
        self.optimal().ok_or_else(|| {
            Error::Internal(format!("{what}: expected an optimal solve, got {self:?}"))
        })
    }
}

/// Solves a pure LP exactly. Errors if any integrality flag is set.
pub fn solve_lp(lp: &LinearProgram) -> Result<SolveOutcome> {
    lp.check_dims()?;
    if lp.integer.iter().any(|&f| f) {
        return Err(Error::Input(
            "solve_lp: integrality flags set; use solve_milp".into(),
        ));
    }
    simplex::solve(lp)
}

/// Exact verification of an Optimal outcome: primal feasibility, dual sign
/// feasibility, complementary slackness, and primal value = dual value.
/// A test harness for the solver and for anything consuming certificates.
pub fn verify_certificates(lp: &LinearProgram, sol: &Solution) -> Result<()> {
    let x = &sol.primal;
    if x.len() != lp.num_vars() {
        return Err(Error::Dimension("primal length".into()));
    }
    // Primal feasibility.
    for (j, v) in x.iter().enumerate() {
        if let Some(l) = &lp.lower[j] {
            if v < l {
                return Err(Error::Internal(format!("x[{j}] below lower bound")));
            }
        }
        if let Some(u) = &lp.upper[j] {
            if v > u {
                return Err(Error::Internal(format!("x[{j}] above upper bound")));
            }
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs = crate::linalg::dot(row, x);
        let ok = match lp.row_senses[i] {
            RowSense::Le => lhs <= lp.rhs[i],
            RowSense::Eq => lhs == lp.rhs[i],
            RowSense::Ge => lhs >= lp.rhs[i],
        };
        if !ok {
            return Err(Error::Internal(format!("row {i} violated")));
        }
    }
    let value = crate::linalg::dot(&lp.objective, x) + &lp.offset;
    if value != sol.objective {
        return Err(Error::Internal(format!(
            "objective mismatch: stated {} recomputed {}",
            format_scalar(&sol.objective),
            format_scalar(&value)
        )));
    }
    let duals = sol
        .row_duals
        .as_ref()
        .ok_or_else(|| Error::Internal("missing duals".into()))?;
    let reduced = sol
        .reduced_costs
        .as_ref()
        .ok_or_else(|| Error::Internal("missing reduced costs".into()))?;
    if *reduced != lp.reduced_costs(duals) {
        return Err(Error::Internal("reduced costs inconsistent with duals".into()));
    }
    // Dual sign feasibility and row complementary slackness. For Min:
    // Ge rows need y >= 0 and Le rows y <= 0; Max flips.
    let flip = matches!(lp.sense, Sense::Max);
    for (i, y) in duals.iter().enumerate() {
        let y_eff = if flip { -y.clone() } else { y.clone() };
        match lp.row_senses[i] {
            RowSense::Ge if y_eff < Scalar::zero() => {
                return Err(Error::Internal(format!("dual sign on Ge row {i}")));
            }
            RowSense::Le if y_eff > Scalar::zero() => {
                return Err(Error::Internal(format!("dual sign on Le row {i}")));
            }
            _ => {}
        }
        let slack = crate::linalg::dot(&lp.rows[i], x) - &lp.rhs[i];
        if !y.is_zero() && !slack.is_zero() {
            return Err(Error::Internal(format!("complementary slackness on row {i}")));
        }
    }
    // Variable-level conditions and the bound contribution to the dual value.
    let mut dual_value = crate::linalg::dot(&lp.rhs, duals) + &lp.offset;
    for (j, r) in reduced.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let r_eff = if flip { -r.clone() } else { r.clone() };
        // For Min: r > 0 forces x at its lower bound, r < 0 at its upper.
        let at_bound = if r_eff > Scalar::zero() {
            lp.lower[j].clone()
        } else {
            lp.upper[j].clone()
        };
        match at_bound {
            Some(b) if x[j] == b => dual_value += r * &b,
            Some(_) => {
                return Err(Error::Internal(format!(
                    "reduced cost {} on x[{j}] not at its active bound",
                    format_scalar(r)
                )));
            }
            None => {
                return Err(Error::Internal(format!(
                    "reduced cost {} on x[{j}] with no finite bound on that side",
                    format_scalar(r)
                )));
            }
        }
    }
    if dual_value != sol.objective {
        return Err(Error::Internal(format!(
            "strong duality violated: dual {} vs primal {}",
            format_scalar(&dual_value),
            format_scalar(&sol.objective)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, rat};

    #[test]
    fn single_binding_row_max() {
        // max eta s.t. eta <= 0, eta free.
        let mut lp = LinearProgram::new(Sense::Max, 1);
        lp.objective[0] = rat(1);
        lp.add_row(RowSense::Le, &[(0, rat(1))], rat(0));
        let out = solve_lp(&lp).unwrap();
        let sol = out.expect_optimal("test").unwrap();
        assert_eq!(sol.objective, rat(0));
        assert_eq!(sol.row_duals.as_ref().unwrap()[0], rat(1));
        verify_certificates(&lp, sol).unwrap();
    }

    #[test]
    fn lp_relaxation_of_gap_instance_branch() {
        // min -y s.t. y <= 3/2, 0 <= y <= 1: attains -1 at y = 1.
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.objective[0] = rat(-1);
        lp.set_bounds(0, Some(rat(0)), Some(rat(1)));
        lp.add_row(RowSense::Le, &[(0, rat(1))], frac(3, 2));
        let out = solve_lp(&lp).unwrap();
        let sol = out.expect_optimal("test").unwrap();
        assert_eq!(sol.objective, rat(-1));
        assert_eq!(sol.primal[0], rat(1));
        verify_certificates(&lp, sol).unwrap();
    }

    #[test]
    fn contradictory_rows_infeasible() {
        // min 0 s.t. y >= 1, y <= 0.
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.add_row(RowSense::Ge, &[(0, rat(1))], rat(1));
        lp.add_row(RowSense::Le, &[(0, rat(1))], rat(0));
        assert!(matches!(solve_lp(&lp).unwrap(), SolveOutcome::Infeasible));
    }

    #[test]
    fn crossed_bounds_infeasible() {
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.set_bounds(0, Some(rat(1)), Some(rat(0)));
        assert!(matches!(solve_lp(&lp).unwrap(), SolveOutcome::Infeasible));
    }

    #[test]
    fn unbounded_with_ray() {
        // min -x, x >= 0.
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.objective[0] = rat(-1);
        lp.set_bounds(0, Some(rat(0)), None);
        match solve_lp(&lp).unwrap() {
            SolveOutcome::Unbounded { ray } => {
                let ray = ray.unwrap();
                assert!(ray[0] > rat(0));
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_free_variable_max() {
        // max x + y s.t. x <= 2, y free only in rows... keep y free entirely.
        let mut lp = LinearProgram::new(Sense::Max, 2);
        lp.objective[0] = rat(1);
        lp.objective[1] = rat(1);
        lp.add_row(RowSense::Le, &[(0, rat(1))], rat(2));
        match solve_lp(&lp).unwrap() {
            SolveOutcome::Unbounded { ray } => {
                let ray = ray.unwrap();
                // Objective strictly improves along the ray.
                let gain = crate::linalg::dot(&lp.objective, &ray);
                assert!(gain > rat(0));
                // Ray respects the row: coefficient on the Le row must be <= 0.
                assert!(crate::linalg::dot(&lp.rows[0], &ray) <= rat(0));
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn equality_rows_and_free_vars() {
        // min x + y s.t. x + y = 2, x - y = 0 -> x = y = 1.
        let mut lp = LinearProgram::new(Sense::Min, 2);
        lp.objective = vec![rat(1), rat(1)];
        lp.add_row(RowSense::Eq, &[(0, rat(1)), (1, rat(1))], rat(2));
        lp.add_row(RowSense::Eq, &[(0, rat(1)), (1, rat(-1))], rat(0));
        let out = solve_lp(&lp).unwrap();
        let sol = out.expect_optimal("test").unwrap();
        assert_eq!(sol.primal, vec![rat(1), rat(1)]);
        verify_certificates(&lp, sol).unwrap();
    }

    #[test]
    fn redundant_row_handled() {
        // x + y = 1 twice, min x.
        let mut lp = LinearProgram::new(Sense::Min, 2);
        lp.objective[0] = rat(1);
        lp.set_bounds(0, Some(rat(0)), None);
        lp.set_bounds(1, Some(rat(0)), None);
        lp.add_row(RowSense::Eq, &[(0, rat(1)), (1, rat(1))], rat(1));
        lp.add_row(RowSense::Eq, &[(0, rat(1)), (1, rat(1))], rat(1));
        let out = solve_lp(&lp).unwrap();
        let sol = out.expect_optimal("test").unwrap();
        assert_eq!(sol.objective, rat(0));
        verify_certificates(&lp, sol).unwrap();
    }

    #[test]
    fn mirrored_variable_upper_bound_only() {
        // min x with x <= 5 and row x >= -2: optimum -2.
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.objective[0] = rat(1);
        lp.set_bounds(0, None, Some(rat(5)));
        lp.add_row(RowSense::Ge, &[(0, rat(1))], rat(-2));
        let out = solve_lp(&lp).unwrap();
        let sol = out.expect_optimal("test").unwrap();
        assert_eq!(sol.objective, rat(-2));
        verify_certificates(&lp, sol).unwrap();
    }

    #[test]
    fn rejects_integer_flags() {
        let mut lp = LinearProgram::new(Sense::Min, 1);
        lp.set_bounds(0, Some(rat(0)), Some(rat(1)));
        lp.mark_integer(0);
        assert!(matches!(solve_lp(&lp), Err(Error::Input(_))));
    }

    #[test]
    fn strong_duality_on_random_programs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let mut optimal = 0;
        for _ in 0..120 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=4);
            let mut lp = LinearProgram::new(
                if rng.gen_bool(0.5) { Sense::Min } else { Sense::Max },
                n,
            );
            for j in 0..n {
                lp.objective[j] = rat(rng.gen_range(-3..=3));
                let style = rng.gen_range(0..4);
                let (lo, hi) = match style {
                    0 => (Some(rat(rng.gen_range(-2..=0))), Some(rat(rng.gen_range(1..=3)))),
                    1 => (Some(rat(0)), None),
                    2 => (None, Some(rat(rng.gen_range(0..=3)))),
                    _ => (None, None),
                };
                lp.set_bounds(j, lo, hi);
            }
            for _ in 0..m {
                let terms: Vec<(usize, Scalar)> =
                    (0..n).map(|j| (j, rat(rng.gen_range(-2..=2)))).collect();
                let sense = match rng.gen_range(0..3) {
                    0 => RowSense::Le,
                    1 => RowSense::Ge,
                    _ => RowSense::Eq,
                };
                lp.add_row(sense, &terms, rat(rng.gen_range(-3..=3)));
            }
            match solve_lp(&lp).unwrap() {
                SolveOutcome::Optimal(sol) => {
                    verify_certificates(&lp, &sol).unwrap();
                    optimal += 1;
                }
                SolveOutcome::Unbounded { ray } => {
                    let ray = ray.unwrap();
                    let gain = crate::linalg::dot(&lp.objective, &ray);
                    match lp.sense {
                        Sense::Min => assert!(gain < rat(0)),
                        Sense::Max => assert!(gain > rat(0)),
                    }
                    for (i, row) in lp.rows.iter().enumerate() {
                        let along = crate::linalg::dot(row, &ray);
                        match lp.row_senses[i] {
                            RowSense::Le => assert!(along <= rat(0)),
                            RowSense::Ge => assert!(along >= rat(0)),
                            RowSense::Eq => assert_eq!(along, rat(0)),
                        }
                    }
                    for j in 0..n {
                        if lp.lower[j].is_some() && ray[j] < rat(0) {
                            panic!("ray decreases a lower-bounded variable");
                        }
                        if lp.upper[j].is_some() && ray[j] > rat(0) {
                            panic!("ray increases an upper-bounded variable");
                        }
                    }
                }
                SolveOutcome::Infeasible => {}
            }
        }
        assert!(optimal > 20, "suite should hit plenty of optimal solves");
    }
}
