//! Inner column-and-constraint generation over discrete second-stage
//! decisions, with the multiplier halve/double search.
//!
//! The feasibility phase alternates the violation-mode relaxed dual with
//! exact slack minimization until either some realization is proven
//! infeasible (the witness is returned) or the worst-case violation hits
//! zero. The optimality phase then doubles the multiplier until the
//! Lagrangian argmin reproduces its realization exactly (zero penalty),
//! accumulating discrete decisions into the pool, and stops when the
//! relaxed upper bound meets the incumbent lower bound.

use super::worst_case::{solve_relaxed_worst_case, RelaxMode};
use super::{Caps, TraceEvent, TraceKind};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::milp::solve_milp;
use crate::model::{lagrangian_milp, penalty_phi, slack_milp, GeneralInstance};
use crate::scalar::{frac, rat, ExtValue, Scalar};
use num_traits::Zero;

/// Result of one inner run at a fixed first-stage decision.
#[derive(Clone, Debug)]
pub enum InnerOutcome {
    /// Some realization makes the second stage infeasible at this x.
    InfeasibleScenario {
        xi: Vec<bool>,
        lambda: Scalar,
        pool: Vec<Vec<Scalar>>,
        iterations: usize,
    },
    /// Worst-case estimate converged: LB = UB within eps at the final
    /// multiplier, which satisfies the zero-penalty necessary condition.
    Converged {
        xi: Vec<bool>,
        lambda: Scalar,
        lower: Scalar,
        upper: Scalar,
        pool: Vec<Vec<Scalar>>,
        iterations: usize,
    },
}

impl InnerOutcome {
    pub fn iterations(&self) -> usize {
        match self {
            InnerOutcome::InfeasibleScenario { iterations, .. } => *iterations,
            InnerOutcome::Converged { iterations, .. } => *iterations,
        }
    }
}

fn push_unique(pool: &mut Vec<Vec<Scalar>>, yd: Vec<Scalar>) {
    if !pool.contains(&yd) {
        pool.push(yd);
    }
}

/// Runs the inner loop at `x` starting from `lambda0 > 0`, retaining and
/// extending `pool`.
pub fn inner_ccg(
    inst: &GeneralInstance,
    x: &[Scalar],
    lambda0: &Scalar,
    eps: &Scalar,
    initial_pool: Vec<Vec<Scalar>>,
    caps: &Caps,
    trace: &mut Vec<TraceEvent>,
) -> Result<InnerOutcome> {
    if *lambda0 <= Scalar::zero() {
        return Err(Error::Input("inner loop needs lambda0 > 0".into()));
    }
    if *eps < Scalar::zero() {
        return Err(Error::Input("eps must be nonnegative".into()));
    }
    let n2 = inst.n2();
    let mut pool = initial_pool;
    let mut iterations = 0usize;
    let guard = |iterations: &usize, lam: &Scalar, lb: &ExtValue, ub: &ExtValue| {
        if *iterations > caps.inner {
            return Err(Error::LimitExceeded(format!(
                "inner iteration cap {} at lambda = {}, LB = {lb}, UB = {ub}",
                caps.inner,
                crate::scalar::format_scalar(lam)
            )));
        }
        Ok(())
    };
    // Feasibility phase: (tau, lambda) = (violation, 1). The initial
    // realization is the lexicographically smallest member of the set; the
    // first relaxed solve overwrites it.
    let mut xi_hat;
    loop {
        iterations += 1;
        let (ub, xi_w, _) =
            solve_relaxed_worst_case(inst, x, &pool, RelaxMode::Violation, &rat(1))?;
        xi_hat = xi_w;
        let slack = solve_milp(&slack_milp(inst, x, &xi_hat)?)?;
        let sol = slack.expect_optimal("slack problem always has feasible points")?;
        let lb = sol.objective.clone();
        push_unique(&mut pool, sol.primal[inst.nc2..n2].to_vec());
        trace.push(TraceEvent {
            kind: TraceKind::InnerFeasibility,
            iteration: iterations,
            lambda: rat(1),
            lower: ExtValue::finite(lb.clone()),
            upper: ub.clone(),
            pool: pool.len(),
        });
        guard(&iterations, &rat(1), &ExtValue::finite(lb.clone()), &ub)?;
        if lb > Scalar::zero() {
            return Ok(InnerOutcome::InfeasibleScenario {
                xi: xi_hat,
                lambda: lambda0.clone(),
                pool,
                iterations,
            });
        }
        if ub == ExtValue::finite(Scalar::zero()) {
            break;
        }
    }
    // Optimality phase.
    let mut lam = lambda0.clone();
    let mut lower = ExtValue::NegInf;
    let mut upper;
    loop {
        lam = lam * frac(1, 2);
        let mut xi_tilde;
        let mut y_hat;
        loop {
            iterations += 1;
            lam = lam * rat(2);
            let (ub, xi_w, _) = solve_relaxed_worst_case(inst, x, &pool, RelaxMode::Cost, &lam)?;
            upper = ub;
            xi_tilde = xi_w;
            let argmin = solve_milp(&lagrangian_milp(inst, x, &xi_tilde, &lam)?)?;
            let sol = argmin.expect_optimal(
                "Lagrangian argmin feasible after the feasibility phase",
            )?;
            y_hat = sol.primal[..n2].to_vec();
            let z_hat = sol.primal[n2..n2 + inst.np].to_vec();
            push_unique(&mut pool, sol.primal[inst.nc2..n2].to_vec());
            let phi = penalty_phi(&z_hat, &xi_tilde)?;
            trace.push(TraceEvent {
                kind: TraceKind::InnerOptimality,
                iteration: iterations,
                lambda: lam.clone(),
                lower: lower.clone(),
                upper: upper.clone(),
                pool: pool.len(),
            });
            guard(&iterations, &lam, &lower, &upper)?;
            if phi.is_zero() {
                break;
            }
        }
        let cand = dot(&inst.cost_c(&xi_tilde), x) + dot(&inst.cost_d(&xi_tilde), &y_hat);
        if ExtValue::finite(cand.clone()) > lower {
            lower = ExtValue::finite(cand);
            xi_hat = xi_tilde;
        }
        if let (ExtValue::Finite(u), ExtValue::Finite(l)) = (&upper, &lower) {
            if u - l <= *eps {
                return Ok(InnerOutcome::Converged {
                    xi: xi_hat,
                    lambda: lam,
                    lower: l.clone(),
                    upper: u.clone(),
                    pool,
                    iterations,
                });
            }
        }
    }
}
