//! Mixed-integer solves by depth-first branch-and-bound.
//!
//! Branches on the lowest-index fractional integer variable, explores the
//! floor branch first, prunes on the exact relaxation bound, and keeps the
//! first incumbent among ties, so runs are fully deterministic.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, Sense, Solution, SolveOutcome};
use crate::scalar::Scalar;
use num_traits::One;

const NODE_CAP: usize = 200_000;
const ENUM_CAP: usize = 1 << 16;

/// Global optimum over the mixed-integer feasible set. Integer-flagged
/// variables must carry finite bounds. Dual fields are absent on optimal
/// outcomes whenever any integrality flag is present.
pub fn solve_milp(lp: &LinearProgram) -> Result<SolveOutcome> {
    lp.check_dims()?;
    let int_vars: Vec<usize> = (0..lp.num_vars()).filter(|&j| lp.integer[j]).collect();
    if int_vars.is_empty() {
        return solve_lp(lp);
    }
    for &j in &int_vars {
        if lp.lower[j].is_none() || lp.upper[j].is_none() {
            return Err(Error::Input(format!(
                "solve_milp: integer variable {j} must have finite bounds"
            )));
        }
        if let (Some(l), Some(u)) = (&lp.lower[j], &lp.upper[j]) {
            if l > u {
                return Ok(SolveOutcome::Infeasible);
            }
        }
    }
    let mut relaxed = lp.clone();
    relaxed.integer = vec![false; lp.num_vars()];
    let root = match solve_lp(&relaxed)? {
        SolveOutcome::Infeasible => return Ok(SolveOutcome::Infeasible),
        SolveOutcome::Unbounded { .. } => {
            // Integer assignments are finite by precondition: decide the
            // mixed case exactly by enumeration.
            return enumerate_assignments(lp, &int_vars);
        }
        SolveOutcome::Optimal(sol) => sol,
    };
    let mut best: Option<(Scalar, Vec<Scalar>)> = None;
    let mut stack: Vec<LinearProgram> = Vec::new();
    let mut nodes = 0usize;
    process_node(lp, &relaxed, root, &int_vars, &mut best, &mut stack);
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > NODE_CAP {
            return Err(Error::LimitExceeded("branch-and-bound node cap".into()));
        }
        match solve_lp(&node)? {
            SolveOutcome::Infeasible => {}
            SolveOutcome::Unbounded { .. } => {
                return Err(Error::Internal(
                    "unbounded relaxation below a bounded root".into(),
                ));
            }
            SolveOutcome::Optimal(sol) => {
                process_node(lp, &node, sol, &int_vars, &mut best, &mut stack)
            }
        }
    }
    Ok(match best {
        Some((objective, primal)) => SolveOutcome::Optimal(Solution {
            objective,
            primal,
            row_duals: None,
            reduced_costs: None,
        }),
        None => SolveOutcome::Infeasible,
    })
}

fn improves(sense: Sense, candidate: &Scalar, incumbent: &Scalar) -> bool {
    match sense {
        Sense::Min => candidate < incumbent,
        Sense::Max => candidate > incumbent,
    }
}

fn process_node(
    lp: &LinearProgram,
    node: &LinearProgram,
    sol: Solution,
    int_vars: &[usize],
    best: &mut Option<(Scalar, Vec<Scalar>)>,
    stack: &mut Vec<LinearProgram>,
) {
    if let Some((incumbent, _)) = best {
        if !improves(lp.sense, &sol.objective, incumbent) {
            return;
        }
    }
    let fractional = int_vars
        .iter()
        .copied()
        .find(|&j| !sol.primal[j].is_integer());
    match fractional {
        None => *best = Some((sol.objective, sol.primal)),
        Some(j) => {
            let v = &sol.primal[j];
            let mut down = node.clone();
            down.upper[j] = Some(v.floor());
            let mut up = node.clone();
            up.lower[j] = Some(v.floor() + Scalar::one());
            stack.push(up);
            stack.push(down);
        }
    }
}

/// Exhaustive fallback over all integer assignments (used only when the
/// root relaxation is unbounded).
fn enumerate_assignments(lp: &LinearProgram, int_vars: &[usize]) -> Result<SolveOutcome> {
    let mut count = 1usize;
    for &j in int_vars {
        let (l, u) = (
            lp.lower[j].clone().unwrap().ceil(),
            lp.upper[j].clone().unwrap().floor(),
        );
        let span = (&u - &l + Scalar::one()).to_integer();
        let span: usize = span.try_into().map_err(|_| {
            Error::LimitExceeded("integer box too large to enumerate".into())
        })?;
        count = count
            .checked_mul(span)
            .filter(|&c| c <= ENUM_CAP)
            .ok_or_else(|| Error::LimitExceeded("integer box too large to enumerate".into()))?;
    }
    let mut best: Option<Solution> = None;
    let mut assignment: Vec<Scalar> = int_vars
        .iter()
        .map(|&j| lp.lower[j].clone().unwrap().ceil())
        .collect();
    loop {
        let mut fixed = lp.clone();
        fixed.integer = vec![false; lp.num_vars()];
        for (k, &j) in int_vars.iter().enumerate() {
            fixed.lower[j] = Some(assignment[k].clone());
            fixed.upper[j] = Some(assignment[k].clone());
        }
        match solve_lp(&fixed)? {
            SolveOutcome::Infeasible => {}
            SolveOutcome::Unbounded { ray } => return Ok(SolveOutcome::Unbounded { ray }),
            SolveOutcome::Optimal(sol) => {
                let better = match &best {
                    None => true,
                    Some(cur) => improves(lp.sense, &sol.objective, &cur.objective),
                };
                if better {
                    best = Some(sol);
                }
            }
        }
        // Odometer step.
        let mut k = int_vars.len();
        loop {
            if k == 0 {
                return Ok(match best {
                    Some(sol) => SolveOutcome::Optimal(Solution {
                        objective: sol.objective,
                        primal: sol.primal,
                        row_duals: None,
                        reduced_costs: None,
                    }),
                    None => SolveOutcome::Infeasible,
                });
            }
            k -= 1;
            let j = int_vars[k];
            if &assignment[k] < &lp.upper[j].clone().unwrap().floor() {
                assignment[k] += Scalar::one();
                for kk in k + 1..int_vars.len() {
                    assignment[kk] = lp.lower[int_vars[kk]].clone().unwrap().ceil();
                }
                break;
            }
        }
    }
}
